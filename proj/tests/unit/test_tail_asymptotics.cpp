#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lpsup/tail_asymptotics.hpp"
#include "oracles.hpp"

using namespace lpsup;

namespace {

ConstantResolver quick_resolver() {
    ConstantResolver r;
    r.n_samples = 2000;
    r.seed = 5;
    return r;
}

}  // namespace

TEST_SUITE("tail_asymptotics") {

TEST_CASE("regime classification") {
    auto r = classify_regime(1.0, 1.0, 1.0, 0.5);
    CHECK(r.alpha_star == 1.0);
    CHECK(r.beta_star == 1.0);
    CHECK(r.regime == RegimeCase::Piterbarg);
    CHECK(r.b_term);
    CHECK(r.w_term);

    r = classify_regime(0.5, 2.0, 1.0, 1.0);
    CHECK(r.alpha_star == 1.0);
    CHECK(r.beta_star == 2.0);
    CHECK(r.regime == RegimeCase::Pickands);

    r = classify_regime(2.0, 1.0, 1.0, 1.0);
    CHECK(r.alpha_star == 2.0);
    CHECK(r.beta_star == 1.0);
    CHECK(r.regime == RegimeCase::Pointwise);

    SUBCASE("across the tie the indicator set switches through the both-terms case") {
        // c = 1, beta = 1: tie at gamma = 1/2.
        const auto lo = classify_regime(1.0, 1.0, 1.0, 0.4);
        const auto tie = classify_regime(1.0, 1.0, 1.0, 0.5);
        const auto hi = classify_regime(1.0, 1.0, 1.0, 0.6);
        CHECK((!lo.b_term && lo.w_term));
        CHECK((tie.b_term && tie.w_term));
        CHECK((hi.b_term && !hi.w_term));
        CHECK(lo.beta_star == doctest::Approx(0.8));
        CHECK(hi.beta_star == 1.0);
    }
    SUBCASE("no trend keeps beta c") {
        const auto r2 = classify_regime(1.0, 1.0, 1.0, 0.1, false);
        CHECK(r2.beta_star == 1.0);
        CHECK_FALSE(r2.w_term);
    }
}

TEST_CASE("drift functional") {
    SUBCASE("fBm at t0 = 1 with a square-root trend") {
        for (double alpha : {0.5, 1.0, 1.5}) {
            const double d = 1.3;
            const auto f = drift_functional({alpha / 2.0, 1.0, 0.5, alpha, 1.0, 1.0}, {1.0, 0.5, 1.0}, 1.0, d);
            for (double t : {0.1, 1.0, 4.0}) {
                CHECK(f(t) == doctest::Approx(alpha / (2.0 * d * d) * t + std::sqrt(t) / (d * d)).epsilon(1e-14));
            }
            CHECK_FALSE(f.two_sided);
        }
    }
    SUBCASE("c >= 2 keeps only the variance term") {
        const auto f = drift_functional({0.7, 1.0, 0.5, 1.0, 1.0, 1.0}, {3.0, 0.1, 1.0}, 2.0, 1.0);
        CHECK(f.b_eff == 0.7);
        CHECK(f.w_eff == 0.0);
    }
    SUBCASE("w = 0 is the centered case") {
        const auto f = drift_functional({0.7, 1.0, 0.5, 1.0, 1.0, 1.0}, {0.0, 0.1, 1.0}, 1.0, 1.0);
        CHECK(f.b_eff == 0.7);
        CHECK(f.w_eff == 0.0);
    }
    SUBCASE("interior t0 is two-sided") {
        const auto f = drift_functional({0.7, 2.0, 0.5, 1.0, 0.5, 1.0}, {0.0, 1.0, 0.5}, 1.0, 1.0);
        CHECK(f.two_sided);
    }
}

TEST_CASE("integral of exp(-f)") {
    DriftFunctional f;
    f.b_eff = 1.0;
    f.beta = 1.0;
    CHECK(integral_exp_neg_f(f) == doctest::Approx(1.0).epsilon(1e-10));
    f.beta = 2.0;
    f.two_sided = true;
    CHECK(integral_exp_neg_f(f) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
    f.two_sided = false;
    f.b_eff = 0.25;
    f.beta = 1.0;
    CHECK(integral_exp_neg_f(f) == doctest::Approx(4.0).epsilon(1e-10));
    f.w_eff = 1.0;
    f.gamma = 0.5;
    // int_0^inf exp(-t/4 - sqrt(t)) dt = 4 - 4 e sqrt(pi) erfc(1) after t = s^2.
    CHECK(integral_exp_neg_f(f) ==
          doctest::Approx(4.0 - 4.0 * std::exp(1.0) * std::sqrt(std::numbers::pi) * std::erfc(1.0)).epsilon(1e-9));
    CHECK_THROWS_AS(integral_exp_neg_f(DriftFunctional{0.0, 1.0, 0.0, 1.0, false}), std::invalid_argument);
}

TEST_CASE("nonstationary assembly") {
    const WeightVector w({1.0, 0.5});
    SUBCASE("square-root trend, alpha > 1 is pointwise") {
        const auto t = fbm_sqrt_trend_tail(1.5, NormOrder(2.0), w, quick_resolver());
        CHECK(t.multiplier_kind == MultiplierKind::Unity);
        CHECK(t.multiplier(7.0) == 1.0);
        const auto pw = pointwise_tail_asymptotic(NormOrder(2.0), 1.0, w);
        CHECK(t.evaluate(5.0) == pw.evaluate(5.0));
    }
    SUBCASE("square-root trend, alpha = 1 uses the Piterbarg constant at a / d^2") {
        const auto t = fbm_sqrt_trend_tail(1.0, NormOrder(1.5), w, quick_resolver());
        CHECK(t.multiplier_kind == MultiplierKind::PiterbargConstant);
        const double d = critical_scale(NormOrder(1.5), w).critical_scale;
        REQUIRE(t.constants.size() == 1);
        CHECK(t.constants[0].provenance == "monte-carlo");
        REQUIRE(t.drift.has_value());
        CHECK(t.drift->b_eff == doctest::Approx(0.5 / (d * d)));
        CHECK(t.drift->w_eff == doctest::Approx(1.0 / (d * d)));
        CHECK(t.u_power == 0.0);
    }
    SUBCASE("square-root trend, alpha < 1 is Pickands with a positive u power") {
        const auto t = fbm_sqrt_trend_tail(0.5, NormOrder(2.0), w, quick_resolver());
        CHECK(t.multiplier_kind == MultiplierKind::PickandsIntegral);
        CHECK(t.u_power == doctest::Approx(2.0 / 0.5 - 2.0 / 1.0));
        CHECK(t.u_power > 0.0);
    }
    SUBCASE("centered fBm chi-square, alpha = 1") {
        const NonStationaryLocalModel m{0.5, 1.0, 0.5, 1.0, 1.0, 1.0};
        const auto t = nonstationary_supremum_tail(NormOrder(2.0), 2.0, WeightVector::ones(2), m, {0.0, 1.0, 1.0});
        CHECK(t.multiplier_kind == MultiplierKind::PiterbargConstant);
        CHECK(t.coefficient == 2.0);
        CHECK(t.constants[0].provenance == "closed-form");
    }
    SUBCASE("Pickands coefficient by hand") {
        // alpha = 1/2, c = 2, beta = 1, b = 1/4, a = 1/2, d = 1: u^{2 - 1} a^2 H int e^{-t/4} = u H.
        const NonStationaryLocalModel m{0.25, 1.0, 0.5, 0.5, 1.0, 1.0};
        const auto t = nonstationary_supremum_tail(NormOrder(2.0), 2.0, WeightVector({1.0}), m, {0.0, 1.0, 1.0},
                                                   quick_resolver());
        const double H = t.constants.at(0).value;
        CHECK(t.constants.at(1).value == doctest::Approx(4.0).epsilon(1e-10));
        CHECK(t.coefficient == doctest::Approx(0.25 * H * 4.0).epsilon(1e-12));
        CHECK(t.u_power == doctest::Approx(1.0));
        CHECK(t.relative_uncertainty() > 0.0);
        const auto [lo, hi] = t.band(10.0);
        CHECK(lo < t.evaluate(10.0));
        CHECK(hi > t.evaluate(10.0));
    }
    SUBCASE("negative w only when c >= 2 or gamma > beta") {
        const NonStationaryLocalModel m{0.5, 1.0, 0.5, 1.0, 1.0, 1.0};
        CHECK_THROWS_AS(nonstationary_supremum_tail(NormOrder(2.0), 1.0, w, m, {-1.0, 0.25, 1.0}),
                        std::invalid_argument);
        CHECK_NOTHROW(nonstationary_supremum_tail(NormOrder(2.0), 2.0, w, m, {-1.0, 0.25, 1.0}));
        CHECK_NOTHROW(nonstationary_supremum_tail(NormOrder(2.0), 1.0, w, m, {-1.0, 2.0, 1.0}));
    }
}

TEST_CASE("w = 0 reduces to the centered form") {
    const WeightVector w({1.0, 0.8});
    for (double alpha : {0.6, 1.0, 1.7}) {
        for (double t0 : {0.0, 0.4}) {
            const NonStationaryLocalModel m{0.3, 1.4, 0.7, alpha, t0, 1.0};
            const auto a = nonstationary_supremum_tail(NormOrder(1.5), 1.5, w, m, {0.0, 0.8, t0}, quick_resolver());
            const auto b = centered_nonstationary_supremum_tail(NormOrder(1.5), 1.5, w, m, quick_resolver());
            for (double u : {5.0, 10.0, 20.0, 40.0, 80.0}) {
                CHECK(a.evaluate(u) == doctest::Approx(b.evaluate(u)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("locally stationary forms") {
    const auto a2 = TabulatedFunction::constant(2.0, 0.0, 1.0);
    SUBCASE("OU chi-square, n = 2") {
        const auto t = locally_stationary_supremum_tail(NormOrder(2.0), 2.0, WeightVector::ones(2), 1.0, a2);
        CHECK(t.evaluate_limit(20.0) == doctest::Approx(40.0 * std::exp(-10.0)).epsilon(1e-12));
        CHECK(t.evaluate_limit(20.0) == doctest::Approx(1.816e-3).epsilon(1e-3));
        // The exact Psi lowers the value by about 1/u.
        CHECK(t.evaluate(20.0) / t.evaluate_limit(20.0) == doctest::Approx(1.0 - 1.0 / 20.0).epsilon(0.01));
    }
    SUBCASE("n = 1") {
        const auto t = locally_stationary_supremum_tail(NormOrder(2.0), 2.0, WeightVector({1.0}), 1.0, a2);
        for (double u : {10.0, 30.0}) {
            CHECK(t.evaluate_limit(u) ==
                  doctest::Approx(2.0 * std::sqrt(2.0) / std::sqrt(std::numbers::pi) * std::sqrt(u) * std::exp(-u / 2.0))
                      .epsilon(1e-12));
        }
    }
    SUBCASE("constant a") {
        const auto a = TabulatedFunction::constant(3.0, 0.0, 2.0);
        const WeightVector w({1.0, 0.5});
        const auto t = locally_stationary_supremum_tail(NormOrder(1.5), 1.0, w, 2.0, a);
        const double d = critical_scale(NormOrder(1.5), w).critical_scale;
        CHECK(t.multiplier(9.0) ==
              doctest::Approx(std::sqrt(3.0) * 2.0 / d / std::sqrt(std::numbers::pi) * 9.0).epsilon(1e-12));
    }
    SUBCASE("tabulated a(t)") {
        const TabulatedFunction a({0.0, 0.5, 1.0}, {1.0, 3.0, 2.0});
        const auto t = locally_stationary_supremum_tail(NormOrder(2.0), 2.0, WeightVector::ones(2), 1.0, a);
        CHECK(t.coefficient == doctest::Approx(0.5 * 2.0 + 0.5 * 2.5).epsilon(1e-12));
        CHECK_THROWS_AS(
            locally_stationary_supremum_tail(NormOrder(2.0), 2.0, WeightVector::ones(2), 1.0,
                                             TabulatedFunction({0.0, 1.0}, {1.0, -1.0})),
            std::invalid_argument);
    }
    SUBCASE("trend with c = 2 weights e^{g/2}") {
        const PowerTrend g{1.0, 1.0, 0.0};
        const auto t = chi_square_trend_tail(WeightVector::ones(3), 1.0, a2, g);
        const double I = 2.0 * (1.0 - std::exp(-0.5)) / 0.5;
        CHECK(t.coefficient == doctest::Approx(I).epsilon(1e-10));
        CHECK(t.u_power == 1.0);
        // The u-power of the full formula is m/2 - 1 + 1/alpha.
        const double u = 30.0;
        const double expect = I * std::pow(u, 1.0 / 2.0 + 1.0) * std::exp(-u / 2.0) * std::pow(2.0, -0.5) /
                              oracle::gamma_half(3);
        CHECK(t.evaluate_limit(u) == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("g = 0 with c = 2 equals the trend-free form") {
        const TabulatedFunction a({0.0, 0.3, 1.0}, {1.0, 2.0, 1.5});
        const auto x = locally_stationary_trend_tail(NormOrder(2.0), 2.0, WeightVector({1.0, 0.5}), 0.8, a, ZeroTrend{},
                                                     quick_resolver());
        const auto y = locally_stationary_supremum_tail(NormOrder(2.0), 2.0, WeightVector({1.0, 0.5}), 0.8, a,
                                                        quick_resolver());
        for (double u : {5.0, 10.0, 20.0, 40.0, 80.0}) CHECK(x.evaluate(u) == doctest::Approx(y.evaluate(u)).epsilon(1e-12));
    }
    SUBCASE("c > 2 ignores a bounded trend") {
        const TabulatedFunction g({0.0, 1.0}, {-3.0, 0.5});
        const auto x = locally_stationary_trend_tail(NormOrder(3.0), 3.0, WeightVector({1.0}), 1.0, a2, g);
        const auto y = locally_stationary_supremum_tail(NormOrder(3.0), 3.0, WeightVector({1.0}), 1.0, a2);
        CHECK(x.evaluate(12.0) == y.evaluate(12.0));
    }
    SUBCASE("c < 2 three-case structure") {
        // gamma = 1, c = 1: beta* = 2 > alpha* = 1: Pickands with u^{2 - 1}.
        const auto t = locally_stationary_trend_tail(NormOrder(2.0), 1.0, WeightVector::ones(2), 1.0, a2,
                                                     PowerTrend{2.0, 1.0, 0.0});
        CHECK(t.multiplier_kind == MultiplierKind::PickandsIntegral);
        CHECK(t.u_power == doctest::Approx(1.0));
        // H_1 = 1, a^{1/alpha} = 2, int e^{-2t} = 1/2.
        CHECK(t.coefficient == doctest::Approx(1.0).epsilon(1e-10));
        CHECK_THROWS_AS(locally_stationary_trend_tail(NormOrder(2.0), 1.0, WeightVector::ones(2), 1.0, a2,
                                                      TabulatedFunction({0.0, 1.0}, {0.0, 0.0})),
                        std::invalid_argument);
    }
}

TEST_CASE("ruin asymptotics") {
    const WeightVector one({1.0});
    SUBCASE("alpha = 1 constant 2") {
        const auto r = ruin_probability_asymptotic(1.0, one, 1.0);
        for (double u : {5.0, 20.0}) {
            CHECK(r.stated_value(u) ==
                  doctest::Approx(2.0 * std::sqrt(2.0 / std::numbers::pi) / std::sqrt(u) * std::exp(-(u + 1.0) / 2.0))
                      .epsilon(1e-12));
        }
        CHECK_FALSE(r.disputed);
        CHECK(r.limiting_factor() == doctest::Approx(1.0));
    }
    SUBCASE("alpha > 1 multiplier 1 at threshold u + w") {
        const auto r = ruin_probability_asymptotic(2.0, one, 0.5);
        CHECK(r.assembled.multiplier_kind == MultiplierKind::Unity);
        const auto pw = pointwise_tail_asymptotic(NormOrder(2.0), 2.0, one);
        CHECK(r.assembled_value(9.0) == pw.evaluate(9.5));
        CHECK(r.stated_value(9.0) / pw.evaluate_limit(9.5) == doctest::Approx(std::sqrt(9.5 / 9.0)).epsilon(1e-12));
    }
    SUBCASE("alpha = 1/2 candidates differ by 1/alpha") {
        const auto r = ruin_probability_asymptotic(0.5, one, 1.0, quick_resolver());
        CHECK(r.disputed);
        CHECK(r.limiting_factor() == doctest::Approx(2.0).epsilon(1e-12));
        const double H = r.constants.at(0).value;
        CHECK(r.branch_coefficient == doctest::Approx(0.5 * H));
        CHECK(r.branch_u_power == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(ruin_probability_asymptotic(1.0, one, 0.0), std::invalid_argument);
}

TEST_CASE("OU chi-square closed form") {
    CHECK(ou_chisq_supremum_tail(2, 1.0, 20.0) == doctest::Approx(40.0 * std::exp(-10.0)).epsilon(1e-14));
    CHECK(ou_chisq_supremum_tail(2, 1.0, 20.0) == doctest::Approx(1.8160e-3).epsilon(1e-4));
    for (int n = 1; n <= 5; ++n) {
        const auto t = locally_stationary_supremum_tail(NormOrder(2.0), 2.0, WeightVector::ones(n), 1.0,
                                                        TabulatedFunction::constant(2.0, 0.0, 1.5));
        for (double u : {8.0, 12.0, 20.0, 40.0, 90.0}) {
            CHECK(ou_chisq_supremum_tail(n, 1.5, u) == doctest::Approx(t.evaluate_limit(u)).epsilon(1e-12));
        }
    }
}

}
