#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lpsup/pointwise_tail.hpp"
#include "oracles.hpp"

using namespace lpsup;

TEST_SUITE("pointwise_tail") {

TEST_CASE("normal survival") {
    CHECK(normal_survival(0.0) == 0.5);
    CHECK(normal_survival(1.959963985) == doctest::Approx(0.025).epsilon(1e-9));
    for (double z : {0.5, 3.0, 8.0, 20.0, 37.0}) {
        CAPTURE(z);
        CHECK(normal_survival(z) == doctest::Approx(oracle::normal_tail_simpson(z)).epsilon(1e-10));
    }
    const double z = 10.0;
    CHECK(normal_survival(z) * z * std::sqrt(2.0 * std::numbers::pi) * std::exp(z * z / 2.0) ==
          doctest::Approx(1.0).epsilon(0.01));
    CHECK(normal_survival_mills(z) == doctest::Approx(oracle::phi(z) / z).epsilon(1e-14));
}

TEST_CASE("coefficients per branch") {
    SUBCASE("p < 2") {
        const auto t = pointwise_tail_asymptotic(NormOrder(1.5), 1.0, WeightVector({1.0, 0.5, 0.5}));
        CHECK(t.coefficient == doctest::Approx(8.0 * std::pow(0.5, -1.0)).epsilon(1e-14));
        CHECK(t.u_power == 0.0);
    }
    SUBCASE("p = 2 with convention product 1 for m = n") {
        const auto t = pointwise_tail_asymptotic(NormOrder(2.0), 2.0, WeightVector({1.0, 1.0}));
        for (double u : {5.0, 20.0, 100.0}) {
            CHECK(t.evaluate_limit(u) == doctest::Approx(std::exp(-u / 2.0)).epsilon(1e-14));
        }
    }
    SUBCASE("p = 2 with sub-unit weights") {
        const WeightVector w({1.0, 0.6});
        const auto t = pointwise_tail_asymptotic(NormOrder(2.0), 1.0, w);
        const double K = std::sqrt(2.0 * std::numbers::pi) * std::pow(2.0, 0.5) / std::sqrt(1.0 - 0.36) /
                         std::sqrt(std::numbers::pi);
        CHECK(t.coefficient == doctest::Approx(K).epsilon(1e-14));
        CHECK(t.u_power == 0.0);
    }
    SUBCASE("p = inf, n = 1 is the folded normal") {
        const auto t = pointwise_tail_asymptotic(NormOrder(kInf), 1.0, WeightVector({1.0}));
        CHECK(t.coefficient == 2.0);
        CHECK(t.u_power == 0.0);
        CHECK(t.evaluate(2.0) == doctest::Approx(2.0 * normal_survival(2.0)));
    }
    SUBCASE("p = 1, n = 1 matches p = inf") {
        const auto t = pointwise_tail_asymptotic(NormOrder(1.0), 1.0, WeightVector({1.0}));
        CHECK(t.coefficient == 2.0);
        CHECK(t.u_power == 0.0);
    }
}

TEST_CASE("p = 2 anchor against the exact chi-square") {
    for (int n = 1; n <= 4; ++n) {
        const auto t = pointwise_tail_asymptotic(NormOrder(2.0), 2.0, WeightVector::ones(n));
        for (double u : {20.0, 50.0, 200.0}) {
            const double exact = oracle::chi_square_survival(n, u);
            CHECK(pointwise_tail_exact_chi(n, u) == doctest::Approx(exact).epsilon(1e-12));
            if (n == 2) CHECK(t.evaluate_limit(u) / exact == doctest::Approx(1.0).epsilon(1e-14));
        }
        // The ratio tends to 1.
        const double r1 = t.evaluate_limit(50.0) / oracle::chi_square_survival(n, 50.0);
        const double r2 = t.evaluate_limit(400.0) / oracle::chi_square_survival(n, 400.0);
        CHECK(std::abs(r2 - 1.0) <= std::abs(r1 - 1.0) + 1e-14);
        CHECK(std::abs(r2 - 1.0) < 0.01);
    }
}

TEST_CASE("exact chi-square examples") {
    CHECK(pointwise_tail_exact_chi(2, 10.0) == doctest::Approx(std::exp(-5.0)).epsilon(1e-13));
    CHECK(pointwise_tail_exact_chi(1, 4.0) == doctest::Approx(2.0 * oracle::normal_tail_simpson(2.0)).epsilon(1e-10));
    CHECK(pointwise_tail_exact_chi(4, 20.0) == doctest::Approx(11.0 * std::exp(-10.0)).epsilon(1e-13));
    CHECK_THROWS_AS(pointwise_tail_exact_chi(0, 1.0), std::invalid_argument);
}

TEST_CASE("evaluate is decreasing beyond the documented threshold") {
    const auto t = pointwise_tail_asymptotic(NormOrder(2.0), 1.0, WeightVector::ones(4));
    const double u0 = t.monotone_from();
    double prev = t.evaluate(u0);
    for (int k = 1; k <= 200; ++k) {
        const double v = t.evaluate(u0 + 0.05 * k);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("Monte-Carlo oracle") {
    SUBCASE("chi-square(2) tail") {
        const auto mc = pointwise_tail_mc(NormOrder(2.0), 2.0, WeightVector({1.0, 1.0}), 10.0, 1000000, 11);
        CHECK(std::abs(mc.p_hat - std::exp(-5.0)) < 3.0 * mc.std_error);
        CHECK_FALSE(mc.low_count);
    }
    SUBCASE("u = 0") {
        for (double p : {1.0, 2.0, 3.0, kInf}) {
            const auto mc = pointwise_tail_mc(NormOrder(p), 1.0, WeightVector({1.0, 0.5}), 0.0, 10000, 3);
            CHECK(mc.p_hat == 1.0);
        }
    }
    SUBCASE("max norm factorizes over coordinates") {
        const auto mc = pointwise_tail_mc(NormOrder(kInf), 1.0, WeightVector({1.0, 1.0}), 2.0, 1000000, 5);
        const double q = 2.0 * oracle::normal_tail_simpson(2.0);
        const double expect = 1.0 - (1.0 - q) * (1.0 - q);
        CHECK(expect == doctest::Approx(0.0889).epsilon(0.01));
        CHECK(std::abs(mc.p_hat - expect) < 3.0 * mc.std_error);
    }
    SUBCASE("low hit count is flagged") {
        const auto mc = pointwise_tail_mc(NormOrder(2.0), 2.0, WeightVector({1.0}), 60.0, 10000, 5);
        CHECK(mc.low_count);
    }
    SUBCASE("budget precondition") {
        CHECK_THROWS_AS(pointwise_tail_mc(NormOrder(2.0), 2.0, WeightVector({1.0}), 1.0, 100, 5),
                        std::invalid_argument);
    }
    SUBCASE("deterministic and thread-count invariant") {
        const auto a = pointwise_tail_mc(NormOrder(1.5), 1.0, WeightVector({1.0, 0.7}), 3.0, 300000, 9, 1);
        const auto b = pointwise_tail_mc(NormOrder(1.5), 1.0, WeightVector({1.0, 0.7}), 3.0, 300000, 9, 3);
        CHECK(a.hits == b.hits);
        CHECK(a.p_hat == b.p_hat);
    }
}

TEST_CASE("ratio convergence on each p branch") {
    // At the u where the asymptotic equals 1e-4, 2e6 samples give about 200 hits.
    struct Case {
        double p;
        std::size_t n;
    };
    for (const Case cs : {Case{1.5, 2}, Case{2.0, 3}, Case{3.0, 2}}) {
        const WeightVector w = WeightVector::ones(cs.n);
        const auto t = pointwise_tail_asymptotic(NormOrder(cs.p), 1.0, w);
        double lo = 0.5, hi = 20.0;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (t.evaluate(mid) > 1e-4 ? lo : hi) = mid;
        }
        const auto mc = pointwise_tail_mc(NormOrder(cs.p), 1.0, w, lo, 2000000, 21);
        const double asym = t.evaluate(lo);
        CAPTURE(cs.p);
        CHECK(std::abs(mc.p_hat / asym - 1.0) <= std::max(5.0 * mc.std_error / asym, 0.15));
    }
}

}
