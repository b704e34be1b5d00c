#include <doctest.h>

#include <cmath>
#include <random>

#include "lpsup/norm_geometry.hpp"
#include "oracles.hpp"

using namespace lpsup;

TEST_SUITE("norm_geometry") {

TEST_CASE("dual exponent") {
    CHECK(dual_exponent(2.0) == 2.0);
    CHECK(dual_exponent(1.0) == kInf);
    CHECK(dual_exponent(kInf) == 1.0);
    CHECK(dual_exponent(3.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK_THROWS_AS(dual_exponent(0.5), std::invalid_argument);
    CHECK_THROWS_AS(dual_exponent(std::nan("")), std::invalid_argument);
    const NormOrder o(4.0);
    CHECK(1.0 / o.p() + 1.0 / o.q() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("weight vector validation") {
    CHECK(WeightVector({1.0, 1.0, 0.5}).leading_ones() == 2);
    CHECK(WeightVector({1.0}).leading_ones() == 1);
    CHECK(WeightVector::ones(4).leading_ones() == 4);
    CHECK_THROWS_AS(WeightVector({}), std::invalid_argument);
    CHECK_THROWS_AS(WeightVector({0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(WeightVector({1.0, 0.5, 0.7}), std::invalid_argument);
    CHECK_THROWS_AS(WeightVector({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(WeightVector({1.0, -0.5}), std::invalid_argument);
}

TEST_CASE("critical scale examples") {
    SUBCASE("p = 2 gives the sphere with d = 1") {
        const auto g = critical_scale(NormOrder(2.0), WeightVector({1.0, 1.0, 0.5}));
        CHECK(g.critical_scale == 1.0);
        CHECK(g.kind == MaximizerKind::Sphere);
        CHECK_FALSE(g.point_count.has_value());
        CHECK(g.representatives.size() == 2);
    }
    SUBCASE("p = 1 with two unit weights") {
        const auto g = critical_scale(NormOrder(1.0), WeightVector({1.0, 1.0}));
        CHECK(g.critical_scale == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        CHECK(g.kind == MaximizerKind::DiscreteSignPoints);
        CHECK(*g.point_count == 4);
        for (const auto& v : g.representatives) {
            CHECK(std::abs(v[0]) == 1.0);
            CHECK(std::abs(v[1]) == 1.0);
        }
        CHECK(oracle::dual_sphere_grid_d2({1.0, 1.0}, oracle::inf(), 400) == doctest::Approx(2.0));
    }
    SUBCASE("p = 4 picks the 2m axis points") {
        const auto g = critical_scale(NormOrder(4.0), WeightVector({1.0, 0.5}));
        CHECK(g.critical_scale == 1.0);
        CHECK(g.kind == MaximizerKind::AxisPoints);
        CHECK(*g.point_count == 2);
        for (const auto& v : g.representatives) {
            CHECK(std::abs(v[0]) == 1.0);
            CHECK(v[1] == 0.0);
        }
    }
    SUBCASE("p = inf uses the axis branch") {
        const auto g = critical_scale(NormOrder(kInf), WeightVector({1.0, 1.0, 0.3}));
        CHECK(g.critical_scale == 1.0);
        CHECK(*g.point_count == 4);
    }
}

TEST_CASE("representatives lie on the dual sphere and attain d^2") {
    const std::vector<std::vector<double>> ws = {{1.0}, {1.0, 0.7}, {1.0, 1.0, 0.4}, {1.0, 0.9, 0.2}};
    for (double p : {1.0, 1.3, 1.7, 2.0, 2.5, 4.0, kInf}) {
        for (const auto& w : ws) {
            const NormOrder o(p);
            const WeightVector wv(w);
            const auto g = critical_scale(o, wv);
            const double d2 = g.critical_scale * g.critical_scale;
            for (const auto& v : g.representatives) {
                CHECK(lp_norm(v, o.q()) == doctest::Approx(1.0).epsilon(1e-12));
                double s = 0.0;
                for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * w[i] * v[i] * v[i];
                CHECK(s == doctest::Approx(d2).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("critical scale agrees with brute-force maximization") {
    const std::vector<std::vector<double>> ws = {{1.0, 0.6}, {1.0, 1.0, 0.5}, {1.0, 0.8, 0.3}};
    for (double p : {1.0, 1.3, 1.7, 2.0, 2.5, 4.0, kInf}) {
        for (const auto& w : ws) {
            const NormOrder o(p);
            const double d = critical_scale(o, WeightVector(w)).critical_scale;
            const double grid = oracle::dual_sphere_grid_d2(w, o.q(), w.size() == 2 ? 4000 : 600);
            CAPTURE(p);
            CHECK(grid <= d * d * (1.0 + 1e-12));
            CHECK(d * d == doctest::Approx(grid).epsilon(1e-3));
        }
    }
}

TEST_CASE("critical scale approaches 1 as p increases to 2") {
    const WeightVector w({1.0, 0.9, 0.8});
    double prev = critical_scale(NormOrder(1.5), w).critical_scale;
    for (double p : {1.6, 1.8, 1.9, 1.95, 1.98}) {
        const double d = critical_scale(NormOrder(p), w).critical_scale;
        CHECK(d < prev);
        CHECK(d > 1.0);
        prev = d;
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(critical_scale(NormOrder(2.0), w).critical_scale == 1.0);
}

TEST_CASE("weighted norm examples") {
    const std::vector<double> a{3.0, 4.0}, b{1.0, -1.0}, c{2.0, -7.0};
    CHECK(weighted_lp_norm(a, NormOrder(2.0), WeightVector({1.0, 1.0})) == doctest::Approx(5.0));
    CHECK(weighted_lp_norm(b, NormOrder(1.0), WeightVector({1.0, 0.5})) == doctest::Approx(1.5));
    CHECK(weighted_lp_norm(c, NormOrder(kInf), WeightVector({1.0, 1.0})) == 7.0);
}

TEST_CASE("dual witness") {
    const std::vector<double> e1{1.0, 0.0}, ones{1.0, 1.0}, x34{3.0, 4.0};
    auto v = dual_witness(e1, NormOrder(2.0), WeightVector({1.0, 1.0}));
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(0.0));
    v = dual_witness(ones, NormOrder(1.0), WeightVector({1.0, 1.0}));
    CHECK(v[0] == 1.0);
    CHECK(v[1] == 1.0);
    v = dual_witness(x34, NormOrder(2.0), WeightVector({1.0, 1.0}));
    CHECK(v[0] == doctest::Approx(0.6));
    CHECK(v[1] == doctest::Approx(0.8));
    const std::vector<double> zero{0.0, 0.0};
    CHECK_THROWS_AS(dual_witness(zero, NormOrder(2.0), WeightVector({1.0, 1.0})), std::invalid_argument);
}

TEST_CASE("duality: witness attains the norm and no sphere point exceeds it") {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const WeightVector w({1.0, 0.8, 0.3});
    for (double p : {1.0, 1.5, 2.0, 3.0, kInf}) {
        const NormOrder o(p);
        for (int rep = 0; rep < 1000; ++rep) {
            const std::vector<double> x{nd(gen), nd(gen), nd(gen)};
            const double norm = weighted_lp_norm(x, o, w);
            const auto v = dual_witness(x, o, w);
            double s = 0.0;
            for (std::size_t i = 0; i < 3; ++i) s += w[i] * v[i] * x[i];
            CHECK(s == doctest::Approx(norm).epsilon(1e-10));
            CHECK(lp_norm(v, o.q()) == doctest::Approx(1.0).epsilon(1e-10));
            // A random point of S_q never beats the norm (Hoelder).
            std::vector<double> r{nd(gen), nd(gen), nd(gen)};
            const double rn = lp_norm(r, o.q());
            double t = 0.0;
            for (std::size_t i = 0; i < 3; ++i) t += w[i] * r[i] / rn * x[i];
            CHECK(t <= norm * (1.0 + 1e-12));
        }
    }
}

}
