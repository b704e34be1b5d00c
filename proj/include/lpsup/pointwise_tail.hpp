#pragma once

#include <cstdint>

#include "lpsup/norm_geometry.hpp"

namespace lpsup {

/// Standard normal survival function Psi(z) = P{N(0,1) > z} via erfc.
double normal_survival(double z);

/// Mills-ratio form phi(z)/z of Psi(z); requires z > 0.
double normal_survival_mills(double z);

/// K * u^rho * Psi(u^{1/c} / d).
struct PointwiseTail {
    double coefficient = 1.0;
    double u_power = 0.0;
    double scale = 1.0;
    double c = 1.0;

    /// Uses the exact Psi.
    double evaluate(double u) const;
    /// Uses Psi(z) ~ phi(z)/z, the pure asymptotic form.
    double evaluate_limit(double u) const;
    /// evaluate(u) is strictly decreasing for u beyond this point.
    double monotone_from() const;
};

/// One-point tail of ||d * X||_p^c for X ~ N(0, I_n).
PointwiseTail pointwise_tail_asymptotic(const NormOrder& order, double c, const WeightVector& weights);

/// Chi-square survival P{chi^2_m > u}.
double pointwise_tail_exact_chi(int m_dof, double u);

struct PointwiseMC {
    double p_hat = 0.0;
    double std_error = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t n = 0;
    /// Set when fewer than 10 hits were observed.
    bool low_count = false;
};

inline constexpr std::uint64_t kPointwiseChunk = 1 << 16;

PointwiseMC pointwise_tail_mc(const NormOrder& order, double c, const WeightVector& weights, double u,
                              std::uint64_t n_samples, std::uint64_t seed, int threads = 0);

}  // namespace lpsup
