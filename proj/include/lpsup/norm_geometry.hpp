#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lpsup {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dual exponent q with 1/p + 1/q = 1 (q = inf for p = 1, q = 1 for p = inf).
/// Throws std::invalid_argument unless p lies in [1, inf].
double dual_exponent(double p);

/// The order p of an L^p norm, paired with its dual exponent.
class NormOrder {
public:
    explicit NormOrder(double p);

    double p() const noexcept { return p_; }
    double q() const noexcept { return q_; }
    bool is_infinite() const noexcept { return p_ == kInf; }

private:
    double p_;
    double q_;
};

/// Component weights 1 = d_1 = ... = d_m > d_{m+1} >= ... >= d_n > 0.
///
/// Input is validated as given; unsorted weights are rejected rather than
/// reordered so that component indices keep their meaning.
class WeightVector {
public:
    explicit WeightVector(std::vector<double> values);
    static WeightVector ones(std::size_t n);

    std::size_t size() const noexcept { return values_.size(); }
    /// Number m of leading unit weights.
    std::size_t leading_ones() const noexcept { return m_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    std::vector<double> values_;
    std::size_t m_ = 0;
};

enum class MaximizerKind { DiscreteSignPoints, Sphere, AxisPoints };

std::string to_string(MaximizerKind kind);

/// Maximizers of sum_i d_i^2 v_i^2 over the dual unit sphere S_q.
struct DualGeometry {
    double critical_scale = 1.0;
    MaximizerKind kind = MaximizerKind::AxisPoints;
    /// Number of maximizing points; empty when they form a continuum (p = 2).
    std::optional<std::size_t> point_count;
    /// Maximizing vectors; for the p = 2 continuum only the m axis points.
    std::vector<std::vector<double>> representatives;
};

/// Sign-combination representatives are enumerated in full only up to this
/// dimension; above it the +/- all-positive pair is returned.
inline constexpr std::size_t kMaxEnumeratedSignDim = 12;

DualGeometry critical_scale(const NormOrder& order, const WeightVector& weights);

/// Plain (unweighted) L^p norm.
double lp_norm(std::span<const double> v, double p);

/// ||(d_1 x_1, ..., d_n x_n)||_p.
double weighted_lp_norm(std::span<const double> x, const NormOrder& order, const WeightVector& weights);

/// A vector v on S_q attaining sum_i d_i v_i x_i = weighted_lp_norm(x).
std::vector<double> dual_witness(std::span<const double> x, const NormOrder& order, const WeightVector& weights);

}  // namespace lpsup
