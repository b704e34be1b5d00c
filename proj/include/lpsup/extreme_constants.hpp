#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace lpsup {

/// f(t) = b_eff |t|^beta + w_eff |t|^gamma on [Q, inf), Q in {0, -inf}.
struct DriftFunctional {
    double b_eff = 0.0;
    double beta = 1.0;
    double w_eff = 0.0;
    double gamma = 1.0;
    bool two_sided = false;

    double operator()(double t) const;
    double Q() const;
    bool is_zero() const { return b_eff == 0.0 && w_eff == 0.0; }
    void validate() const;
};

enum class Estimator {
    /// Mean of the grid supremum of exp(Y).
    Direct,
    /// Shift-normalized mean sup_T exp(Y) / sum_T exp(Y) with a random shift;
    /// same expectation on the grid, bounded summands.
    ShiftNormalized,
};

std::string to_string(Estimator e);

struct ConstantEstimate {
    double value = 0.0;
    double std_error = 0.0;
    double S1 = 0.0;
    double S2 = 0.0;
    double delta = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    Estimator estimator = Estimator::ShiftNormalized;
};

inline constexpr double kDefaultDelta = 0.02;
inline constexpr double kDefaultWindow = 50.0;
/// The truncated window must satisfy a S^alpha + f(S) >= this.
inline constexpr double kTruncationExponent = 40.0;

/// E sup over {j delta : -S1 <= j delta <= S2} of exp(sqrt(2) B(t) - |t|^alpha).
ConstantEstimate pickands_window(double alpha, double S1, double S2, double delta, std::uint64_t n_samples,
                                 std::uint64_t seed, Estimator estimator = Estimator::ShiftNormalized,
                                 int threads = 0);

/// pickands_window(alpha, 0, S) / S.
ConstantEstimate pickands_constant(double alpha, double S, double delta, std::uint64_t n_samples, std::uint64_t seed,
                                   Estimator estimator = Estimator::ShiftNormalized, int threads = 0);

/// (H[0, 2S] - H[0, S]) / S from two independent runs; removes the O(1/S)
/// end effect of H[0, S] / S. The record carries S1 = S, S2 = 2S.
ConstantEstimate pickands_slope(double alpha, double S, double delta, std::uint64_t n_samples, std::uint64_t seed,
                                Estimator estimator = Estimator::ShiftNormalized, int threads = 0);

/// Smallest S with a S^alpha + f(S) >= kTruncationExponent.
double minimal_truncation(double alpha, double a, const DriftFunctional& f);

/// E sup over the grid on [max(Q, -S), S] of exp(sqrt(2a) B(t) - a|t|^alpha - f(t)).
ConstantEstimate piterbarg_constant(double alpha, double a, const DriftFunctional& f, double S, double delta,
                                    std::uint64_t n_samples, std::uint64_t seed,
                                    Estimator estimator = Estimator::ShiftNormalized, int threads = 0);

/// P^{b t^alpha}_{alpha, a}[0, inf) for alpha in {1, 2}.
double piterbarg_closed_form(double alpha, double a, double b);

/// Closed form for (alpha, a, f) when f is a one-sided pure power b t^alpha
/// with alpha in {1, 2}; empty otherwise.
std::optional<double> piterbarg_closed_form_for(double alpha, double a, const DriftFunctional& f);

/// Exact Pickands constant when known (alpha = 1: 1, alpha = 2: 1/sqrt(pi)).
std::optional<double> pickands_closed_form(double alpha);

}  // namespace lpsup
