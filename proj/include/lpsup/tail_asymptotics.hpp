#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lpsup/extreme_constants.hpp"
#include "lpsup/functions.hpp"
#include "lpsup/norm_geometry.hpp"
#include "lpsup/pointwise_tail.hpp"

namespace lpsup {

/// sigma(t) = 1 - b|t - t0|^beta + ..., r(s, t) = 1 - a|t - s|^alpha + ... near t0.
struct NonStationaryLocalModel {
    double b = 1.0;
    double beta = 1.0;
    double a = 1.0;
    double alpha = 1.0;
    double t0 = 0.0;
    double T = 1.0;

    void validate() const;
};

/// g(t) ~ -w |t - t0|^gamma near t0.
struct TrendLocalModel {
    double w = 0.0;
    double gamma = 1.0;
    double t0 = 0.0;
};

enum class RegimeCase { Pickands, Piterbarg, Pointwise };
std::string to_string(RegimeCase r);

struct RegimeClassification {
    double alpha_star = 0.0;
    double beta_star = 0.0;
    RegimeCase regime = RegimeCase::Pointwise;
    /// Which terms enter f: b|t|^beta / d^2 and w|t|^gamma / (c d^2).
    bool b_term = true;
    bool w_term = false;
};

/// Relative tolerance for deciding ties between exponents.
inline constexpr double kTieTolerance = 1e-12;

/// `has_trend = false` (w = 0) leaves beta* = beta c for every c.
RegimeClassification classify_regime(double alpha, double c, double beta, double gamma, bool has_trend = true);

/// f entering the multiplier; Q = -inf iff t0 is interior to [0, T].
DriftFunctional drift_functional(const NonStationaryLocalModel& model, const TrendLocalModel& trend, double c,
                                 double d);

/// Integral of exp(-f) over [Q, inf); the domain is cut where f reaches 46.
double integral_exp_neg_f(const DriftFunctional& f);

/// Policy for Pickands / Piterbarg constants that lack a closed form.
struct ConstantResolver {
    std::uint64_t n_samples = 20000;
    std::uint64_t seed = 20190611;
    double delta = kDefaultDelta;
    double S = kDefaultWindow;
    int threads = 0;
    /// Forces MC even where a closed form exists.
    bool force_mc = false;
};

struct ResolvedConstant {
    std::string name;
    double value = 0.0;
    double std_error = 0.0;
    /// "closed-form", "monte-carlo" or "quadrature".
    std::string provenance;
    std::optional<ConstantEstimate> estimate;
};

ResolvedConstant resolve_pickands(double alpha, const ConstantResolver& resolver);
ResolvedConstant resolve_piterbarg(double alpha, double a, const DriftFunctional& f, const ConstantResolver& resolver);

enum class MultiplierKind { PickandsIntegral, PiterbargConstant, Unity, LocallyStationaryIntegral };
std::string to_string(MultiplierKind k);

/// multiplier(u) * pointwise(u) with multiplier(u) = coefficient * u^u_power.
struct TailApproximation {
    std::string formula_id;
    std::string regime;
    PointwiseTail pointwise;
    MultiplierKind multiplier_kind = MultiplierKind::Unity;
    double coefficient = 1.0;
    double u_power = 0.0;
    std::vector<ResolvedConstant> constants;
    std::optional<RegimeClassification> classification;
    std::optional<DriftFunctional> drift;

    double multiplier(double u) const;
    /// Exact Psi in the pointwise factor.
    double evaluate(double u) const;
    /// Mills-ratio Psi; the pure asymptotic form.
    double evaluate_limit(double u) const;
    /// Relative standard error contributed by Monte-Carlo constants.
    double relative_uncertainty() const;
    std::pair<double, double> band(double u, double z = 1.96) const;
};

TailApproximation nonstationary_supremum_tail(const NormOrder& order, double c, const WeightVector& weights,
                                              const NonStationaryLocalModel& model, const TrendLocalModel& trend,
                                              const ConstantResolver& resolver = {});

/// The centered (w = 0) form assembled directly, without a trend model.
TailApproximation centered_nonstationary_supremum_tail(const NormOrder& order, double c, const WeightVector& weights,
                                                       const NonStationaryLocalModel& model,
                                                       const ConstantResolver& resolver = {});

TailApproximation locally_stationary_supremum_tail(const NormOrder& order, double c, const WeightVector& weights,
                                                   double alpha, const TabulatedFunction& a_fn,
                                                   const ConstantResolver& resolver = {});

TailApproximation locally_stationary_trend_tail(const NormOrder& order, double c, const WeightVector& weights,
                                                double alpha, const TabulatedFunction& a_fn, const Trend& g,
                                                const ConstantResolver& resolver = {});

/// fBm components on [0, 1] with trend g(t) = -(1 - t)^{1/2}, c = 1.
TailApproximation fbm_sqrt_trend_tail(double alpha, const NormOrder& order, const WeightVector& weights,
                                 const ConstantResolver& resolver = {});

/// Chi-square (p = 2, c = 2) of locally stationary components with trend g.
TailApproximation chi_square_trend_tail(const WeightVector& weights, double alpha, const TabulatedFunction& a_fn,
                                 const Trend& g, const ConstantResolver& resolver = {});

/// Two candidate asymptotics for P{inf_{[0,1]} (u + w t - sum_i d_i^2 B_i(t)^2) < 0}.
struct RuinAsymptotic {
    double alpha = 1.0;
    double w = 0.0;
    RegimeCase regime = RegimeCase::Pointwise;
    /// 2^{1-m/2} prod (1 - d_i^2)^{-1/2} / Gamma(m/2)
    double base = 1.0;
    double m = 1.0;
    /// Closed-form branch as stated for the ruin result: coefficient * u^{power}.
    double branch_coefficient = 1.0;
    double branch_u_power = 0.0;
    /// General nonstationary assembly evaluated at threshold u + w.
    TailApproximation assembled;
    /// True when the two candidates differ by a constant factor (alpha < 1).
    bool disputed = false;
    std::vector<ResolvedConstant> constants;

    double stated_value(double u) const;
    double assembled_value(double u) const;
    /// assembled / stated as u -> inf.
    double limiting_factor() const;
};

RuinAsymptotic ruin_probability_asymptotic(double alpha, const WeightVector& weights, double w_premium,
                                           const ConstantResolver& resolver = {});

/// (2^{2-n/2} / Gamma(n/2)) T u^{n/2} e^{-u/2}.
double ou_chisq_supremum_tail(int n, double T, double u);

}  // namespace lpsup
