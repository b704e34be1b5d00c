#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpsup/functions.hpp"
#include "lpsup/gaussian_paths.hpp"
#include "lpsup/norm_geometry.hpp"
#include "lpsup/tail_asymptotics.hpp"

namespace lpsup {

/// P{ max_k ||d * X(t_k)||_p^c + g(t_k) > u } on a uniform grid of [0, T].
struct SupremumQuery {
    ProcessModel model = OrnsteinUhlenbeck{1.0};
    std::size_t n_components = 1;
    WeightVector weights = WeightVector::ones(1);
    NormOrder order = NormOrder(2.0);
    double c = 1.0;
    Trend trend = ZeroTrend{};
    double T = 1.0;
    /// Grid points per u^{-2/(alpha c)} correlation window.
    double lambda_res = 10.0;
    /// Fixed grid size; overrides the resolution rule when set.
    std::optional<std::size_t> N;

    void validate() const;
};

inline constexpr std::size_t kMaxGridPoints = std::size_t{1} << 22;
inline constexpr std::uint64_t kMcChunk = 4096;
inline constexpr double kRefineFraction = 0.1;
inline constexpr std::uint64_t kPilotSamples = 10000;

/// Power-of-two N with T / N <= min(T, u^{-2/(alpha c)}) / lambda_res, capped at 2^22.
std::size_t grid_size(const SupremumQuery& q, double u);

struct MCEstimate {
    double u = 0.0;
    double p_hat = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
    std::uint64_t hits = 0;
    std::size_t N = 0;
    std::uint64_t seed = 0;
    double refined_p_hat = 0.0;
    double refined_std_error = 0.0;
    std::uint64_t refined_n = 0;
    /// |p_hat - refined_p_hat| exceeds 3 combined standard errors.
    bool discretization_flag = false;
};

class InfeasibleTarget : public std::runtime_error {
public:
    InfeasibleTarget(const std::string& what, double feasible_u) : std::runtime_error(what), feasible_u_(feasible_u) {}
    /// Largest threshold the sample budget can still resolve.
    double feasible_u() const noexcept { return feasible_u_; }

private:
    double feasible_u_;
};

/// Hit counts of one pass at several thresholds with common random numbers.
/// Streams are (pass_id << 40) | (chunk * n_components + component).
std::vector<std::uint64_t> exceedance_counts(const SupremumQuery& q, std::size_t N, const std::vector<double>& u_values,
                                             std::uint64_t n_samples, std::uint64_t seed, std::uint64_t pass_id,
                                             int threads = 0);

/// Per-sample statistic max_k [ ||d * X(t_k)||_p^c + g(t_k) ].
std::vector<double> supremum_statistics(const SupremumQuery& q, std::size_t N, std::uint64_t n_samples,
                                        std::uint64_t seed, std::uint64_t pass_id, int threads = 0);

/// Crude MC with a 2N refinement pass on 10% of the budget. `predicted`
/// gates feasibility (expected hits >= 20); without it a 1e4-sample pilot
/// decides (pilot rate below 10 / n_samples is infeasible).
MCEstimate supremum_exceedance(const SupremumQuery& q, double u, std::uint64_t n_samples, std::uint64_t seed,
                               const std::function<double(double)>& predicted = {}, int threads = 0);

/// One asymptotic to compare against: returns (value, relative uncertainty).
struct Candidate {
    std::string label;
    std::function<std::pair<double, double>(double)> eval;
};

Candidate candidate_from(const std::string& label, const TailApproximation& t, double threshold_shift = 0.0);

struct RatioCell {
    double asym = 0.0;
    double rel_uncertainty = 0.0;
    double ratio = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

struct RatioRow {
    double u = 0.0;
    bool feasible = true;
    MCEstimate mc;
    std::vector<RatioCell> cells;
};

struct RatioTable {
    std::vector<std::string> labels;
    std::vector<RatioRow> rows;
    std::size_t N = 0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    /// Per candidate: the last feasible CI misses [0.7, 1.3].
    std::vector<bool> nonconvergence;
    bool discretization_flag = false;

    const RatioRow* last_feasible() const;
    std::string to_csv() const;
};

inline constexpr double kCiZ = 1.96;
inline constexpr double kMinExpectedHits = 20.0;

/// Feasible u values (n * first candidate >= 20) share one pass on the grid
/// required by the largest of them.
RatioTable ratio_curve(const SupremumQuery& q, const std::vector<double>& u_values,
                       const std::vector<Candidate>& candidates, std::uint64_t n_samples, std::uint64_t seed,
                       int threads = 0);

struct SamplePlan {
    std::vector<double> u_values;
    std::vector<bool> feasible;
    std::vector<std::size_t> N_rule;
    std::size_t N = 0;
    std::uint64_t n_samples = 0;
    std::uint64_t refine_samples = 0;
};

SamplePlan plan_ratio_curve(const SupremumQuery& q, const std::vector<double>& u_values, const Candidate& primary,
                            std::uint64_t n_samples);

/// fBm components, p = 2, c = 2, trend -w t on [0, 1].
SupremumQuery ruin_query(double alpha, const WeightVector& weights, double w_premium,
                         std::optional<std::size_t> N = std::nullopt);

MCEstimate ruin_mc(double alpha, const WeightVector& weights, double w_premium, double u, std::uint64_t n_samples,
                   std::uint64_t seed, std::optional<std::size_t> N = std::nullopt, int threads = 0);

/// Grid step of the local Pickands field matched to the sampling grid:
/// (a / d^2)^{1/alpha} u^{2/(alpha c)} Delta.
double matched_delta(double a, double d, double alpha, double c, double u, double Delta);

struct ArbitrationReport {
    double alpha = 1.0;
    double w = 0.0;
    RatioTable table;
    std::vector<RuinAsymptotic> asymptotics;
    /// Candidates whose last feasible CI contains 1.
    std::vector<std::string> containing_one;
    /// "stated", "assembled", "both" or "neither".
    std::string verdict;
};

/// Ratio table of ruin MC against both candidate asymptotics. For alpha < 1
/// the Pickands constant is estimated at the grid step matched to the sampling
/// grid at each u, so both candidates describe the same discrete supremum.
ArbitrationReport ruin_arbitration(double alpha, const WeightVector& weights, double w_premium,
                                   const std::vector<double>& u_values, std::uint64_t n_samples, std::uint64_t seed,
                                   std::optional<std::size_t> N, const ConstantResolver& resolver, int threads = 0);

}  // namespace lpsup
