#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lpsup/circulant.hpp"
#include "lpsup/rng.hpp"

namespace lpsup {

/// Covariance (t^alpha + s^alpha - |t-s|^alpha) / 2; alpha is twice the Hurst index.
struct FractionalBM {
    double alpha = 1.0;
};

/// Unit-variance stationary process with correlation exp(-rate |t-s|).
struct OrnsteinUhlenbeck {
    double rate = 1.0;
};

/// Unit-variance stationary process with correlation exp(-a |t-s|^alpha).
struct StationaryPowerExp {
    double alpha = 1.0;
    double a = 1.0;
};

using ProcessModel = std::variant<FractionalBM, OrnsteinUhlenbeck, StationaryPowerExp>;

void validate_model(const ProcessModel& model);
/// Local Hoelder index: alpha for fBm and power-exp, 1 for OU.
double model_alpha(const ProcessModel& model);
/// Analytic covariance Cov(X(s), X(t)).
double model_covariance(const ProcessModel& model, double s, double t);
std::string model_name(const ProcessModel& model);
/// True when the model's sampler runs on an FFT and needs a power-of-two N.
bool model_uses_fft(const ProcessModel& model);

/// Draws successive paths X(t_0), ..., X(t_N) on t_k = k T / N from one
/// normal stream. FFT samplers produce two paths per transform; the second is
/// kept for the next call.
class ScalarPathSampler {
public:
    ScalarPathSampler(const ProcessModel& model, double T, std::size_t N);
    ScalarPathSampler(const ScalarPathSampler&) = delete;
    ScalarPathSampler& operator=(const ScalarPathSampler&) = delete;

    std::size_t points() const noexcept { return N_ + 1; }
    void next(NormalSource& normal, std::span<double> out);
    /// Drops a cached second FFT path so the next call draws afresh.
    void reset() noexcept { have_spare_ = false; }

private:
    enum class Kind { Brownian, Line, FbmCirculant, OU, PowerExpCirculant };

    Kind kind_;
    double T_;
    std::size_t N_;
    double step_sd_ = 0.0;
    double ou_rho_ = 0.0;
    double ou_innov_ = 0.0;
    std::unique_ptr<CirculantSampler> circ_;
    std::vector<double> spare_;
    std::vector<double> scratch_;
    bool have_spare_ = false;
};

struct PathEnsemble {
    std::vector<double> times;
    std::size_t n_paths = 0;
    std::size_t n_components = 0;
    /// values[(path * n_components + comp) * times.size() + k]
    std::vector<double> values;
    ProcessModel model;
    std::uint64_t seed = 0;
    std::size_t chunk_paths = 0;

    std::size_t points() const noexcept { return times.size(); }
    double at(std::size_t path, std::size_t comp, std::size_t k) const {
        return values[(path * n_components + comp) * times.size() + k];
    }
    std::span<const double> path(std::size_t path, std::size_t comp) const {
        return {values.data() + (path * n_components + comp) * times.size(), times.size()};
    }
};

inline constexpr std::size_t kEnsembleChunk = 256;

/// RNG stream of (component, chunk) in ensemble generation.
inline std::uint64_t ensemble_stream(std::size_t comp, std::size_t chunk) {
    return (static_cast<std::uint64_t>(comp) << 32) | static_cast<std::uint64_t>(chunk);
}

PathEnsemble vector_ensemble(const ProcessModel& model, std::size_t n_components, double T, std::size_t N,
                             std::size_t n_paths, std::uint64_t seed, int threads = 0);

PathEnsemble sample_fbm(double alpha, double T, std::size_t N, std::size_t n_paths, std::uint64_t seed,
                        int threads = 0);
PathEnsemble sample_ou(double rate, double T, std::size_t N, std::size_t n_paths, std::uint64_t seed,
                       int threads = 0);
PathEnsemble sample_stationary_powerexp(double alpha, double a, double T, std::size_t N, std::size_t n_paths,
                                        std::uint64_t seed, int threads = 0);

struct CovarianceEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Sample covariance across paths of component `comp` at grid indices i, j.
CovarianceEstimate empirical_covariance(const PathEnsemble& ens, std::size_t i, std::size_t j, std::size_t comp = 0);

/// Sample covariance across paths between (comp_a, i) and (comp_b, j).
CovarianceEstimate empirical_cross_covariance(const PathEnsemble& ens, std::size_t comp_a, std::size_t i,
                                              std::size_t comp_b, std::size_t j);

/// Writes `<prefix>.bin` (little-endian f8, row-major [path][comp][k]) and
/// `<prefix>.json` (shape, grid, model, seed, stream layout).
void write_ensemble(const PathEnsemble& ens, const std::string& prefix);
PathEnsemble read_ensemble(const std::string& prefix);

}  // namespace lpsup
