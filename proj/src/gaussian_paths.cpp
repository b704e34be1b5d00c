#include "lpsup/gaussian_paths.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace lpsup {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using EmbeddingKey = std::tuple<int, double, double, double, std::size_t>;

// Embeddings depend only on (model, T, N); every chunk of a run shares one.
std::shared_ptr<const CirculantEmbedding> cached_embedding(const EmbeddingKey& key,
                                                           const std::function<double(std::size_t)>& acov,
                                                           std::size_t length) {
    static std::mutex mu;
    static std::map<EmbeddingKey, std::shared_ptr<const CirculantEmbedding>> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto emb = std::make_shared<const CirculantEmbedding>(acov, length);
    if (cache.size() > 64) cache.clear();
    cache.emplace(key, emb);
    return emb;
}

}  // namespace

void validate_model(const ProcessModel& model) {
    std::visit(overloaded{
                   [](const FractionalBM& m) {
                       if (!(m.alpha > 0.0 && m.alpha <= 2.0)) throw std::invalid_argument("alpha must lie in (0, 2]");
                   },
                   [](const OrnsteinUhlenbeck& m) {
                       if (!(m.rate > 0.0) || !std::isfinite(m.rate)) throw std::invalid_argument("rate must be positive");
                   },
                   [](const StationaryPowerExp& m) {
                       if (!(m.alpha > 0.0 && m.alpha <= 2.0)) throw std::invalid_argument("alpha must lie in (0, 2]");
                       if (!(m.a > 0.0) || !std::isfinite(m.a)) throw std::invalid_argument("a must be positive");
                   },
               },
               model);
}

double model_alpha(const ProcessModel& model) {
    return std::visit(overloaded{
                          [](const FractionalBM& m) { return m.alpha; },
                          [](const OrnsteinUhlenbeck&) { return 1.0; },
                          [](const StationaryPowerExp& m) { return m.alpha; },
                      },
                      model);
}

double model_covariance(const ProcessModel& model, double s, double t) {
    return std::visit(overloaded{
                          [&](const FractionalBM& m) {
                              return 0.5 * (std::pow(std::abs(s), m.alpha) + std::pow(std::abs(t), m.alpha) -
                                            std::pow(std::abs(t - s), m.alpha));
                          },
                          [&](const OrnsteinUhlenbeck& m) { return std::exp(-m.rate * std::abs(t - s)); },
                          [&](const StationaryPowerExp& m) { return std::exp(-m.a * std::pow(std::abs(t - s), m.alpha)); },
                      },
                      model);
}

std::string model_name(const ProcessModel& model) {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const FractionalBM& m) { os << "fbm(alpha=" << m.alpha << ")"; },
                   [&](const OrnsteinUhlenbeck& m) { os << "ou(rate=" << m.rate << ")"; },
                   [&](const StationaryPowerExp& m) { os << "powerexp(alpha=" << m.alpha << ",a=" << m.a << ")"; },
               },
               model);
    return os.str();
}

bool model_uses_fft(const ProcessModel& model) {
    if (const auto* f = std::get_if<FractionalBM>(&model)) return f->alpha != 1.0 && f->alpha != 2.0;
    return std::holds_alternative<StationaryPowerExp>(model);
}

ScalarPathSampler::ScalarPathSampler(const ProcessModel& model, double T, std::size_t N) : T_(T), N_(N) {
    validate_model(model);
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("T must be positive");
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    if (model_uses_fft(model) && !is_pow2(N)) throw std::invalid_argument("N must be a power of two");
    const double dt = T / static_cast<double>(N);

    if (const auto* f = std::get_if<FractionalBM>(&model)) {
        if (f->alpha == 1.0) {
            kind_ = Kind::Brownian;
            step_sd_ = std::sqrt(dt);
        } else if (f->alpha == 2.0) {
            kind_ = Kind::Line;
        } else {
            kind_ = Kind::FbmCirculant;
            const double alpha = f->alpha;
            const double scale = 0.5 * std::pow(dt, alpha);
            auto acov = [alpha, scale](std::size_t k) {
                const double x = static_cast<double>(k);
                return scale * (std::pow(x + 1.0, alpha) - 2.0 * std::pow(x, alpha) + std::pow(std::abs(x - 1.0), alpha));
            };
            circ_ = std::make_unique<CirculantSampler>(cached_embedding({0, alpha, 0.0, T, N}, acov, N));
        }
    } else if (const auto* o = std::get_if<OrnsteinUhlenbeck>(&model)) {
        kind_ = Kind::OU;
        ou_rho_ = std::exp(-o->rate * dt);
        ou_innov_ = std::sqrt(-std::expm1(-2.0 * o->rate * dt));
    } else {
        const auto& pe = std::get<StationaryPowerExp>(model);
        kind_ = Kind::PowerExpCirculant;
        const double alpha = pe.alpha, a = pe.a;
        auto acov = [alpha, a, dt](std::size_t k) {
            return k == 0 ? 1.0 : std::exp(-a * std::pow(static_cast<double>(k) * dt, alpha));
        };
        circ_ = std::make_unique<CirculantSampler>(cached_embedding({1, alpha, a, T, N}, acov, N + 1));
    }
    if (circ_) {
        spare_.assign(N + 1, 0.0);
        scratch_.assign(N + 1, 0.0);
    }
}

void ScalarPathSampler::next(NormalSource& normal, std::span<double> out) {
    if (out.size() != N_ + 1) throw std::invalid_argument("output span must hold N+1 points");
    switch (kind_) {
        case Kind::Brownian: {
            double b = 0.0;
            out[0] = 0.0;
            for (std::size_t k = 1; k <= N_; ++k) {
                b += step_sd_ * normal();
                out[k] = b;
            }
            return;
        }
        case Kind::Line: {
            const double z = normal();
            for (std::size_t k = 0; k <= N_; ++k) out[k] = z * T_ * static_cast<double>(k) / static_cast<double>(N_);
            return;
        }
        case Kind::OU: {
            double v = normal();
            out[0] = v;
            for (std::size_t k = 1; k <= N_; ++k) {
                v = ou_rho_ * v + ou_innov_ * normal();
                out[k] = v;
            }
            return;
        }
        case Kind::FbmCirculant:
        case Kind::PowerExpCirculant:
            break;
    }

    const std::size_t L = circ_->embedding().length();
    std::span<double> fresh(scratch_.data(), L);
    if (have_spare_) {
        std::copy(spare_.begin(), spare_.begin() + static_cast<std::ptrdiff_t>(L), fresh.begin());
        have_spare_ = false;
    } else {
        circ_->sample_pair(normal, fresh, std::span<double>(spare_.data(), L));
        have_spare_ = true;
    }
    if (kind_ == Kind::PowerExpCirculant) {
        std::copy(fresh.begin(), fresh.end(), out.begin());
        return;
    }
    double b = 0.0;
    out[0] = 0.0;
    for (std::size_t k = 0; k < N_; ++k) {
        b += fresh[k];
        out[k + 1] = b;
    }
}

PathEnsemble vector_ensemble(const ProcessModel& model, std::size_t n_components, double T, std::size_t N,
                             std::size_t n_paths, std::uint64_t seed, int threads) {
    validate_model(model);
    if (n_components < 1) throw std::invalid_argument("n_components must be >= 1");
    if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    if (model_uses_fft(model) && (!is_pow2(N) || N < 2)) throw std::invalid_argument("N must be a power of two >= 2");
    if (N < 1) throw std::invalid_argument("N must be >= 1");

    PathEnsemble ens;
    ens.model = model;
    ens.seed = seed;
    ens.n_paths = n_paths;
    ens.n_components = n_components;
    ens.chunk_paths = kEnsembleChunk;
    ens.times.resize(N + 1);
    for (std::size_t k = 0; k <= N; ++k) ens.times[k] = T * static_cast<double>(k) / static_cast<double>(N);
    ens.values.assign(n_paths * n_components * (N + 1), 0.0);

    const std::size_t n_chunks = (n_paths + kEnsembleChunk - 1) / kEnsembleChunk;
    for_each_chunk(n_chunks * n_components, resolve_threads(threads), [&](std::size_t job) {
        const std::size_t comp = job % n_components;
        const std::size_t chunk = job / n_components;
        NormalSource normal(seed, ensemble_stream(comp, chunk));
        ScalarPathSampler sampler(model, T, N);
        const std::size_t end = std::min(n_paths, (chunk + 1) * kEnsembleChunk);
        for (std::size_t p = chunk * kEnsembleChunk; p < end; ++p) {
            sampler.next(normal, std::span<double>(ens.values.data() + (p * n_components + comp) * (N + 1), N + 1));
        }
    });
    return ens;
}

PathEnsemble sample_fbm(double alpha, double T, std::size_t N, std::size_t n_paths, std::uint64_t seed, int threads) {
    return vector_ensemble(FractionalBM{alpha}, 1, T, N, n_paths, seed, threads);
}

PathEnsemble sample_ou(double rate, double T, std::size_t N, std::size_t n_paths, std::uint64_t seed, int threads) {
    return vector_ensemble(OrnsteinUhlenbeck{rate}, 1, T, N, n_paths, seed, threads);
}

PathEnsemble sample_stationary_powerexp(double alpha, double a, double T, std::size_t N, std::size_t n_paths,
                                        std::uint64_t seed, int threads) {
    return vector_ensemble(StationaryPowerExp{alpha, a}, 1, T, N, n_paths, seed, threads);
}

CovarianceEstimate empirical_cross_covariance(const PathEnsemble& ens, std::size_t comp_a, std::size_t i,
                                              std::size_t comp_b, std::size_t j) {
    if (ens.n_paths < 2) throw std::invalid_argument("covariance needs at least 2 paths");
    if (i >= ens.points() || j >= ens.points()) throw std::out_of_range("grid index out of range");
    if (comp_a >= ens.n_components || comp_b >= ens.n_components) throw std::out_of_range("component out of range");
    const double n = static_cast<double>(ens.n_paths);
    double mx = 0.0, my = 0.0;
    for (std::size_t p = 0; p < ens.n_paths; ++p) {
        mx += ens.at(p, comp_a, i);
        my += ens.at(p, comp_b, j);
    }
    mx /= n;
    my /= n;
    double s = 0.0, s2 = 0.0;
    for (std::size_t p = 0; p < ens.n_paths; ++p) {
        const double prod = (ens.at(p, comp_a, i) - mx) * (ens.at(p, comp_b, j) - my);
        s += prod;
        s2 += prod * prod;
    }
    CovarianceEstimate est;
    est.value = s / (n - 1.0);
    const double mean_prod = s / n;
    const double var_prod = std::max(0.0, s2 / n - mean_prod * mean_prod);
    est.std_error = std::sqrt(var_prod / n);
    return est;
}

CovarianceEstimate empirical_covariance(const PathEnsemble& ens, std::size_t i, std::size_t j, std::size_t comp) {
    return empirical_cross_covariance(ens, comp, i, comp, j);
}

}  // namespace lpsup
