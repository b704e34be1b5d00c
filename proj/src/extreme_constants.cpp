#include "lpsup/extreme_constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <boost/math/constants/constants.hpp>

#include "lpsup/gaussian_paths.hpp"
#include "lpsup/rng.hpp"

namespace lpsup {

double DriftFunctional::operator()(double t) const {
    const double x = std::abs(t);
    double v = 0.0;
    if (b_eff != 0.0) v += b_eff * std::pow(x, beta);
    if (w_eff != 0.0) v += w_eff * std::pow(x, gamma);
    return v;
}

double DriftFunctional::Q() const { return two_sided ? -std::numeric_limits<double>::infinity() : 0.0; }

void DriftFunctional::validate() const {
    if (!(b_eff >= 0.0) || !(w_eff >= 0.0) || !std::isfinite(b_eff) || !std::isfinite(w_eff)) {
        throw std::invalid_argument("drift coefficients must be finite and >= 0");
    }
    if (!(beta > 0.0) || !(gamma > 0.0)) throw std::invalid_argument("drift exponents must be positive");
}

std::string to_string(Estimator e) { return e == Estimator::Direct ? "direct" : "shift-normalized"; }

namespace {

constexpr std::size_t kConstantChunk = 256;

struct WindowProblem {
    double alpha;
    double a;
    DriftFunctional f;
    long j_lo;
    long j_hi;
    double delta;
};

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("alpha must lie in (0, 2]");
}

// Each sample s owns RNG stream s, so windows that share a left end see the
// same path prefix (common random numbers).
ConstantEstimate estimate_window(const WindowProblem& w, std::uint64_t n_samples, std::uint64_t seed,
                                 Estimator estimator, int threads) {
    if (n_samples < 2) throw std::invalid_argument("need at least 2 samples");
    const std::size_t K = static_cast<std::size_t>(w.j_hi - w.j_lo + 1);
    const double sig = std::sqrt(2.0 * w.a);

    // penalty_j = a|t_j|^alpha + f(t_j) at the unshifted grid points
    std::vector<double> drift(K), cum_weight;
    for (std::size_t i = 0; i < K; ++i) drift[i] = w.f((w.j_lo + static_cast<long>(i)) * w.delta);
    double Z = 0.0;
    if (estimator == Estimator::ShiftNormalized) {
        cum_weight.resize(K);
        for (std::size_t i = 0; i < K; ++i) {
            Z += std::exp(-drift[i]);
            cum_weight[i] = Z;
        }
    }
    std::vector<double> self_penalty(2 * K - 1);
    // self_penalty[(j - i) + K - 1] = a |(j - i) delta|^alpha
    for (std::size_t k = 0; k < 2 * K - 1; ++k) {
        const double lag = (static_cast<double>(k) - static_cast<double>(K - 1)) * w.delta;
        self_penalty[k] = w.a * std::pow(std::abs(lag), w.alpha);
    }

    const std::size_t N_sim = K > 1 ? (model_uses_fft(FractionalBM{w.alpha}) ? next_pow2(K - 1) : K - 1) : 1;
    const std::size_t n_chunks = (n_samples + kConstantChunk - 1) / kConstantChunk;
    std::vector<double> sums(n_chunks, 0.0), sums2(n_chunks, 0.0);

    for_each_chunk(n_chunks, resolve_threads(threads), [&](std::size_t chunk) {
        ScalarPathSampler sampler(FractionalBM{w.alpha}, static_cast<double>(N_sim) * w.delta, N_sim);
        std::vector<double> path(N_sim + 1);
        const std::uint64_t begin = chunk * kConstantChunk;
        const std::uint64_t end = std::min<std::uint64_t>(n_samples, begin + kConstantChunk);
        double s1 = 0.0, s2 = 0.0;
        for (std::uint64_t s = begin; s < end; ++s) {
            NormalSource normal(seed, s);
            double value;
            if (K == 1) {
                value = estimator == Estimator::ShiftNormalized ? Z : std::exp(-drift[0]);
            } else if (estimator == Estimator::Direct) {
                sampler.reset();
                sampler.next(normal, path);
                const std::size_t anchor = static_cast<std::size_t>(-w.j_lo);
                const double b0 = path[anchor];
                double best = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < K; ++i) {
                    const double y = sig * (path[i] - b0) - self_penalty[i + K - 1 - anchor] - drift[i];
                    best = std::max(best, y);
                }
                value = std::exp(best);
            } else {
                const double target = normal.engine().uniform() * Z;
                const std::size_t tau = std::min<std::size_t>(
                    K - 1, static_cast<std::size_t>(std::upper_bound(cum_weight.begin(), cum_weight.end(), target) -
                                                    cum_weight.begin()));
                sampler.reset();
                sampler.next(normal, path);
                // Shifted field: W'(t_j - t_tau) with W'(0) = 0 at index tau.
                const double b0 = path[tau];
                double best = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < K; ++i) {
                    const double y = sig * (path[i] - b0) - self_penalty[i + K - 1 - tau] - drift[i];
                    path[i] = y;
                    best = std::max(best, y);
                }
                double denom = 0.0;
                for (std::size_t i = 0; i < K; ++i) denom += std::exp(path[i] - best);
                value = Z / denom;
            }
            s1 += value;
            s2 += value * value;
        }
        sums[chunk] = s1;
        sums2[chunk] = s2;
    });

    double s1 = 0.0, s2 = 0.0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        s1 += sums[c];
        s2 += sums2[c];
    }
    const double n = static_cast<double>(n_samples);
    ConstantEstimate est;
    est.value = s1 / n;
    const double var = std::max(0.0, (s2 - n * est.value * est.value) / (n - 1.0));
    est.std_error = std::sqrt(var / n);
    est.delta = w.delta;
    est.n_samples = n_samples;
    est.seed = seed;
    est.estimator = estimator;
    est.S1 = static_cast<double>(-w.j_lo) * w.delta;
    est.S2 = static_cast<double>(w.j_hi) * w.delta;
    return est;
}

}  // namespace

ConstantEstimate pickands_window(double alpha, double S1, double S2, double delta, std::uint64_t n_samples,
                                 std::uint64_t seed, Estimator estimator, int threads) {
    check_alpha(alpha);
    if (!(S1 >= 0.0) || !(S2 >= 0.0) || !(std::max(S1, S2) > 0.0)) {
        throw std::invalid_argument("window needs S1, S2 >= 0 and max(S1, S2) > 0");
    }
    if (!(delta > 0.0 && delta <= 0.05)) throw std::invalid_argument("delta must lie in (0, 0.05]");
    WindowProblem w{alpha, 1.0, DriftFunctional{}, -std::lround(S1 / delta), std::lround(S2 / delta), delta};
    return estimate_window(w, n_samples, seed, estimator, threads);
}

ConstantEstimate pickands_constant(double alpha, double S, double delta, std::uint64_t n_samples, std::uint64_t seed,
                                   Estimator estimator, int threads) {
    if (!(S >= 20.0)) throw std::invalid_argument("Pickands constant needs S >= 20");
    ConstantEstimate est = pickands_window(alpha, 0.0, S, delta, n_samples, seed, estimator, threads);
    const double len = est.S2;
    est.value /= len;
    est.std_error /= len;
    return est;
}

ConstantEstimate pickands_slope(double alpha, double S, double delta, std::uint64_t n_samples, std::uint64_t seed,
                                Estimator estimator, int threads) {
    if (!(S >= 20.0)) throw std::invalid_argument("Pickands constant needs S >= 20");
    std::uint64_t state = seed;
    const std::uint64_t seed2 = splitmix64(state);
    const ConstantEstimate lo = pickands_window(alpha, 0.0, S, delta, n_samples, seed, estimator, threads);
    const ConstantEstimate hi = pickands_window(alpha, 0.0, 2.0 * S, delta, n_samples, seed2, estimator, threads);
    const double len = hi.S2 - lo.S2;
    ConstantEstimate est = lo;
    est.value = (hi.value - lo.value) / len;
    est.std_error = std::hypot(hi.std_error, lo.std_error) / len;
    est.S1 = lo.S2;
    est.S2 = hi.S2;
    return est;
}

double minimal_truncation(double alpha, double a, const DriftFunctional& f) {
    auto g = [&](double S) { return a * std::pow(S, alpha) + f(S); };
    double hi = 1.0;
    while (g(hi) < kTruncationExponent) {
        hi *= 2.0;
        if (hi > 1e12) throw std::invalid_argument("no finite truncation window reaches the exponent bound");
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) >= kTruncationExponent ? hi : lo) = mid;
    }
    return hi;
}

ConstantEstimate piterbarg_constant(double alpha, double a, const DriftFunctional& f, double S, double delta,
                                    std::uint64_t n_samples, std::uint64_t seed, Estimator estimator, int threads) {
    check_alpha(alpha);
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("a must be positive");
    f.validate();
    if (!(delta > 0.0 && delta <= 0.05)) throw std::invalid_argument("delta must lie in (0, 0.05]");
    if (!(a * std::pow(S, alpha) + f(S) >= kTruncationExponent)) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "window S=" << S << " violates the truncation rule a*S^alpha + f(S) >= " << kTruncationExponent
            << "; minimal S is " << minimal_truncation(alpha, a, f);
        throw std::invalid_argument(msg.str());
    }
    const long K = std::lround(S / delta);
    WindowProblem w{alpha, a, f, f.two_sided ? -K : 0, K, delta};
    return estimate_window(w, n_samples, seed, estimator, threads);
}

double piterbarg_closed_form(double alpha, double a, double b) {
    if (!(a >= 0.0) || !(b > 0.0)) throw std::invalid_argument("closed form needs a >= 0 and b > 0");
    if (alpha == 1.0) return 1.0 + a / b;
    if (alpha == 2.0) return 0.5 * (1.0 + std::sqrt(1.0 + a / b));
    throw std::invalid_argument("closed form exists only for alpha in {1, 2}");
}

std::optional<double> piterbarg_closed_form_for(double alpha, double a, const DriftFunctional& f) {
    if (f.two_sided || (alpha != 1.0 && alpha != 2.0)) return std::nullopt;
    double b = 0.0;
    if (f.b_eff > 0.0) {
        if (f.beta != alpha) return std::nullopt;
        b += f.b_eff;
    }
    if (f.w_eff > 0.0) {
        if (f.gamma != alpha) return std::nullopt;
        b += f.w_eff;
    }
    if (b <= 0.0) return std::nullopt;
    return piterbarg_closed_form(alpha, a, b);
}

std::optional<double> pickands_closed_form(double alpha) {
    if (alpha == 1.0) return 1.0;
    if (alpha == 2.0) return 1.0 / boost::math::constants::root_pi<double>();
    return std::nullopt;
}

}  // namespace lpsup
