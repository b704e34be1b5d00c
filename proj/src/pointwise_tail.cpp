#include "lpsup/pointwise_tail.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "lpsup/rng.hpp"

namespace lpsup {

namespace {
constexpr double kSqrt2 = boost::math::constants::root_two<double>();
constexpr double kSqrt2Pi = boost::math::constants::root_two_pi<double>();
}  // namespace

double normal_survival(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double normal_survival_mills(double z) {
    if (!(z > 0.0)) throw std::invalid_argument("Mills-ratio tail needs z > 0");
    return std::exp(-0.5 * z * z) / (kSqrt2Pi * z);
}

double PointwiseTail::evaluate(double u) const {
    return coefficient * std::pow(u, u_power) * normal_survival(std::pow(u, 1.0 / c) / scale);
}

double PointwiseTail::evaluate_limit(double u) const {
    return coefficient * std::pow(u, u_power) * normal_survival_mills(std::pow(u, 1.0 / c) / scale);
}

double PointwiseTail::monotone_from() const {
    if (u_power <= 0.0) return 0.0;
    return std::pow(u_power * c * scale * scale, c / 2.0);
}

PointwiseTail pointwise_tail_asymptotic(const NormOrder& order, double c, const WeightVector& weights) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("c must be positive");
    const DualGeometry geo = critical_scale(order, weights);
    const double n = static_cast<double>(weights.size());
    const std::size_t m = weights.leading_ones();
    const double p = order.p();

    PointwiseTail t;
    t.c = c;
    t.scale = geo.critical_scale;
    if (p < 2.0) {
        t.coefficient = std::pow(2.0, n) * std::pow(2.0 - p, (1.0 - n) / 2.0);
        t.u_power = 0.0;
    } else if (p == 2.0) {
        double prod = 1.0;
        for (std::size_t i = m; i < weights.size(); ++i) prod /= std::sqrt(1.0 - weights[i] * weights[i]);
        const double md = static_cast<double>(m);
        t.coefficient = kSqrt2Pi * std::pow(2.0, (2.0 - md) / 2.0) * prod / std::tgamma(md / 2.0);
        t.u_power = (md - 1.0) / c;
    } else {
        t.coefficient = 2.0 * static_cast<double>(m);
        t.u_power = 0.0;
    }
    return t;
}

double pointwise_tail_exact_chi(int m_dof, double u) {
    if (m_dof < 1) throw std::invalid_argument("degrees of freedom must be >= 1");
    if (u < 0.0) throw std::invalid_argument("u must be >= 0");
    if (u == 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * m_dof, 0.5 * u);
}

PointwiseMC pointwise_tail_mc(const NormOrder& order, double c, const WeightVector& weights, double u,
                              std::uint64_t n_samples, std::uint64_t seed, int threads) {
    if (n_samples < 10000) throw std::invalid_argument("pointwise MC needs at least 1e4 samples");
    if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
    // ||y||_p^c > u  <=>  ||y||_p > u^{1/c}
    const double level = u <= 0.0 ? -1.0 : std::pow(u, 1.0 / c);
    const std::size_t n = weights.size();
    const std::uint64_t n_chunks = (n_samples + kPointwiseChunk - 1) / kPointwiseChunk;
    std::vector<std::uint64_t> hits(n_chunks, 0);

    for_each_chunk(n_chunks, resolve_threads(threads), [&](std::size_t chunk) {
        NormalSource normal(seed, chunk);
        const std::uint64_t begin = chunk * kPointwiseChunk;
        const std::uint64_t count = std::min<std::uint64_t>(kPointwiseChunk, n_samples - begin);
        std::vector<double> y(n);
        std::uint64_t h = 0;
        for (std::uint64_t s = 0; s < count; ++s) {
            for (std::size_t i = 0; i < n; ++i) y[i] = weights[i] * normal();
            if (lp_norm(y, order.p()) > level) ++h;
        }
        hits[chunk] = h;
    });

    PointwiseMC r;
    r.n = n_samples;
    for (auto h : hits) r.hits += h;
    r.p_hat = static_cast<double>(r.hits) / static_cast<double>(n_samples);
    r.std_error = std::sqrt(r.p_hat * (1.0 - r.p_hat) / static_cast<double>(n_samples));
    r.low_count = r.hits < 10;
    return r;
}

}  // namespace lpsup
