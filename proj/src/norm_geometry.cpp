#include "lpsup/norm_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lpsup {

double dual_exponent(double p) {
    if (!(p >= 1.0)) {  // also rejects NaN
        throw std::invalid_argument("p must lie in [1, inf]");
    }
    if (p == 1.0) return kInf;
    if (p == kInf) return 1.0;
    return p / (p - 1.0);
}

NormOrder::NormOrder(double p) : p_(p), q_(dual_exponent(p)) {}

WeightVector::WeightVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("weights must be non-empty");
    for (double v : values_) {
        if (!std::isfinite(v) || v <= 0.0) throw std::invalid_argument("weights must be finite and positive");
    }
    if (values_.front() != 1.0) throw std::invalid_argument("the leading weight must equal 1");
    for (std::size_t i = 1; i < values_.size(); ++i) {
        if (values_[i] > values_[i - 1]) throw std::invalid_argument("weights must be sorted non-increasing");
    }
    m_ = static_cast<std::size_t>(std::count(values_.begin(), values_.end(), 1.0));
}

WeightVector WeightVector::ones(std::size_t n) { return WeightVector(std::vector<double>(n, 1.0)); }

std::string to_string(MaximizerKind kind) {
    switch (kind) {
        case MaximizerKind::DiscreteSignPoints: return "DiscreteSignPoints";
        case MaximizerKind::Sphere: return "Sphere";
        case MaximizerKind::AxisPoints: return "AxisPoints";
    }
    return "unknown";
}

namespace {

std::vector<std::vector<double>> sign_combinations(const std::vector<double>& base) {
    const std::size_t n = base.size();
    std::vector<std::vector<double>> out;
    if (n > kMaxEnumeratedSignDim) {
        out.push_back(base);
        std::vector<double> neg(base);
        for (double& v : neg) v = -v;
        out.push_back(std::move(neg));
        return out;
    }
    const std::size_t count = std::size_t{1} << n;
    out.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
        std::vector<double> v(base);
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t{1} << i)) v[i] = -v[i];
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace

DualGeometry critical_scale(const NormOrder& order, const WeightVector& weights) {
    const std::size_t n = weights.size();
    const std::size_t m = weights.leading_ones();
    const double p = order.p();
    DualGeometry g;

    if (p >= 2.0) {
        g.critical_scale = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<double> e(n, 0.0);
            e[i] = 1.0;
            g.representatives.push_back(e);
            if (p > 2.0) {
                e[i] = -1.0;
                g.representatives.push_back(std::move(e));
            }
        }
        if (p == 2.0) {
            g.kind = MaximizerKind::Sphere;
        } else {
            g.kind = MaximizerKind::AxisPoints;
            g.point_count = 2 * m;
        }
        return g;
    }

    // p in [1, 2): interior sign points.
    const double r = 2.0 * p / (2.0 - p);
    double acc = 0.0;
    for (double di : weights.values()) acc += std::pow(di, r);
    const double d = std::pow(acc, 1.0 / r);
    g.critical_scale = d;
    g.kind = MaximizerKind::DiscreteSignPoints;
    g.point_count = n < 64 ? std::optional<std::size_t>(std::size_t{1} << n) : std::nullopt;

    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        // exponent 2/(q-2) rewritten as 2(p-1)/(2-p); it is 0 at p = 1.
        z[i] = std::pow(weights[i] / d, 2.0 * (p - 1.0) / (2.0 - p));
    }
    g.representatives = sign_combinations(z);
    return g;
}

double lp_norm(std::span<const double> v, double p) {
    if (p == kInf) {
        double mx = 0.0;
        for (double x : v) mx = std::max(mx, std::abs(x));
        return mx;
    }
    if (p == 1.0) {
        double s = 0.0;
        for (double x : v) s += std::abs(x);
        return s;
    }
    if (p == 2.0) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    }
    // Scale by the max modulus so large or tiny entries do not over/underflow.
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, std::abs(x));
    if (mx == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x) / mx, p);
    return mx * std::pow(s, 1.0 / p);
}

double weighted_lp_norm(std::span<const double> x, const NormOrder& order, const WeightVector& weights) {
    if (x.size() != weights.size()) throw std::invalid_argument("vector and weight dimensions differ");
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) throw std::invalid_argument("vector entries must be finite");
        y[i] = weights[i] * x[i];
    }
    return lp_norm(y, order.p());
}

std::vector<double> dual_witness(std::span<const double> x, const NormOrder& order, const WeightVector& weights) {
    const double norm = weighted_lp_norm(x, order, weights);
    if (norm == 0.0) throw std::invalid_argument("dual witness of the zero vector is undefined");
    const std::size_t n = x.size();
    std::vector<double> v(n, 0.0);
    const double p = order.p();

    if (order.is_infinite()) {
        std::size_t best = 0;
        double best_abs = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = std::abs(weights[i] * x[i]);
            if (a > best_abs) {
                best_abs = a;
                best = i;
            }
        }
        v[best] = x[best] < 0.0 ? -1.0 : 1.0;
        return v;
    }
    if (p == 1.0) {
        for (std::size_t i = 0; i < n; ++i) v[i] = x[i] < 0.0 ? -1.0 : 1.0;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double y = weights[i] * x[i] / norm;
        v[i] = std::copysign(std::pow(std::abs(y), p - 1.0), y);
    }
    return v;
}

}  // namespace lpsup
