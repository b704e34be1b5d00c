#include "lpsup/functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace lpsup {

TabulatedFunction::TabulatedFunction(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size()) throw std::invalid_argument("table needs equally many nodes and values");
    if (x_.size() < 2) throw std::invalid_argument("table needs at least two nodes");
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) throw std::invalid_argument("table entries must be finite");
        if (i > 0 && !(x_[i] > x_[i - 1])) throw std::invalid_argument("table nodes must be strictly increasing");
    }
}

TabulatedFunction TabulatedFunction::constant(double value, double x0, double x1) {
    return TabulatedFunction({x0, x1}, {value, value});
}

double TabulatedFunction::operator()(double t) const {
    if (t <= x_.front()) return y_.front();
    if (t >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - x_.begin());
    const double w = (t - x_[k - 1]) / (x_[k] - x_[k - 1]);
    return (1.0 - w) * y_[k - 1] + w * y_[k];
}

double TabulatedFunction::integrate(const std::function<double(double)>& h) const { return integrate_segments(h, x_); }

double integrate_segments(const std::function<double(double)>& h, std::vector<double> breakpoints) {
    using boost::math::quadrature::gauss_kronrod;
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
    double total = 0.0;
    for (std::size_t k = 1; k < breakpoints.size(); ++k) {
        total += gauss_kronrod<double, 31>::integrate(h, breakpoints[k - 1], breakpoints[k], 10, 1e-13);
    }
    return total;
}

double evaluate_trend(const Trend& g, double t) {
    if (std::holds_alternative<ZeroTrend>(g)) return 0.0;
    if (const auto* p = std::get_if<PowerTrend>(&g)) return -p->w * std::pow(std::abs(t - p->t0), p->gamma);
    return std::get<TabulatedFunction>(g)(t);
}

bool trend_is_zero(const Trend& g) {
    if (std::holds_alternative<ZeroTrend>(g)) return true;
    if (const auto* p = std::get_if<PowerTrend>(&g)) return p->w == 0.0;
    const auto& v = std::get<TabulatedFunction>(g).values();
    return std::all_of(v.begin(), v.end(), [](double y) { return y == 0.0; });
}

std::string trend_name(const Trend& g) {
    std::ostringstream os;
    os.precision(17);
    if (std::holds_alternative<ZeroTrend>(g)) {
        os << "zero";
    } else if (const auto* p = std::get_if<PowerTrend>(&g)) {
        os << "power(w=" << p->w << ",gamma=" << p->gamma << ",t0=" << p->t0 << ")";
    } else {
        os << "tabulated(" << std::get<TabulatedFunction>(g).nodes().size() << " nodes)";
    }
    return os.str();
}

}  // namespace lpsup
