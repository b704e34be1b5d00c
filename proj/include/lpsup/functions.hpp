#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace lpsup {

/// Piecewise-linear interpolant through (x_k, y_k) with strictly increasing x.
class TabulatedFunction {
public:
    TabulatedFunction(std::vector<double> x, std::vector<double> y);
    static TabulatedFunction constant(double value, double x0, double x1);

    double operator()(double t) const;
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& values() const { return y_; }

    /// Integral of h(t) over [x_min, x_max], Gauss-Kronrod on each segment.
    double integrate(const std::function<double(double)>& h) const;

private:
    std::vector<double> x_;
    std::vector<double> y_;
};

/// Integral of h over [b_0, b_last], Gauss-Kronrod between sorted breakpoints.
double integrate_segments(const std::function<double(double)>& h, std::vector<double> breakpoints);

struct ZeroTrend {};

/// g(t) = -w |t - t0|^gamma.
struct PowerTrend {
    double w = 0.0;
    double gamma = 1.0;
    double t0 = 0.0;
};

using Trend = std::variant<ZeroTrend, PowerTrend, TabulatedFunction>;

double evaluate_trend(const Trend& g, double t);
bool trend_is_zero(const Trend& g);
std::string trend_name(const Trend& g);

}  // namespace lpsup
