#include "lpsup/tail_asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace lpsup {

namespace {

constexpr double kQuadratureCut = 46.0;

bool nearly_equal(double x, double y) { return std::abs(x - y) <= kTieTolerance * std::max(std::abs(x), std::abs(y)); }

RegimeCase compare(double alpha_star, double beta_star) {
    if (nearly_equal(alpha_star, beta_star)) return RegimeCase::Piterbarg;
    return alpha_star < beta_star ? RegimeCase::Pickands : RegimeCase::Pointwise;
}

void check_c(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("c must be positive");
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("alpha must lie in (0, 2]");
}

std::string number(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

ResolvedConstant integral_constant(const DriftFunctional& f) {
    ResolvedConstant r;
    r.name = "integral_exp_neg_f";
    r.value = integral_exp_neg_f(f);
    r.provenance = "quadrature";
    return r;
}

// Shared three-way multiplier of the nonstationary and c < 2 trend results.
void assign_three_case(TailApproximation& t, const RegimeClassification& cls, const DriftFunctional& f, double alpha,
                       double a, double d, const ConstantResolver& resolver) {
    t.classification = cls;
    t.drift = f;
    t.regime = to_string(cls.regime);
    switch (cls.regime) {
        case RegimeCase::Pickands: {
            const ResolvedConstant H = resolve_pickands(alpha, resolver);
            const ResolvedConstant I = integral_constant(f);
            t.multiplier_kind = MultiplierKind::PickandsIntegral;
            t.coefficient = std::pow(a, 1.0 / alpha) * std::pow(d, -2.0 / alpha) * H.value * I.value;
            t.u_power = 2.0 / cls.alpha_star - 2.0 / cls.beta_star;
            t.constants = {H, I};
            break;
        }
        case RegimeCase::Piterbarg: {
            const ResolvedConstant P = resolve_piterbarg(alpha, a / (d * d), f, resolver);
            t.multiplier_kind = MultiplierKind::PiterbargConstant;
            t.coefficient = P.value;
            t.u_power = 0.0;
            t.constants = {P};
            break;
        }
        case RegimeCase::Pointwise:
            t.multiplier_kind = MultiplierKind::Unity;
            t.coefficient = 1.0;
            t.u_power = 0.0;
            break;
    }
}

}  // namespace

void NonStationaryLocalModel::validate() const {
    if (!(b > 0.0) || !(beta > 0.0)) throw std::invalid_argument("variance expansion needs b > 0 and beta > 0");
    if (!(a > 0.0)) throw std::invalid_argument("correlation expansion needs a > 0");
    check_alpha(alpha);
    if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
    if (!(t0 >= 0.0 && t0 <= T)) throw std::invalid_argument("t0 must lie in [0, T]");
}

std::string to_string(RegimeCase r) {
    switch (r) {
        case RegimeCase::Pickands: return "pickands";
        case RegimeCase::Piterbarg: return "piterbarg";
        case RegimeCase::Pointwise: return "pointwise";
    }
    return "unknown";
}

std::string to_string(MultiplierKind k) {
    switch (k) {
        case MultiplierKind::PickandsIntegral: return "PickandsIntegral";
        case MultiplierKind::PiterbargConstant: return "PiterbargConstant";
        case MultiplierKind::Unity: return "Unity";
        case MultiplierKind::LocallyStationaryIntegral: return "LocallyStationaryIntegral";
    }
    return "unknown";
}

RegimeClassification classify_regime(double alpha, double c, double beta, double gamma, bool has_trend) {
    check_alpha(alpha);
    check_c(c);
    if (!(beta > 0.0) || !(gamma > 0.0)) throw std::invalid_argument("beta and gamma must be positive");
    RegimeClassification r;
    r.alpha_star = alpha * c;
    const double bc = beta * c;
    if (c < 2.0 && has_trend) {
        const double gc = 2.0 * gamma * c / (2.0 - c);
        if (nearly_equal(bc, gc)) {
            r.beta_star = bc;
            r.b_term = r.w_term = true;
        } else if (bc < gc) {
            r.beta_star = bc;
            r.b_term = true;
            r.w_term = false;
        } else {
            r.beta_star = gc;
            r.b_term = false;
            r.w_term = true;
        }
    } else {
        r.beta_star = bc;
        r.b_term = true;
        r.w_term = false;
    }
    r.regime = compare(r.alpha_star, r.beta_star);
    return r;
}

DriftFunctional drift_functional(const NonStationaryLocalModel& model, const TrendLocalModel& trend, double c,
                                 double d) {
    model.validate();
    if (!(d > 0.0)) throw std::invalid_argument("critical scale must be positive");
    const RegimeClassification cls = classify_regime(model.alpha, c, model.beta, trend.gamma, trend.w != 0.0);
    DriftFunctional f;
    f.beta = model.beta;
    f.gamma = trend.gamma;
    if (cls.b_term) f.b_eff = model.b / (d * d);
    if (cls.w_term) {
        if (trend.w < 0.0) {
            throw std::invalid_argument("a negative trend coefficient w would enter f(t) (gamma = " + number(trend.gamma) +
                                        ", c = " + number(c) + "); f must stay positive");
        }
        f.w_eff = trend.w / (c * d * d);
    }
    f.two_sided = model.t0 > 0.0 && model.t0 < model.T;
    return f;
}

double integral_exp_neg_f(const DriftFunctional& f) {
    f.validate();
    if (f.is_zero()) throw std::invalid_argument("integral of exp(-f) diverges when all coefficients are zero");
    double hi = 1.0;
    while (f(hi) < kQuadratureCut) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) >= kQuadratureCut ? hi : lo) = mid;
    }
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double half = integrator.integrate([&](double t) { return std::exp(-f(t)); }, 0.0, hi, 1e-12);
    return f.two_sided ? 2.0 * half : half;
}

ResolvedConstant resolve_pickands(double alpha, const ConstantResolver& resolver) {
    ResolvedConstant r;
    r.name = "H_alpha";
    if (auto exact = pickands_closed_form(alpha); exact && !resolver.force_mc) {
        r.value = *exact;
        r.provenance = "closed-form";
        return r;
    }
    const ConstantEstimate est =
        pickands_slope(alpha, resolver.S, resolver.delta, resolver.n_samples, resolver.seed,
                       Estimator::ShiftNormalized, resolver.threads);
    r.value = est.value;
    r.std_error = est.std_error;
    r.provenance = "monte-carlo";
    r.estimate = est;
    return r;
}

ResolvedConstant resolve_piterbarg(double alpha, double a, const DriftFunctional& f, const ConstantResolver& resolver) {
    ResolvedConstant r;
    r.name = "P_alpha_a^f";
    if (auto exact = piterbarg_closed_form_for(alpha, a, f); exact && !resolver.force_mc) {
        r.value = *exact;
        r.provenance = "closed-form";
        return r;
    }
    const double S = std::max(resolver.S, minimal_truncation(alpha, a, f) * (1.0 + 1e-9));
    const ConstantEstimate est = piterbarg_constant(alpha, a, f, S, resolver.delta, resolver.n_samples, resolver.seed,
                                                    Estimator::ShiftNormalized, resolver.threads);
    r.value = est.value;
    r.std_error = est.std_error;
    r.provenance = "monte-carlo";
    r.estimate = est;
    return r;
}

double TailApproximation::multiplier(double u) const { return coefficient * std::pow(u, u_power); }

double TailApproximation::evaluate(double u) const { return multiplier(u) * pointwise.evaluate(u); }

double TailApproximation::evaluate_limit(double u) const { return multiplier(u) * pointwise.evaluate_limit(u); }

double TailApproximation::relative_uncertainty() const {
    double s = 0.0;
    for (const auto& k : constants) {
        if (k.value > 0.0 && k.std_error > 0.0) s += (k.std_error / k.value) * (k.std_error / k.value);
    }
    return std::sqrt(s);
}

std::pair<double, double> TailApproximation::band(double u, double z) const {
    const double v = evaluate(u);
    const double r = z * relative_uncertainty();
    return {v * std::max(0.0, 1.0 - r), v * (1.0 + r)};
}

TailApproximation nonstationary_supremum_tail(const NormOrder& order, double c, const WeightVector& weights,
                                              const NonStationaryLocalModel& model, const TrendLocalModel& trend,
                                              const ConstantResolver& resolver) {
    check_c(c);
    model.validate();
    if (!(trend.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (trend.t0 != model.t0) throw std::invalid_argument("trend and variance must peak at the same t0");
    if (trend.w < 0.0 && c < 2.0 && trend.gamma < (2.0 - c) * model.beta / 2.0) {
        throw std::invalid_argument("w < 0 with c < 2 requires gamma >= (2 - c) beta / 2");
    }
    const double d = critical_scale(order, weights).critical_scale;
    const RegimeClassification cls = classify_regime(model.alpha, c, model.beta, trend.gamma, trend.w != 0.0);
    const DriftFunctional f = drift_functional(model, trend, c, d);

    TailApproximation t;
    t.formula_id = "thm31";
    t.pointwise = pointwise_tail_asymptotic(order, c, weights);
    assign_three_case(t, cls, f, model.alpha, model.a, d, resolver);
    return t;
}

TailApproximation centered_nonstationary_supremum_tail(const NormOrder& order, double c, const WeightVector& weights,
                                                       const NonStationaryLocalModel& model,
                                                       const ConstantResolver& resolver) {
    check_c(c);
    model.validate();
    const double d = critical_scale(order, weights).critical_scale;
    RegimeClassification cls;
    cls.alpha_star = model.alpha * c;
    cls.beta_star = model.beta * c;
    cls.regime = compare(cls.alpha_star, cls.beta_star);
    DriftFunctional f;
    f.b_eff = model.b / (d * d);
    f.beta = model.beta;
    f.two_sided = model.t0 > 0.0 && model.t0 < model.T;

    TailApproximation t;
    t.formula_id = "thm31.centered";
    t.pointwise = pointwise_tail_asymptotic(order, c, weights);
    assign_three_case(t, cls, f, model.alpha, model.a, d, resolver);
    return t;
}

TailApproximation locally_stationary_supremum_tail(const NormOrder& order, double c, const WeightVector& weights,
                                                   double alpha, const TabulatedFunction& a_fn,
                                                   const ConstantResolver& resolver) {
    check_c(c);
    check_alpha(alpha);
    for (double v : a_fn.values()) {
        if (!(v > 0.0)) throw std::invalid_argument("a(t) must be positive at every node");
    }
    if (a_fn.x_min() != 0.0) throw std::invalid_argument("a(t) must be tabulated on [0, T]");
    const double d = critical_scale(order, weights).critical_scale;
    const double I = a_fn.integrate([&](double t) { return std::pow(a_fn(t), 1.0 / alpha); });
    const ResolvedConstant H = resolve_pickands(alpha, resolver);

    TailApproximation t;
    t.formula_id = "thm32";
    t.regime = "locally-stationary";
    t.pointwise = pointwise_tail_asymptotic(order, c, weights);
    t.multiplier_kind = MultiplierKind::LocallyStationaryIntegral;
    t.coefficient = I * std::pow(d, -2.0 / alpha) * H.value;
    t.u_power = 2.0 / (alpha * c);
    t.constants = {H, ResolvedConstant{"integral_a_pow", I, 0.0, "quadrature", std::nullopt}};
    return t;
}

TailApproximation locally_stationary_trend_tail(const NormOrder& order, double c, const WeightVector& weights,
                                                double alpha, const TabulatedFunction& a_fn, const Trend& g,
                                                const ConstantResolver& resolver) {
    check_c(c);
    check_alpha(alpha);
    if (c > 2.0) {
        TailApproximation t = locally_stationary_supremum_tail(order, c, weights, alpha, a_fn, resolver);
        t.formula_id = "thm33.c>2";
        return t;
    }
    for (double v : a_fn.values()) {
        if (!(v > 0.0)) throw std::invalid_argument("a(t) must be positive at every node");
    }
    if (a_fn.x_min() != 0.0) throw std::invalid_argument("a(t) must be tabulated on [0, T]");
    const double T = a_fn.x_max();
    const double d = critical_scale(order, weights).critical_scale;

    if (c == 2.0) {
        std::vector<double> brk = a_fn.nodes();
        if (const auto* p = std::get_if<PowerTrend>(&g); p && p->t0 > 0.0 && p->t0 < T) brk.push_back(p->t0);
        if (const auto* tab = std::get_if<TabulatedFunction>(&g)) {
            for (double x : tab->nodes()) {
                if (x > 0.0 && x < T) brk.push_back(x);
            }
        }
        const double I = integrate_segments(
            [&](double t) { return std::pow(a_fn(t), 1.0 / alpha) * std::exp(evaluate_trend(g, t) / (2.0 * d * d)); },
            brk);
        const ResolvedConstant H = resolve_pickands(alpha, resolver);
        TailApproximation t;
        t.formula_id = "thm33.c=2";
        t.regime = "locally-stationary";
        t.pointwise = pointwise_tail_asymptotic(order, c, weights);
        t.multiplier_kind = MultiplierKind::LocallyStationaryIntegral;
        t.coefficient = I * std::pow(d, -2.0 / alpha) * H.value;
        t.u_power = 2.0 / (alpha * c);
        t.constants = {H, ResolvedConstant{"integral_a_pow_exp_g", I, 0.0, "quadrature", std::nullopt}};
        return t;
    }

    const auto* p = std::get_if<PowerTrend>(&g);
    if (!p || !(p->w > 0.0)) {
        throw std::invalid_argument("c < 2 needs a trend -w|t - t0|^gamma with w > 0 (a unique maximum)");
    }
    if (!(p->gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (!(p->t0 >= 0.0 && p->t0 <= T)) throw std::invalid_argument("t0 must lie in [0, T]");

    RegimeClassification cls;
    cls.alpha_star = alpha * c;
    cls.beta_star = 2.0 * p->gamma * c / (2.0 - c);
    cls.regime = compare(cls.alpha_star, cls.beta_star);
    cls.b_term = false;
    cls.w_term = true;
    DriftFunctional f;
    f.w_eff = p->w / (c * d * d);
    f.gamma = p->gamma;
    f.two_sided = p->t0 > 0.0 && p->t0 < T;

    TailApproximation t;
    t.formula_id = "thm33.c<2";
    t.pointwise = pointwise_tail_asymptotic(order, c, weights);
    assign_three_case(t, cls, f, alpha, a_fn(p->t0), d, resolver);
    return t;
}

TailApproximation fbm_sqrt_trend_tail(double alpha, const NormOrder& order, const WeightVector& weights,
                                 const ConstantResolver& resolver) {
    const NonStationaryLocalModel model{alpha / 2.0, 1.0, 0.5, alpha, 1.0, 1.0};
    const TrendLocalModel trend{1.0, 0.5, 1.0};
    TailApproximation t = nonstationary_supremum_tail(order, 1.0, weights, model, trend, resolver);
    t.formula_id = "ex31";
    return t;
}

TailApproximation chi_square_trend_tail(const WeightVector& weights, double alpha, const TabulatedFunction& a_fn,
                                 const Trend& g, const ConstantResolver& resolver) {
    TailApproximation t = locally_stationary_trend_tail(NormOrder(2.0), 2.0, weights, alpha, a_fn, g, resolver);
    t.formula_id = "ex32";
    return t;
}

double RuinAsymptotic::stated_value(double u) const {
    return std::pow(u, m / 2.0 - 1.0) * std::exp(-(u + w) / 2.0) * base * branch_coefficient *
           std::pow(u, branch_u_power);
}

double RuinAsymptotic::assembled_value(double u) const { return assembled.evaluate(u + w); }

double RuinAsymptotic::limiting_factor() const { return assembled.coefficient / branch_coefficient; }

RuinAsymptotic ruin_probability_asymptotic(double alpha, const WeightVector& weights, double w_premium,
                                           const ConstantResolver& resolver) {
    check_alpha(alpha);
    if (!(w_premium > 0.0)) throw std::invalid_argument("premium rate w must be positive");
    RuinAsymptotic r;
    r.alpha = alpha;
    r.w = w_premium;
    const std::size_t m = weights.leading_ones();
    r.m = static_cast<double>(m);
    double prod = 1.0;
    for (std::size_t i = m; i < weights.size(); ++i) prod /= std::sqrt(1.0 - weights[i] * weights[i]);
    r.base = std::pow(2.0, 1.0 - r.m / 2.0) * prod / std::tgamma(r.m / 2.0);

    // Variance t^alpha peaks at t0 = 1: sigma ~ 1 - (alpha/2)(1 - t), r ~ 1 - |t - s|^alpha / 2.
    // The premium becomes the trend w(1 - t) at threshold u + w.
    const NonStationaryLocalModel model{alpha / 2.0, 1.0, 0.5, alpha, 1.0, 1.0};
    const TrendLocalModel trend{-w_premium, 1.0, 1.0};
    r.assembled = nonstationary_supremum_tail(NormOrder(2.0), 2.0, weights, model, trend, resolver);
    r.assembled.formula_id = "ruin.assembled";
    r.regime = r.assembled.classification->regime;

    if (alpha < 1.0) {
        const ResolvedConstant& H = r.assembled.constants.at(0);
        r.branch_coefficient = std::pow(2.0, 1.0 - 1.0 / alpha) * H.value;
        r.branch_u_power = 1.0 / alpha - 1.0;
        r.constants = {H};
    } else if (alpha == 1.0) {
        r.branch_coefficient = 2.0;
    } else {
        r.branch_coefficient = 1.0;
    }
    r.disputed = std::abs(r.limiting_factor() - 1.0) > 1e-9;
    return r;
}

double ou_chisq_supremum_tail(int n, double T, double u) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(T > 0.0) || !(u > 0.0)) throw std::invalid_argument("T and u must be positive");
    const double h = 0.5 * n;
    return std::pow(2.0, 2.0 - h) / std::tgamma(h) * T * std::pow(u, h) * std::exp(-u / 2.0);
}

}  // namespace lpsup
