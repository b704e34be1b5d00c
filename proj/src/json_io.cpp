#include "lpsup/json_io.hpp"

#include <cmath>
#include <stdexcept>

namespace lpsup {

Json p_to_json(double p) {
    if (p == kInf) return "inf";
    return p;
}

double p_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "infinity") return kInf;
        throw std::invalid_argument("p must be a number or \"inf\"");
    }
    if (!j.is_number()) throw std::invalid_argument("p must be a number or \"inf\"");
    return j.get<double>();
}

Json to_json(const ProcessModel& m) {
    Json j;
    if (const auto* f = std::get_if<FractionalBM>(&m)) {
        j["type"] = "fbm";
        j["alpha"] = f->alpha;
    } else if (const auto* o = std::get_if<OrnsteinUhlenbeck>(&m)) {
        j["type"] = "ou";
        j["rate"] = o->rate;
    } else {
        const auto& s = std::get<StationaryPowerExp>(m);
        j["type"] = "powerexp";
        j["alpha"] = s.alpha;
        j["a"] = s.a;
    }
    return j;
}

ProcessModel model_from_json(const nlohmann::json& j) {
    const auto type = j.at("type").get<std::string>();
    ProcessModel m;
    if (type == "fbm") {
        m = FractionalBM{j.at("alpha").get<double>()};
    } else if (type == "ou") {
        m = OrnsteinUhlenbeck{j.at("rate").get<double>()};
    } else if (type == "powerexp") {
        m = StationaryPowerExp{j.at("alpha").get<double>(), j.at("a").get<double>()};
    } else {
        throw std::invalid_argument("unknown process model \"" + type + "\"");
    }
    validate_model(m);
    return m;
}

Json to_json(const Trend& g) {
    Json j;
    if (std::holds_alternative<ZeroTrend>(g)) {
        j["type"] = "zero";
    } else if (const auto* p = std::get_if<PowerTrend>(&g)) {
        j["type"] = "power";
        j["w"] = p->w;
        j["gamma"] = p->gamma;
        j["t0"] = p->t0;
    } else {
        const auto& t = std::get<TabulatedFunction>(g);
        j["type"] = "table";
        j["t"] = t.nodes();
        j["g"] = t.values();
    }
    return j;
}

Trend trend_from_json(const nlohmann::json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "zero") return ZeroTrend{};
    if (type == "power") {
        PowerTrend p{j.at("w").get<double>(), j.at("gamma").get<double>(), j.value("t0", 0.0)};
        if (!(p.gamma > 0.0)) throw std::invalid_argument("trend gamma must be positive");
        return p;
    }
    if (type == "table") {
        return TabulatedFunction(j.at("t").get<std::vector<double>>(), j.at("g").get<std::vector<double>>());
    }
    throw std::invalid_argument("unknown trend type \"" + type + "\"");
}

Json to_json(const DualGeometry& g, const WeightVector& w) {
    Json j;
    j["critical_scale"] = g.critical_scale;
    j["maximizer_kind"] = to_string(g.kind);
    if (g.point_count) {
        j["point_count"] = *g.point_count;
    } else {
        j["point_count"] = "continuum";
    }
    j["m"] = w.leading_ones();
    j["n"] = w.size();
    j["representatives"] = g.representatives;
    return j;
}

Json to_json(const PointwiseTail& t) {
    Json j;
    j["coefficient"] = t.coefficient;
    j["u_power"] = t.u_power;
    j["scale"] = t.scale;
    j["c"] = t.c;
    return j;
}

Json to_json(const PointwiseMC& m) {
    Json j;
    j["p_hat"] = m.p_hat;
    j["stderr"] = m.std_error;
    j["hits"] = m.hits;
    j["n"] = m.n;
    j["low_count"] = m.low_count;
    return j;
}

Json to_json(const ConstantEstimate& e) {
    Json j;
    j["value"] = e.value;
    j["stderr"] = e.std_error;
    j["S1"] = e.S1;
    j["S2"] = e.S2;
    j["delta"] = e.delta;
    j["n_samples"] = e.n_samples;
    j["seed"] = e.seed;
    j["estimator"] = to_string(e.estimator);
    return j;
}

Json to_json(const DriftFunctional& f) {
    Json j;
    j["b_eff"] = f.b_eff;
    j["beta"] = f.beta;
    j["w_eff"] = f.w_eff;
    j["gamma"] = f.gamma;
    j["Q"] = f.two_sided ? Json("-inf") : Json(0);
    return j;
}

Json to_json(const ResolvedConstant& c) {
    Json j;
    j["name"] = c.name;
    j["value"] = c.value;
    if (c.provenance == "monte-carlo") j["stderr"] = c.std_error;
    j["provenance"] = c.provenance;
    if (c.estimate) j["estimate"] = to_json(*c.estimate);
    return j;
}

Json to_json(const TailApproximation& t) {
    Json j;
    j["formula_id"] = t.formula_id;
    j["regime"] = t.regime;
    if (t.classification) {
        j["alpha_star"] = t.classification->alpha_star;
        j["beta_star"] = t.classification->beta_star;
    }
    if (t.drift) j["f"] = to_json(*t.drift);
    j["multiplier_kind"] = to_string(t.multiplier_kind);
    j["coefficient"] = t.coefficient;
    j["u_power"] = t.u_power;
    j["pointwise"] = to_json(t.pointwise);
    j["constants"] = Json::array();
    for (const auto& c : t.constants) j["constants"].push_back(to_json(c));
    j["relative_uncertainty"] = t.relative_uncertainty();
    return j;
}

Json to_json(const RuinAsymptotic& r) {
    Json j;
    j["alpha"] = r.alpha;
    j["w"] = r.w;
    j["regime"] = to_string(r.regime);
    j["base"] = r.base;
    j["stated_branch_coefficient"] = r.branch_coefficient;
    j["stated_branch_u_power"] = r.branch_u_power;
    j["assembled"] = to_json(r.assembled);
    j["limiting_factor"] = r.limiting_factor();
    j["disputed"] = r.disputed;
    return j;
}

Json to_json(const MCEstimate& e) {
    Json j;
    j["u"] = e.u;
    j["p_hat"] = e.p_hat;
    j["stderr"] = e.std_error;
    j["n"] = e.n;
    j["hits"] = e.hits;
    j["N"] = e.N;
    j["seed"] = e.seed;
    j["refined_p_hat"] = e.refined_p_hat;
    j["refined_stderr"] = e.refined_std_error;
    j["refined_n"] = e.refined_n;
    j["discretization_flag"] = e.discretization_flag;
    return j;
}

Json to_json(const RatioTable& t) {
    Json j;
    j["N"] = t.N;
    j["n_samples"] = t.n_samples;
    j["seed"] = t.seed;
    j["candidates"] = t.labels;
    j["rows"] = Json::array();
    for (const auto& r : t.rows) {
        Json row;
        row["u"] = r.u;
        row["feasible"] = r.feasible;
        if (r.feasible) row["mc"] = to_json(r.mc);
        row["cells"] = Json::array();
        for (std::size_t k = 0; k < r.cells.size(); ++k) {
            Json c;
            c["candidate"] = t.labels[k];
            c["asym"] = r.cells[k].asym;
            c["rel_uncertainty"] = r.cells[k].rel_uncertainty;
            if (r.feasible) {
                c["ratio"] = r.cells[k].ratio;
                c["ci_lo"] = r.cells[k].ci_lo;
                c["ci_hi"] = r.cells[k].ci_hi;
            }
            row["cells"].push_back(c);
        }
        j["rows"].push_back(row);
    }
    j["nonconvergence"] = t.nonconvergence;
    j["discretization_flag"] = t.discretization_flag;
    return j;
}

Json to_json(const SamplePlan& p) {
    Json j;
    j["u_values"] = p.u_values;
    j["feasible"] = p.feasible;
    j["N_rule"] = p.N_rule;
    j["N"] = p.N;
    j["n_samples"] = p.n_samples;
    j["refine_samples"] = p.refine_samples;
    j["refine_N"] = std::min(kMaxGridPoints, 2 * p.N);
    return j;
}

SupremumQuery query_from_json(const nlohmann::json& j) {
    SupremumQuery q;
    q.model = model_from_json(j.at("model"));
    q.n_components = j.value("n_components", std::size_t{1});
    if (j.contains("weights")) {
        q.weights = WeightVector(j.at("weights").get<std::vector<double>>());
    } else {
        q.weights = WeightVector::ones(q.n_components);
    }
    q.order = NormOrder(j.contains("p") ? p_from_json(j.at("p")) : 2.0);
    q.c = j.value("c", 1.0);
    if (j.contains("trend")) q.trend = trend_from_json(j.at("trend"));
    q.T = j.value("T", 1.0);
    q.lambda_res = j.value("lambda_res", 10.0);
    if (j.contains("N")) q.N = j.at("N").get<std::size_t>();
    q.validate();
    return q;
}

Json to_json(const SupremumQuery& q) {
    Json j;
    j["model"] = to_json(q.model);
    j["n_components"] = q.n_components;
    j["weights"] = std::vector<double>(q.weights.values().begin(), q.weights.values().end());
    j["p"] = p_to_json(q.order.p());
    j["c"] = q.c;
    j["trend"] = to_json(q.trend);
    j["T"] = q.T;
    j["lambda_res"] = q.lambda_res;
    if (q.N) j["N"] = *q.N;
    return j;
}

}  // namespace lpsup
