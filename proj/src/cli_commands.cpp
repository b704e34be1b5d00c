#include "lpsup/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lpsup/json_io.hpp"

#ifndef LPSUP_VERSION
#define LPSUP_VERSION "0.0.0"
#endif

namespace lpsup::cli {

namespace {

double parse_p(const std::string& s) {
    if (s == "inf" || s == "infinity" || s == "Inf") return kInf;
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("p must lie in [1, inf]");
    }
    if (pos != s.size()) throw std::invalid_argument("p must lie in [1, inf]");
    return v;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

struct Context {
    int threads = 0;
    bool stamp = false;
    std::string command;
    Json parameters = Json::object();
    std::uint64_t seed = 0;
    bool seeded = false;
    /// Command tokens without global options; replay re-runs them.
    std::vector<std::string> argv;

    Json manifest() const {
        Json m;
        m["command"] = command;
        m["parameters"] = parameters;
        m["parameters"]["argv"] = argv;
        if (seeded) {
            m["seed"] = seed;
        } else {
            m["seed"] = nullptr;
        }
        m["artifact_version"] = LPSUP_VERSION;
        m["timestamp"] = stamp ? Json(utc_now()) : Json(nullptr);
        return m;
    }
};

Json envelope(const Context& ctx, Json result) {
    Json j;
    j["manifest"] = ctx.manifest();
    j["result"] = std::move(result);
    return j;
}

Json evaluations(const std::vector<double>& us, const TailApproximation& t, double shift = 0.0) {
    Json arr = Json::array();
    for (double u : us) {
        Json e;
        e["u"] = u;
        e["value"] = t.evaluate(u + shift);
        e["value_limit"] = t.evaluate_limit(u + shift);
        const auto [lo, hi] = t.band(u + shift);
        e["band"] = {lo, hi};
        arr.push_back(e);
    }
    return arr;
}

ConstantResolver resolver_from_json(const nlohmann::json& j, int threads) {
    ConstantResolver r;
    r.threads = threads;
    if (j.is_object()) {
        r.n_samples = j.value("samples", r.n_samples);
        r.seed = j.value("seed", r.seed);
        r.delta = j.value("delta", r.delta);
        r.S = j.value("S", r.S);
        r.force_mc = j.value("force_mc", r.force_mc);
    }
    return r;
}

Json resolver_to_json(const ConstantResolver& r) {
    Json j;
    j["samples"] = r.n_samples;
    j["seed"] = r.seed;
    j["delta"] = r.delta;
    j["S"] = r.S;
    j["force_mc"] = r.force_mc;
    return j;
}

TabulatedFunction a_function(const nlohmann::json& desc, double T) {
    if (desc.contains("a_table")) {
        const auto& t = desc.at("a_table");
        return TabulatedFunction(t.at("t").get<std::vector<double>>(), t.at("a").get<std::vector<double>>());
    }
    return TabulatedFunction::constant(desc.at("a").get<double>(), 0.0, T);
}

Candidate candidate_from_json(const nlohmann::json& desc, const SupremumQuery& q, const ConstantResolver& r,
                              Json& detail) {
    const auto formula = desc.at("formula").get<std::string>();
    if (formula == "ouchi") {
        const int n = desc.value("n", static_cast<int>(q.n_components));
        const double T = desc.value("T", q.T);
        detail["formula_id"] = "ouchi";
        detail["n"] = n;
        detail["T"] = T;
        return Candidate{"ouchi", [n, T](double u) { return std::make_pair(ou_chisq_supremum_tail(n, T, u), 0.0); }};
    }
    const double alpha = desc.value("alpha", model_alpha(q.model));
    if (formula == "thm32") {
        const TailApproximation t =
            locally_stationary_supremum_tail(q.order, q.c, q.weights, alpha, a_function(desc, q.T), r);
        detail = to_json(t);
        return candidate_from("thm32", t);
    }
    if (formula == "thm33") {
        const TailApproximation t =
            locally_stationary_trend_tail(q.order, q.c, q.weights, alpha, a_function(desc, q.T), q.trend, r);
        detail = to_json(t);
        return candidate_from("thm33", t);
    }
    if (formula == "thm31") {
        NonStationaryLocalModel m{desc.at("b").get<double>(), desc.at("beta").get<double>(), desc.at("a").get<double>(),
                                  alpha, desc.at("t0").get<double>(), q.T};
        TrendLocalModel tr{desc.value("w", 0.0), desc.value("gamma", 1.0), m.t0};
        const TailApproximation t = nonstationary_supremum_tail(q.order, q.c, q.weights, m, tr, r);
        detail = to_json(t);
        return candidate_from("thm31", t, desc.value("threshold_shift", 0.0));
    }
    throw std::invalid_argument("unknown asymptotic formula \"" + formula + "\"");
}

// Drops the global --threads and --stamp options.
std::vector<std::string> command_tokens(int argc, const char* const* argv) {
    std::vector<std::string> out;
    for (int i = 1; i < argc; ++i) {
        const std::string t = argv[i];
        if (t == "--stamp" || t.rfind("--threads=", 0) == 0) continue;
        if (t == "--threads") {
            ++i;
            continue;
        }
        out.push_back(t);
    }
    return out;
}

inline constexpr const char* kScenarioToken = "@scenario";

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tail asymptotics and Monte-Carlo validation for suprema of L^p-norm Gaussian processes", "lpsup"};
    app.require_subcommand(1);
    Context ctx;
    app.add_option("--threads", ctx.threads, "worker threads (default: LPSUP_THREADS or hardware)");
    app.add_flag("--stamp", ctx.stamp, "record a wall-clock timestamp in the manifest");
    app.set_version_flag("--version", std::string(LPSUP_VERSION));

    ctx.argv = command_tokens(argc, argv);

    // geometry
    auto* geo = app.add_subcommand("geometry", "critical scale and maximizers of the dual problem");
    std::string p_str = "2";
    std::vector<double> weights{1.0};
    geo->add_option("--p", p_str, "norm order in [1, inf]")->required();
    geo->add_option("--weights", weights, "weights 1 = d_1 >= ... > 0")->delimiter(',')->required();

    // pointwise
    auto* pw = app.add_subcommand("pointwise", "one-point tail asymptotic, optionally with an MC check");
    double c = 1.0;
    std::vector<double> u_list;
    std::uint64_t samples = 0;
    std::uint64_t seed = 1;
    pw->add_option("--p", p_str)->required();
    pw->add_option("--c", c)->required();
    pw->add_option("--weights", weights)->delimiter(',')->required();
    pw->add_option("--u-list", u_list)->delimiter(',')->required();
    pw->add_option("--samples", samples, "MC samples (0 = no MC)");
    pw->add_option("--seed", seed);

    // constants
    auto* cons = app.add_subcommand("constants", "Pickands and Piterbarg constants");
    cons->require_subcommand(1);
    double alpha = 1.0, a = 1.0, b = 0.0, beta = -1.0, w = 0.0, gamma = 1.0, S = kDefaultWindow, S1 = 0.0,
           delta = kDefaultDelta;
    bool closed_form = false, two_sided = false, slope = false;
    std::string estimator = "shift";
    std::uint64_t const_samples = 20000;
    auto* pick = cons->add_subcommand("pickands", "H_alpha = lim H_alpha[0, S] / S");
    pick->add_option("--alpha", alpha)->required();
    pick->add_option("--S", S, "window length");
    pick->add_option("--S1", S1, "left window (reports H[-S1, S] instead of the constant)");
    pick->add_option("--delta", delta);
    pick->add_option("--samples", const_samples);
    pick->add_option("--seed", seed);
    pick->add_option("--estimator", estimator)->check(CLI::IsMember({"shift", "direct"}));
    pick->add_flag("--closed-form", closed_form);
    pick->add_flag("--slope", slope, "report (H[0,2S] - H[0,S]) / S");
    auto* pit = cons->add_subcommand("piterbarg", "P^f_{alpha,a}[Q, inf) with f = b|t|^beta + w|t|^gamma");
    pit->add_option("--alpha", alpha)->required();
    pit->add_option("--a", a)->required();
    pit->add_option("--b", b);
    pit->add_option("--beta", beta, "defaults to alpha");
    pit->add_option("--w", w);
    pit->add_option("--gamma", gamma);
    pit->add_flag("--two-sided", two_sided, "Q = -inf");
    pit->add_option("--S", S);
    pit->add_option("--delta", delta);
    pit->add_option("--samples", const_samples);
    pit->add_option("--seed", seed);
    pit->add_option("--estimator", estimator)->check(CLI::IsMember({"shift", "direct"}));
    pit->add_flag("--closed-form", closed_form);

    // asymptotic
    auto* asy = app.add_subcommand("asymptotic", "evaluate a supremum-tail asymptotic");
    std::string theorem;
    double t0 = 0.0, T = 1.0;
    int n_comp = 2;
    std::string a_table, g_table;
    ConstantResolver resolver;
    asy->add_option("theorem", theorem)
        ->required()
        ->check(CLI::IsMember({"thm31", "thm32", "thm33", "ex31", "ex32", "ruin", "ouchi"}));
    asy->add_option("--p", p_str);
    asy->add_option("--c", c);
    asy->add_option("--weights", weights)->delimiter(',');
    asy->add_option("--alpha", alpha);
    asy->add_option("--a", a);
    asy->add_option("--a-table", a_table, "a(t) as t:a,t:a,...");
    asy->add_option("--b", b);
    asy->add_option("--beta", beta);
    asy->add_option("--w", w);
    asy->add_option("--gamma", gamma);
    asy->add_option("--g-table", g_table, "trend g(t) as t:g,t:g,...");
    asy->add_option("--t0", t0);
    asy->add_option("--T", T);
    asy->add_option("--n", n_comp);
    asy->add_option("--u-list", u_list)->delimiter(',')->required();
    asy->add_option("--samples", resolver.n_samples, "MC samples for unresolved constants");
    asy->add_option("--seed", resolver.seed);
    asy->add_option("--delta", resolver.delta);
    asy->add_option("--S", resolver.S);

    // validate
    auto* val = app.add_subcommand("validate", "run a scenario's MC ratio table");
    std::string scenario_path, csv_path, verdict_path;
    bool dry_run = false;
    val->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);
    val->add_option("--csv", csv_path, "write the ratio table as CSV ('-' for stdout instead of JSON)");
    val->add_option("--verdict", verdict_path, "write the arbitration verdict JSON (ruin scenarios)");
    val->add_flag("--dry-run", dry_run, "print the grid and sample plan only");

    // sample
    auto* smp = app.add_subcommand("sample", "dump a path ensemble (f8 binary + JSON sidecar)");
    std::string model_type = "fbm", prefix;
    double rate = 1.0;
    std::size_t N = 256, paths = 16;
    smp->add_option("--model", model_type)->check(CLI::IsMember({"fbm", "ou", "powerexp"}));
    smp->add_option("--alpha", alpha);
    smp->add_option("--rate", rate);
    smp->add_option("--a", a);
    smp->add_option("--components", n_comp);
    smp->add_option("--T", T);
    smp->add_option("--N", N);
    smp->add_option("--paths", paths);
    smp->add_option("--seed", seed);
    smp->add_option("--out", prefix)->required();

    // replay
    auto* rep = app.add_subcommand("replay", "re-run the command recorded in an output's manifest");
    std::string replay_path;
    rep->add_option("output", replay_path, "JSON output carrying a manifest")->required()->check(CLI::ExistingFile);

    auto fail = [&](int code, const std::string& kind, const std::string& msg) {
        Json e;
        e["error"] = msg;
        e["kind"] = kind;
        err << e.dump() << "\n";
        return code;
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion& e) {
        out << LPSUP_VERSION << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        return fail(kExitInvalidInput, "invalid_input", e.what());
    }
    resolver.threads = ctx.threads;

    if (*rep) {
        nlohmann::json recorded;
        try {
            recorded = nlohmann::json::parse(std::ifstream(replay_path)).at("manifest");
        } catch (const nlohmann::json::exception& e) {
            return fail(kExitInvalidInput, "invalid_input", std::string("no manifest in ") + replay_path + ": " + e.what());
        }
        const auto& params = recorded.at("parameters");
        if (!params.contains("argv")) return fail(kExitInvalidInput, "invalid_input", "manifest has no argv");
        std::vector<std::string> tokens{"lpsup"};
        if (ctx.threads > 0) {
            tokens.push_back("--threads");
            tokens.push_back(std::to_string(ctx.threads));
        }
        if (!recorded.at("timestamp").is_null()) tokens.push_back("--stamp");
        std::string scenario_copy;
        for (const auto& t : params.at("argv")) {
            tokens.push_back(t.get<std::string>());
            if (tokens.back() == kScenarioToken) {
                scenario_copy = replay_path + ".scenario.json";
                write_text(scenario_copy, params.at("scenario").dump(2) + "\n");
                tokens.back() = scenario_copy;
            }
        }
        std::vector<const char*> args;
        for (const auto& t : tokens) args.push_back(t.c_str());
        const int code = run(static_cast<int>(args.size()), args.data(), out, err);
        if (!scenario_copy.empty()) std::remove(scenario_copy.c_str());
        return code;
    }

    try {
        if (*geo) {
            const NormOrder order(parse_p(p_str));
            const WeightVector wv(weights);
            ctx.command = "geometry";
            ctx.parameters["p"] = p_to_json(order.p());
            ctx.parameters["weights"] = weights;
            out << envelope(ctx, to_json(critical_scale(order, wv), wv)).dump(2) << "\n";
            return kExitOk;
        }

        if (*pw) {
            const NormOrder order(parse_p(p_str));
            const WeightVector wv(weights);
            ctx.command = "pointwise";
            ctx.parameters["p"] = p_to_json(order.p());
            ctx.parameters["c"] = c;
            ctx.parameters["weights"] = weights;
            ctx.parameters["u_list"] = u_list;
            ctx.parameters["samples"] = samples;
            const PointwiseTail t = pointwise_tail_asymptotic(order, c, wv);
            Json res;
            res["tail"] = to_json(t);
            res["monotone_from"] = t.monotone_from();
            res["evaluations"] = Json::array();
            for (double u : u_list) {
                Json e;
                e["u"] = u;
                e["value"] = t.evaluate(u);
                e["value_limit"] = u > 0.0 ? Json(t.evaluate_limit(u)) : Json(nullptr);
                if (samples > 0) e["mc"] = to_json(pointwise_tail_mc(order, c, wv, u, samples, seed, ctx.threads));
                res["evaluations"].push_back(e);
            }
            if (samples > 0) {
                ctx.seed = seed;
                ctx.seeded = true;
            }
            out << envelope(ctx, res).dump(2) << "\n";
            return kExitOk;
        }

        if (*cons) {
            const Estimator est = estimator == "direct" ? Estimator::Direct : Estimator::ShiftNormalized;
            if (*pick) {
                ctx.command = "constants pickands";
                ctx.parameters["alpha"] = alpha;
                if (closed_form) {
                    ctx.parameters["closed_form"] = true;
                    const auto v = pickands_closed_form(alpha);
                    if (!v) throw std::invalid_argument("no closed form for the Pickands constant at alpha=" + std::to_string(alpha));
                    Json res;
                    res["value"] = *v;
                    res["provenance"] = "closed-form";
                    out << envelope(ctx, res).dump(2) << "\n";
                    return kExitOk;
                }
                ctx.parameters["S"] = S;
                ctx.parameters["S1"] = S1;
                ctx.parameters["delta"] = delta;
                ctx.parameters["samples"] = const_samples;
                ctx.parameters["estimator"] = to_string(est);
                ctx.seed = seed;
                ctx.seeded = true;
                Json res;
                if (slope) {
                    ctx.parameters["slope"] = true;
                    res = to_json(pickands_slope(alpha, S, delta, const_samples, seed, est, ctx.threads));
                    res["quantity"] = "(H_alpha[0,2S]-H_alpha[0,S])/S";
                } else if (S1 > 0.0) {
                    res = to_json(pickands_window(alpha, S1, S, delta, const_samples, seed, est, ctx.threads));
                    res["quantity"] = "H_alpha[-S1,S2]";
                } else {
                    res = to_json(pickands_constant(alpha, S, delta, const_samples, seed, est, ctx.threads));
                    res["quantity"] = "H_alpha[0,S]/S";
                }
                res["provenance"] = "monte-carlo";
                out << envelope(ctx, res).dump(2) << "\n";
                return kExitOk;
            }
            ctx.command = "constants piterbarg";
            DriftFunctional f;
            f.b_eff = b;
            f.beta = beta > 0.0 ? beta : alpha;
            f.w_eff = w;
            f.gamma = gamma;
            f.two_sided = two_sided;
            f.validate();
            ctx.parameters["alpha"] = alpha;
            ctx.parameters["a"] = a;
            ctx.parameters["f"] = to_json(f);
            if (closed_form) {
                ctx.parameters["closed_form"] = true;
                const auto v = piterbarg_closed_form_for(alpha, a, f);
                if (!v) {
                    throw std::invalid_argument(
                        "closed form needs alpha in {1, 2}, Q = 0 and f = b t^alpha (a single power equal to alpha)");
                }
                Json res;
                res["value"] = *v;
                res["provenance"] = "closed-form";
                out << envelope(ctx, res).dump(2) << "\n";
                return kExitOk;
            }
            ctx.parameters["S"] = S;
            ctx.parameters["delta"] = delta;
            ctx.parameters["samples"] = const_samples;
            ctx.parameters["estimator"] = to_string(est);
            ctx.seed = seed;
            ctx.seeded = true;
            Json res = to_json(piterbarg_constant(alpha, a, f, S, delta, const_samples, seed, est, ctx.threads));
            res["provenance"] = "monte-carlo";
            out << envelope(ctx, res).dump(2) << "\n";
            return kExitOk;
        }

        if (*asy) {
            ctx.command = "asymptotic " + theorem;
            ctx.parameters["u_list"] = u_list;
            for (double u : u_list) {
                if (!(u > 0.0)) throw std::invalid_argument("u values must be positive");
            }
            auto parse_table = [](const std::string& s) {
                std::vector<double> xs, ys;
                std::stringstream ss(s);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    const auto colon = item.find(':');
                    if (colon == std::string::npos) throw std::invalid_argument("table entries must look like t:value");
                    xs.push_back(std::stod(item.substr(0, colon)));
                    ys.push_back(std::stod(item.substr(colon + 1)));
                }
                return TabulatedFunction(xs, ys);
            };
            auto a_fn = [&]() {
                if (!a_table.empty()) {
                    ctx.parameters["a_table"] = a_table;
                    return parse_table(a_table);
                }
                ctx.parameters["a"] = a;
                ctx.parameters["T"] = T;
                return TabulatedFunction::constant(a, 0.0, T);
            };
            auto trend = [&]() -> Trend {
                if (!g_table.empty()) {
                    ctx.parameters["g_table"] = g_table;
                    return parse_table(g_table);
                }
                ctx.parameters["w"] = w;
                ctx.parameters["gamma"] = gamma;
                ctx.parameters["t0"] = t0;
                if (w == 0.0) return ZeroTrend{};
                return PowerTrend{w, gamma, t0};
            };
            auto note_resolver = [&] {
                ctx.parameters["resolver"] = resolver_to_json(resolver);
                ctx.seed = resolver.seed;
                ctx.seeded = true;
            };
            Json res;
            if (theorem == "ouchi") {
                ctx.parameters["n"] = n_comp;
                ctx.parameters["T"] = T;
                res["formula_id"] = "ouchi";
                res["coefficient"] = std::pow(2.0, 2.0 - n_comp / 2.0) / std::tgamma(n_comp / 2.0);
                res["u_power"] = n_comp / 2.0;
                res["evaluations"] = Json::array();
                for (double u : u_list) res["evaluations"].push_back({{"u", u}, {"value", ou_chisq_supremum_tail(n_comp, T, u)}});
            } else if (theorem == "ruin") {
                const WeightVector wv(weights);
                ctx.parameters["alpha"] = alpha;
                ctx.parameters["weights"] = weights;
                ctx.parameters["w"] = w;
                note_resolver();
                const RuinAsymptotic r = ruin_probability_asymptotic(alpha, wv, w, resolver);
                res = to_json(r);
                res["evaluations"] = Json::array();
                for (double u : u_list) {
                    res["evaluations"].push_back(
                        {{"u", u}, {"stated", r.stated_value(u)}, {"assembled", r.assembled_value(u)}});
                }
            } else {
                const NormOrder order(parse_p(p_str));
                const WeightVector wv(weights);
                ctx.parameters["p"] = p_to_json(order.p());
                ctx.parameters["weights"] = weights;
                TailApproximation t;
                if (theorem == "ex31") {
                    ctx.parameters["alpha"] = alpha;
                    note_resolver();
                    t = fbm_sqrt_trend_tail(alpha, order, wv, resolver);
                } else if (theorem == "thm31") {
                    const double bb = beta > 0.0 ? beta : 1.0;
                    ctx.parameters["c"] = c;
                    ctx.parameters["alpha"] = alpha;
                    ctx.parameters["a"] = a;
                    ctx.parameters["b"] = b;
                    ctx.parameters["beta"] = bb;
                    ctx.parameters["w"] = w;
                    ctx.parameters["gamma"] = gamma;
                    ctx.parameters["t0"] = t0;
                    ctx.parameters["T"] = T;
                    note_resolver();
                    t = nonstationary_supremum_tail(order, c, wv, NonStationaryLocalModel{b, bb, a, alpha, t0, T},
                                                    TrendLocalModel{w, gamma, t0}, resolver);
                } else if (theorem == "thm32") {
                    ctx.parameters["c"] = c;
                    ctx.parameters["alpha"] = alpha;
                    note_resolver();
                    t = locally_stationary_supremum_tail(order, c, wv, alpha, a_fn(), resolver);
                } else if (theorem == "thm33") {
                    ctx.parameters["c"] = c;
                    ctx.parameters["alpha"] = alpha;
                    note_resolver();
                    const TabulatedFunction af = a_fn();
                    t = locally_stationary_trend_tail(order, c, wv, alpha, af, trend(), resolver);
                } else {
                    ctx.parameters["alpha"] = alpha;
                    note_resolver();
                    const TabulatedFunction af = a_fn();
                    t = chi_square_trend_tail(wv, alpha, af, trend(), resolver);
                }
                res = to_json(t);
                res["evaluations"] = evaluations(u_list, t);
            }
            out << envelope(ctx, res).dump(2) << "\n";
            return kExitOk;
        }

        if (*val) {
            std::ifstream in(scenario_path);
            nlohmann::json sc;
            try {
                sc = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw std::invalid_argument(std::string("scenario is not valid JSON: ") + e.what());
            }
            ctx.command = "validate";
            std::replace(ctx.argv.begin(), ctx.argv.end(), scenario_path, std::string(kScenarioToken));
            ctx.parameters["scenario"] = sc;
            const auto kind = sc.value("kind", std::string("supremum"));
            const auto us = sc.at("u_values").get<std::vector<double>>();
            const auto n = sc.at("samples").get<std::uint64_t>();
            ctx.seed = sc.at("seed").get<std::uint64_t>();
            ctx.seeded = true;
            const ConstantResolver r = resolver_from_json(sc.value("resolver", nlohmann::json::object()), ctx.threads);

            Json res;
            res["name"] = sc.value("name", std::string());
            bool flagged = false;
            RatioTable table;
            if (kind == "ruin") {
                const double al = sc.at("alpha").get<double>();
                const WeightVector wv(sc.at("weights").get<std::vector<double>>());
                const double prem = sc.at("w").get<double>();
                std::optional<std::size_t> grid;
                if (sc.contains("N")) grid = sc.at("N").get<std::size_t>();
                SupremumQuery q = ruin_query(al, wv, prem, grid);
                if (dry_run) {
                    SamplePlan plan;
                    plan.u_values = us;
                    plan.n_samples = n;
                    plan.refine_samples = static_cast<std::uint64_t>(std::llround(kRefineFraction * static_cast<double>(n)));
                    plan.N = grid_size(q, us.back() + prem);
                    for (double u : us) {
                        plan.feasible.push_back(true);
                        plan.N_rule.push_back(grid_size(q, u + prem));
                    }
                    res["plan"] = to_json(plan);
                    res["query"] = to_json(q);
                    res["matched_delta"] = Json::array();
                    for (double u : us) {
                        res["matched_delta"].push_back(matched_delta(0.5, 1.0, al, 2.0, u + prem,
                                                                     1.0 / static_cast<double>(plan.N)));
                    }
                    out << envelope(ctx, res).dump(2) << "\n";
                    return kExitOk;
                }
                const ArbitrationReport rep = ruin_arbitration(al, wv, prem, us, n, ctx.seed, grid, r, ctx.threads);
                table = rep.table;
                res["query"] = to_json(ruin_query(al, wv, prem, rep.table.N));
                res["asymptotics"] = Json::array();
                for (const auto& ra : rep.asymptotics) res["asymptotics"].push_back(to_json(ra));
                Json verdict;
                verdict["alpha"] = al;
                verdict["w"] = prem;
                verdict["containing_one"] = rep.containing_one;
                verdict["verdict"] = rep.verdict;
                verdict["disputed"] = !rep.asymptotics.empty() && rep.asymptotics.front().disputed;
                if (const RatioRow* last = rep.table.last_feasible()) {
                    verdict["u"] = last->u;
                    for (std::size_t k = 0; k < rep.table.labels.size(); ++k) {
                        verdict["ratios"][rep.table.labels[k]] = {{"ratio", last->cells[k].ratio},
                                                                 {"ci_lo", last->cells[k].ci_lo},
                                                                 {"ci_hi", last->cells[k].ci_hi}};
                    }
                }
                res["verdict"] = verdict;
                if (!verdict_path.empty()) write_text(verdict_path, envelope(ctx, verdict).dump(2) + "\n");
            } else if (kind == "supremum") {
                const SupremumQuery q = query_from_json(sc.at("query"));
                Json detail;
                const Candidate cand = candidate_from_json(sc.at("asymptotic"), q, r, detail);
                res["query"] = to_json(q);
                res["asymptotic"] = detail;
                if (dry_run) {
                    res["plan"] = to_json(plan_ratio_curve(q, us, cand, n));
                    out << envelope(ctx, res).dump(2) << "\n";
                    return kExitOk;
                }
                table = ratio_curve(q, us, {cand}, n, ctx.seed, ctx.threads);
            } else {
                throw std::invalid_argument("scenario kind must be \"supremum\" or \"ruin\"");
            }
            if (!table.last_feasible()) throw std::invalid_argument("no feasible u in the scenario");
            // Flagged when no candidate converges; an arbitration needs only one.
            flagged = std::all_of(table.nonconvergence.begin(), table.nonconvergence.end(), [](bool x) { return x; });
            res["table"] = to_json(table);
            res["convergence_flag"] = flagged;
            const std::string csv = table.to_csv();
            if (csv_path == "-") {
                out << csv;
            } else {
                if (!csv_path.empty()) write_text(csv_path, csv);
                out << envelope(ctx, res).dump(2) << "\n";
            }
            return flagged ? kExitFlagged : kExitOk;
        }

        if (*smp) {
            ProcessModel model;
            if (model_type == "fbm") {
                model = FractionalBM{alpha};
            } else if (model_type == "ou") {
                model = OrnsteinUhlenbeck{rate};
            } else {
                model = StationaryPowerExp{alpha, a};
            }
            ctx.command = "sample";
            ctx.parameters["model"] = to_json(model);
            ctx.parameters["components"] = n_comp;
            ctx.parameters["T"] = T;
            ctx.parameters["N"] = N;
            ctx.parameters["paths"] = paths;
            ctx.parameters["out"] = prefix;
            ctx.seed = seed;
            ctx.seeded = true;
            if (n_comp < 1) throw std::invalid_argument("components must be >= 1");
            const PathEnsemble ens =
                vector_ensemble(model, static_cast<std::size_t>(n_comp), T, N, paths, seed, ctx.threads);
            write_ensemble(ens, prefix);
            Json res;
            res["bin"] = prefix + ".bin";
            res["sidecar"] = prefix + ".json";
            res["shape"] = {ens.n_paths, ens.n_components, ens.points()};
            out << envelope(ctx, res).dump(2) << "\n";
            return kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        return fail(kExitInvalidInput, "invalid_input", e.what());
    } catch (const InfeasibleTarget& e) {
        Json j;
        j["error"] = e.what();
        j["kind"] = "infeasible";
        j["feasible_u"] = e.feasible_u();
        err << j.dump() << "\n";
        return kExitInvalidInput;
    } catch (const nlohmann::json::exception& e) {
        return fail(kExitInvalidInput, "invalid_input", e.what());
    } catch (const std::exception& e) {
        return fail(kExitRuntime, "runtime", e.what());
    }
    return kExitInvalidInput;
}

}  // namespace lpsup::cli
