#include "lpsup/mc_validation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "lpsup/rng.hpp"

namespace lpsup {

namespace {

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

std::uint64_t pass_stream(std::uint64_t pass_id, std::uint64_t chunk, std::size_t n_components, std::size_t comp) {
    return (pass_id << 40) | (chunk * n_components + comp);
}

// Runs the sampler over n_samples in fixed chunks and hands each chunk's
// statistics to `sink(chunk, stats)`; chunk layout is independent of threads.
template <class Sink>
void run_statistics(const SupremumQuery& q, std::size_t N, std::uint64_t n_samples, std::uint64_t seed,
                    std::uint64_t pass_id, int threads, Sink&& sink) {
    q.validate();
    const std::size_t n = q.n_components;
    const std::size_t P = N + 1;
    const double p = q.order.p();
    const double c = q.c;
    const bool has_trend = !trend_is_zero(q.trend);
    std::vector<double> g(P, 0.0), d2(n), d(n);
    for (std::size_t k = 0; k < P; ++k) g[k] = evaluate_trend(q.trend, q.T * static_cast<double>(k) / static_cast<double>(N));
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = q.weights[i];
        d2[i] = d[i] * d[i];
    }
    const std::uint64_t n_chunks = (n_samples + kMcChunk - 1) / kMcChunk;

    for_each_chunk(n_chunks, resolve_threads(threads), [&](std::size_t chunk) {
        std::vector<std::unique_ptr<ScalarPathSampler>> samplers;
        std::vector<NormalSource> normals;
        samplers.reserve(n);
        normals.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            samplers.push_back(std::make_unique<ScalarPathSampler>(q.model, q.T, N));
            normals.emplace_back(seed, pass_stream(pass_id, chunk, n, i));
        }
        std::vector<double> paths(n * P), level(P), y(n);
        const std::uint64_t begin = chunk * kMcChunk;
        const std::uint64_t count = std::min<std::uint64_t>(kMcChunk, n_samples - begin);
        std::vector<double> stats(count);
        for (std::uint64_t s = 0; s < count; ++s) {
            for (std::size_t i = 0; i < n; ++i) samplers[i]->next(normals[i], std::span<double>(paths.data() + i * P, P));
            // level[k] is a monotone transform of the norm: squared for p = 2.
            if (p == 2.0) {
                for (std::size_t k = 0; k < P; ++k) {
                    double v = 0.0;
                    for (std::size_t i = 0; i < n; ++i) v += d2[i] * paths[i * P + k] * paths[i * P + k];
                    level[k] = v;
                }
            } else if (p == kInf) {
                for (std::size_t k = 0; k < P; ++k) {
                    double v = 0.0;
                    for (std::size_t i = 0; i < n; ++i) v = std::max(v, std::abs(d[i] * paths[i * P + k]));
                    level[k] = v;
                }
            } else if (p == 1.0) {
                for (std::size_t k = 0; k < P; ++k) {
                    double v = 0.0;
                    for (std::size_t i = 0; i < n; ++i) v += std::abs(d[i] * paths[i * P + k]);
                    level[k] = v;
                }
            } else {
                for (std::size_t k = 0; k < P; ++k) {
                    for (std::size_t i = 0; i < n; ++i) y[i] = d[i] * paths[i * P + k];
                    level[k] = lp_norm(y, p);
                }
            }
            const double power = p == 2.0 ? c / 2.0 : c;
            if (!has_trend) {
                const double mx = *std::max_element(level.begin(), level.end());
                stats[s] = power == 1.0 ? mx : std::pow(mx, power);
            } else {
                double best = -std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < P; ++k) {
                    const double v = (power == 1.0 ? level[k] : std::pow(level[k], power)) + g[k];
                    best = std::max(best, v);
                }
                stats[s] = best;
            }
        }
        sink(chunk, stats);
    });
}

MCEstimate finish(double u, std::uint64_t hits, std::uint64_t n, std::size_t N, std::uint64_t seed) {
    MCEstimate e;
    e.u = u;
    e.hits = hits;
    e.n = n;
    e.N = N;
    e.seed = seed;
    e.p_hat = static_cast<double>(hits) / static_cast<double>(n);
    e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(n));
    return e;
}

void attach_refinement(MCEstimate& e, std::uint64_t hits, std::uint64_t n) {
    e.refined_n = n;
    e.refined_p_hat = static_cast<double>(hits) / static_cast<double>(n);
    e.refined_std_error = std::sqrt(e.refined_p_hat * (1.0 - e.refined_p_hat) / static_cast<double>(n));
    const double se = std::hypot(e.std_error, e.refined_std_error);
    e.discretization_flag = std::abs(e.p_hat - e.refined_p_hat) > 3.0 * se;
}

std::uint64_t refine_count(std::uint64_t n_samples) {
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(kRefineFraction * static_cast<double>(n_samples))));
}

std::size_t refine_grid(std::size_t N) { return std::min(kMaxGridPoints, 2 * N); }

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(10) << x;
    return os.str();
}

}  // namespace

void SupremumQuery::validate() const {
    validate_model(model);
    if (n_components < 1) throw std::invalid_argument("n_components must be >= 1");
    if (weights.size() != n_components) throw std::invalid_argument("weights must have one entry per component");
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("c must be positive");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("T must be positive");
    if (!(lambda_res > 0.0)) throw std::invalid_argument("lambda_res must be positive");
    if (N && (*N < 2 || (*N & (*N - 1)) != 0)) throw std::invalid_argument("N must be a power of two >= 2");
}

std::size_t grid_size(const SupremumQuery& q, double u) {
    if (q.N) return *q.N;
    const double alpha = model_alpha(q.model);
    const double window = u > 0.0 ? std::pow(u, -2.0 / (alpha * q.c)) : q.T;
    const double step = std::min(q.T, window) / q.lambda_res;
    const double need = std::ceil(q.T / step);
    if (need >= static_cast<double>(kMaxGridPoints)) return kMaxGridPoints;
    return std::max<std::size_t>(2, next_pow2(static_cast<std::size_t>(need)));
}

std::vector<double> supremum_statistics(const SupremumQuery& q, std::size_t N, std::uint64_t n_samples,
                                        std::uint64_t seed, std::uint64_t pass_id, int threads) {
    std::vector<double> out(n_samples);
    run_statistics(q, N, n_samples, seed, pass_id, threads, [&](std::size_t chunk, const std::vector<double>& stats) {
        std::copy(stats.begin(), stats.end(), out.begin() + static_cast<std::ptrdiff_t>(chunk * kMcChunk));
    });
    return out;
}

std::vector<std::uint64_t> exceedance_counts(const SupremumQuery& q, std::size_t N, const std::vector<double>& u_values,
                                             std::uint64_t n_samples, std::uint64_t seed, std::uint64_t pass_id,
                                             int threads) {
    const std::uint64_t n_chunks = (n_samples + kMcChunk - 1) / kMcChunk;
    std::vector<std::vector<std::uint64_t>> per_chunk(n_chunks, std::vector<std::uint64_t>(u_values.size(), 0));
    run_statistics(q, N, n_samples, seed, pass_id, threads, [&](std::size_t chunk, const std::vector<double>& stats) {
        for (double s : stats) {
            for (std::size_t j = 0; j < u_values.size(); ++j) {
                if (s > u_values[j]) ++per_chunk[chunk][j];
            }
        }
    });
    std::vector<std::uint64_t> hits(u_values.size(), 0);
    for (const auto& h : per_chunk) {
        for (std::size_t j = 0; j < h.size(); ++j) hits[j] += h[j];
    }
    return hits;
}

MCEstimate supremum_exceedance(const SupremumQuery& q, double u, std::uint64_t n_samples, std::uint64_t seed,
                               const std::function<double(double)>& predicted, int threads) {
    q.validate();
    if (n_samples < 10) throw std::invalid_argument("need at least 10 samples");
    const std::size_t N = grid_size(q, u);

    if (predicted) {
        const double p = predicted(u);
        if (static_cast<double>(n_samples) * p < kMinExpectedHits) {
            // Largest u whose prediction still yields 20 expected hits.
            double lo = 0.0, hi = u;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (static_cast<double>(n_samples) * predicted(mid) >= kMinExpectedHits ? lo : hi) = mid;
            }
            throw InfeasibleTarget("expected hit count " + fmt(static_cast<double>(n_samples) * p) + " < 20 at u=" +
                                       fmt(u) + "; largest feasible u is about " + fmt(lo),
                                   lo);
        }
    } else {
        std::vector<double> pilot = supremum_statistics(q, N, kPilotSamples, seed, 2, threads);
        const auto hits = static_cast<double>(std::count_if(pilot.begin(), pilot.end(), [&](double s) { return s > u; }));
        const double rate = hits > 0.0 ? hits / kPilotSamples : 3.0 / kPilotSamples;
        if (rate < 10.0 / static_cast<double>(n_samples)) {
            std::sort(pilot.begin(), pilot.end(), std::greater<>());
            const std::size_t k = std::min<std::size_t>(
                pilot.size(),
                std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(10.0 * kPilotSamples / static_cast<double>(n_samples)))));
            throw InfeasibleTarget("pilot rate " + fmt(rate) + " < 10 / n_samples at u=" + fmt(u) +
                                       "; largest feasible u is about " + fmt(pilot[k - 1]),
                                   pilot[k - 1]);
        }
    }

    const std::vector<double> us{u};
    MCEstimate e = finish(u, exceedance_counts(q, N, us, n_samples, seed, 0, threads)[0], n_samples, N, seed);
    const std::uint64_t nr = refine_count(n_samples);
    attach_refinement(e, exceedance_counts(q, refine_grid(N), us, nr, seed, 1, threads)[0], nr);
    return e;
}

Candidate candidate_from(const std::string& label, const TailApproximation& t, double threshold_shift) {
    return Candidate{label, [t, threshold_shift](double u) {
                         return std::make_pair(t.evaluate(u + threshold_shift), t.relative_uncertainty());
                     }};
}

const RatioRow* RatioTable::last_feasible() const {
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
        if (it->feasible) return &*it;
    }
    return nullptr;
}

std::string RatioTable::to_csv() const {
    std::ostringstream os;
    os << "u,p_hat,stderr,asym,ratio,ci_lo,ci_hi,n,N,seed,candidate,status\n";
    os << std::setprecision(10);
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < labels.size(); ++j) {
            os << r.u << ',';
            if (!r.feasible) {
                const RatioCell& cell = r.cells.at(j);
                os << ",," << cell.asym << ",,,," << n_samples << ',' << N << ',' << seed << ',' << labels[j]
                   << ",infeasible\n";
                continue;
            }
            const RatioCell& cell = r.cells.at(j);
            os << r.mc.p_hat << ',' << r.mc.std_error << ',' << cell.asym << ',' << cell.ratio << ',' << cell.ci_lo << ','
               << cell.ci_hi << ',' << r.mc.n << ',' << r.mc.N << ',' << seed << ',' << labels[j] << ','
               << (r.mc.discretization_flag ? "grid-sensitive" : "ok") << '\n';
        }
    }
    return os.str();
}

SamplePlan plan_ratio_curve(const SupremumQuery& q, const std::vector<double>& u_values, const Candidate& primary,
                            std::uint64_t n_samples) {
    q.validate();
    for (std::size_t i = 1; i < u_values.size(); ++i) {
        if (!(u_values[i] > u_values[i - 1])) throw std::invalid_argument("u values must be increasing");
    }
    SamplePlan plan;
    plan.u_values = u_values;
    plan.n_samples = n_samples;
    plan.refine_samples = refine_count(n_samples);
    for (double u : u_values) {
        const double p = primary.eval(u).first;
        const bool ok = static_cast<double>(n_samples) * p >= kMinExpectedHits;
        plan.feasible.push_back(ok);
        plan.N_rule.push_back(grid_size(q, u));
        if (ok) plan.N = std::max(plan.N, grid_size(q, u));
    }
    return plan;
}

RatioTable ratio_curve(const SupremumQuery& q, const std::vector<double>& u_values,
                       const std::vector<Candidate>& candidates, std::uint64_t n_samples, std::uint64_t seed,
                       int threads) {
    if (candidates.empty()) throw std::invalid_argument("ratio curve needs at least one candidate");
    const SamplePlan plan = plan_ratio_curve(q, u_values, candidates.front(), n_samples);

    RatioTable table;
    table.n_samples = n_samples;
    table.seed = seed;
    table.N = plan.N;
    for (const auto& c : candidates) table.labels.push_back(c.label);

    std::vector<double> feasible_u;
    for (std::size_t i = 0; i < u_values.size(); ++i) {
        if (plan.feasible[i]) feasible_u.push_back(u_values[i]);
    }
    std::vector<std::uint64_t> hits, refined;
    if (!feasible_u.empty()) {
        hits = exceedance_counts(q, plan.N, feasible_u, n_samples, seed, 0, threads);
        refined = exceedance_counts(q, refine_grid(plan.N), feasible_u, plan.refine_samples, seed, 1, threads);
    }

    std::size_t j = 0;
    for (std::size_t i = 0; i < u_values.size(); ++i) {
        RatioRow row;
        row.u = u_values[i];
        row.feasible = plan.feasible[i];
        if (row.feasible) {
            row.mc = finish(row.u, hits[j], n_samples, plan.N, seed);
            attach_refinement(row.mc, refined[j], plan.refine_samples);
            table.discretization_flag = table.discretization_flag || row.mc.discretization_flag;
            ++j;
        }
        for (const auto& cand : candidates) {
            RatioCell cell;
            std::tie(cell.asym, cell.rel_uncertainty) = cand.eval(row.u);
            if (row.feasible) {
                cell.ratio = row.mc.p_hat / cell.asym;
                const double rel_mc = row.mc.p_hat > 0.0 ? row.mc.std_error / row.mc.p_hat : 1.0;
                const double rel = std::hypot(rel_mc, cell.rel_uncertainty);
                cell.ci_lo = cell.ratio * std::max(0.0, 1.0 - kCiZ * rel);
                cell.ci_hi = cell.ratio * (1.0 + kCiZ * rel);
            }
            row.cells.push_back(cell);
        }
        table.rows.push_back(std::move(row));
    }

    const RatioRow* last = table.last_feasible();
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        table.nonconvergence.push_back(last && (last->cells[k].ci_hi < 0.7 || last->cells[k].ci_lo > 1.3));
    }
    return table;
}

SupremumQuery ruin_query(double alpha, const WeightVector& weights, double w_premium, std::optional<std::size_t> N) {
    SupremumQuery q;
    q.model = FractionalBM{alpha};
    q.n_components = weights.size();
    q.weights = weights;
    q.order = NormOrder(2.0);
    q.c = 2.0;
    q.trend = PowerTrend{w_premium, 1.0, 0.0};
    q.T = 1.0;
    q.N = N;
    return q;
}

MCEstimate ruin_mc(double alpha, const WeightVector& weights, double w_premium, double u, std::uint64_t n_samples,
                   std::uint64_t seed, std::optional<std::size_t> N, int threads) {
    if (!(w_premium >= 0.0)) throw std::invalid_argument("premium rate must be >= 0");
    return supremum_exceedance(ruin_query(alpha, weights, w_premium, N), u, n_samples, seed, {}, threads);
}

double matched_delta(double a, double d, double alpha, double c, double u, double Delta) {
    return std::pow(a / (d * d), 1.0 / alpha) * std::pow(u, 2.0 / (alpha * c)) * Delta;
}

ArbitrationReport ruin_arbitration(double alpha, const WeightVector& weights, double w_premium,
                                   const std::vector<double>& u_values, std::uint64_t n_samples, std::uint64_t seed,
                                   std::optional<std::size_t> N, const ConstantResolver& resolver, int threads) {
    if (u_values.empty()) throw std::invalid_argument("arbitration needs at least one u");
    SupremumQuery q = ruin_query(alpha, weights, w_premium, N);
    const std::size_t grid = grid_size(q, u_values.back() + w_premium);
    q.N = grid;
    const double Delta = q.T / static_cast<double>(grid);

    ArbitrationReport rep;
    rep.alpha = alpha;
    rep.w = w_premium;
    std::map<double, std::size_t> index;
    for (double u : u_values) {
        ConstantResolver r = resolver;
        if (alpha < 1.0) {
            r.force_mc = true;
            r.delta = matched_delta(0.5, 1.0, alpha, 2.0, u + w_premium, Delta);
            if (r.delta > 0.05) {
                throw std::invalid_argument("grid too coarse: matched Pickands step " + fmt(r.delta) +
                                            " exceeds 0.05 at u=" + fmt(u) + "; raise N");
            }
        }
        index[u] = rep.asymptotics.size();
        rep.asymptotics.push_back(ruin_probability_asymptotic(alpha, weights, w_premium, r));
    }
    const auto& asy = rep.asymptotics;
    auto lookup = [&asy, index](double u) -> const RuinAsymptotic& { return asy.at(index.at(u)); };
    std::vector<Candidate> cands;
    cands.push_back({"stated", [lookup](double u) {
                         const RuinAsymptotic& a = lookup(u);
                         double rel = 0.0;
                         for (const auto& k : a.constants) {
                             if (k.value > 0.0) rel = std::hypot(rel, k.std_error / k.value);
                         }
                         return std::make_pair(a.stated_value(u), rel);
                     }});
    cands.push_back({"assembled", [lookup](double u) {
                         const RuinAsymptotic& a = lookup(u);
                         return std::make_pair(a.assembled_value(u), a.assembled.relative_uncertainty());
                     }});
    // Threshold u on the statistic max (||X||^2 - w t).
    rep.table = ratio_curve(q, u_values, cands, n_samples, seed, threads);

    if (const RatioRow* last = rep.table.last_feasible()) {
        for (std::size_t k = 0; k < cands.size(); ++k) {
            if (last->cells[k].ci_lo <= 1.0 && 1.0 <= last->cells[k].ci_hi) rep.containing_one.push_back(cands[k].label);
        }
    }
    if (rep.containing_one.size() == 2) {
        rep.verdict = "both";
    } else if (rep.containing_one.empty()) {
        rep.verdict = "neither";
    } else {
        rep.verdict = rep.containing_one.front();
    }
    return rep;
}

}  // namespace lpsup
