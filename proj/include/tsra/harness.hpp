#pragma once
//
// Experiment harness.
//
// An ExperimentConfig names an instance (inline, on disk, or generated), an
// online policy, and trial parameters.  run_experiment solves the offline
// references once (expected optimum, feasibility margin, factor-revealing
// bound, scale ratios), replays the policy over independent streams seeded
// seed, seed+1, ..., and aggregates per-trial metrics into a MetricsReport.
//
// Instance-level impossibilities (expected instance infeasible, margin at or
// below epsilon for the known-margin rule) propagate as exceptions — they
// doom every trial, so they are configuration errors, not observations.
// Per-trial failures of the adaptive rules (estimator infeasible, estimated
// margin too thin) are data and land in the report.
//
// Reports serialize to JSON ({"config", "offline", "aggregates", "trials"})
// or CSV (one row per trial, aggregates as trailing '#' comment lines).
// Undefined quantities are omitted from JSON rather than encoded as null.
//
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "io.hpp"
#include "model.hpp"
#include "offline.hpp"
#include "online.hpp"

namespace tsra {

// ─── Configuration ───────────────────────────────────────────────────────────

enum class Algorithm { LiftedRounding, FixedTarget, Staged, Adaptive };

inline const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::LiftedRounding: return "rounding";
        case Algorithm::FixedTarget: return "fixed-target";
        case Algorithm::Staged: return "staged";
        case Algorithm::Adaptive: return "adaptive";
    }
    return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
    if (s == "rounding") return Algorithm::LiftedRounding;
    if (s == "fixed-target") return Algorithm::FixedTarget;
    if (s == "staged") return Algorithm::Staged;
    if (s == "adaptive") return Algorithm::Adaptive;
    throw std::invalid_argument(
        "unknown algorithm '" + s +
        "' (expected rounding, fixed-target, staged, or adaptive)");
}

struct ExperimentConfig {
    // Exactly one instance source.
    std::optional<Instance> instance;
    std::string instance_path;
    std::optional<GeneratorParams> generator;

    Algorithm algorithm = Algorithm::Adaptive;
    double epsilon = 0.25;
    int trials = 20;
    std::uint64_t seed = 1;   // stream seeds seed .. seed + trials - 1
    double gamma_c = 1.0;     // coefficient in the regime threshold c eps^2 / ln(K/eps)
    int threads = 1;
    std::string out;          // output path; empty = stdout
    std::string format = "json";  // or "csv"
};

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    try {
        int sources = 0;
        if (j.contains("instance")) {
            cfg.instance = instance_from_json(j.at("instance"));
            ++sources;
        }
        if (j.contains("instance_path")) {
            cfg.instance_path = j.at("instance_path").get<std::string>();
            ++sources;
        }
        if (j.contains("generator")) {
            cfg.generator = generator_from_json(j.at("generator"));
            ++sources;
        }
        if (sources != 1)
            throw std::runtime_error(
                "config must name exactly one of instance, instance_path, generator");

        if (j.contains("algorithm"))
            cfg.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
        if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("gamma_c")) cfg.gamma_c = j.at("gamma_c").get<double>();
        if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
        if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
        if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed config JSON: ") + e.what());
    }
    if (!(cfg.epsilon > 0.0) || cfg.epsilon >= 1.0)
        throw std::runtime_error("config: epsilon must lie in (0, 1)");
    if (cfg.trials < 1) throw std::runtime_error("config: trials must be positive");
    if (cfg.threads < 1) throw std::runtime_error("config: threads must be positive");
    if (cfg.format != "json" && cfg.format != "csv")
        throw std::runtime_error("config: format must be json or csv");
    return cfg;
}

inline json config_to_json(const ExperimentConfig& cfg) {
    json j;
    if (cfg.instance) j["instance"] = instance_to_json(*cfg.instance);
    if (!cfg.instance_path.empty()) j["instance_path"] = cfg.instance_path;
    if (cfg.generator) j["generator"] = generator_to_json(*cfg.generator);
    j["algorithm"] = to_string(cfg.algorithm);
    j["epsilon"] = cfg.epsilon;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["gamma_c"] = cfg.gamma_c;
    j["threads"] = cfg.threads;
    if (!cfg.out.empty()) j["out"] = cfg.out;
    j["format"] = cfg.format;
    return j;
}

// ─── Metrics ─────────────────────────────────────────────────────────────────

struct TrialResult {
    std::uint64_t seed = 0;
    double revenue = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN();  // revenue / W_0
    bool feasible = false;
    int violated_lower = 0;  // resources below their lower bound
    int violated_upper = 0;  // resources above their upper bound
    bool failed = false;
    std::string failure_tag;
    double xi_hat = std::numeric_limits<double>::quiet_NaN();
};

struct OfflineSummary {
    double w_expected = 0.0;  // optimum of the expected instance, no lift
    double xi_star = 0.0;
    double tau = 0.0;
    double w_tau = std::numeric_limits<double>::quiet_NaN();
    double t_star = std::numeric_limits<double>::quiet_NaN();
    double ratio_bound = std::numeric_limits<double>::quiet_NaN();  // 1 - t_star
    GammaReport gammas;
};

struct MetricsReport {
    std::string algorithm;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    OfflineSummary offline;
    std::vector<TrialResult> trials;

    double mean_revenue = 0.0;
    double mean_ratio = std::numeric_limits<double>::quiet_NaN();
    double median_ratio = std::numeric_limits<double>::quiet_NaN();
    double infeasibility_frequency = 0.0;  // fraction with any bound violated
    double failure_frequency = 0.0;        // fraction of failed trials
};

// ─── Runner ──────────────────────────────────────────────────────────────────

namespace detail {

inline Instance resolve_instance(const ExperimentConfig& cfg) {
    if (cfg.instance) return *cfg.instance;
    if (!cfg.instance_path.empty()) return load_instance(cfg.instance_path);
    if (cfg.generator) return generate_instance(*cfg.generator);
    throw std::runtime_error("config names no instance source");
}

inline TrialResult score_trial(const Instance& inst, const RunTrace& trace,
                               std::uint64_t seed, double w_expected) {
    TrialResult tr;
    tr.seed = seed;
    tr.revenue = trace.outcome.revenue;
    if (w_expected > 0.0) tr.ratio = trace.outcome.revenue / w_expected;
    tr.feasible = trace.outcome.feasible;
    for (int k = 0; k < inst.num_resources; ++k) {
        tr.violated_lower += trace.outcome.lower_ok[k] ? 0 : 1;
        tr.violated_upper += trace.outcome.upper_ok[k] ? 0 : 1;
    }
    tr.failed = trace.failed;
    tr.failure_tag = trace.failure_tag;
    tr.xi_hat = trace.xi_hat;
    return tr;
}

} // namespace detail

inline MetricsReport run_experiment(const ExperimentConfig& cfg) {
    Instance inst = detail::resolve_instance(cfg);
    auto rep_valid = validate_instance(inst);
    if (!rep_valid.ok)
        throw std::runtime_error("invalid instance: " + rep_valid.problems.front());

    MetricsReport rep;
    rep.algorithm = to_string(cfg.algorithm);
    rep.epsilon = cfg.epsilon;
    rep.seed = cfg.seed;

    // Offline references, computed once.
    auto e0 = solve_expected(inst, 0.0);
    if (e0.status != LpStatus::Optimal)
        throw std::runtime_error("expected instance infeasible at lift 0: " +
                                 std::string(to_string(e0.status)));
    rep.offline.w_expected = e0.w_beta;
    rep.offline.xi_star = measure_of_feasibility(inst).xi_star;
    rep.offline.tau = cfg.epsilon / (1.0 - cfg.epsilon);
    rep.offline.gammas = compute_gammas(inst, cfg.epsilon, cfg.gamma_c);

    auto et = solve_expected(inst, rep.offline.tau);
    if (et.status == LpStatus::Optimal) {
        rep.offline.w_tau = et.w_beta;
        if (rep.offline.xi_star > rep.offline.tau) {
            rep.offline.t_star = factor_revealing_t(inst, cfg.epsilon);
            rep.offline.ratio_bound = 1.0 - rep.offline.t_star;
        }
    }

    // Policy-specific prerequisites.
    const bool needs_lift = cfg.algorithm == Algorithm::LiftedRounding ||
                            cfg.algorithm == Algorithm::FixedTarget;
    if (needs_lift && et.status != LpStatus::Optimal)
        throw std::runtime_error(
            "strong feasibility violated: expected instance infeasible at lift tau");
    if (cfg.algorithm == Algorithm::Staged &&
        !(rep.offline.xi_star > cfg.epsilon))
        throw std::runtime_error("feasibility margin exhausted (xi <= epsilon)");
    const auto& g = rep.offline.gammas;
    const double gamma1 = g.gamma1_defined ? g.gamma1 : g.gamma1_proxy;
    const double gamma2 = g.gamma2;
    if (cfg.algorithm == Algorithm::Staged || cfg.algorithm == Algorithm::Adaptive) {
        if (!(gamma1 > 0.0))
            throw std::runtime_error("scale ratio gamma1 undefined for this instance");
        if (cfg.algorithm == Algorithm::Adaptive && !(gamma2 > 0.0))
            throw std::runtime_error("scale ratio gamma2 undefined for this instance");
    }

    auto one_trial = [&](int s) -> TrialResult {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(s);
        auto stream = sample_stream(inst, seed);
        RunTrace trace;
        switch (cfg.algorithm) {
            case Algorithm::LiftedRounding:
                trace = run_lifted_rounding(inst, stream, cfg.epsilon);
                break;
            case Algorithm::FixedTarget:
                trace = run_fixed_target(inst, stream, cfg.epsilon, rep.offline.w_tau);
                break;
            case Algorithm::Staged:
                trace = run_staged(inst, stream, cfg.epsilon, gamma1, rep.offline.xi_star);
                break;
            case Algorithm::Adaptive:
                trace = run_adaptive(inst, stream, cfg.epsilon, gamma1, gamma2);
                break;
        }
        return detail::score_trial(inst, trace, seed, rep.offline.w_expected);
    };

    rep.trials.assign(static_cast<std::size_t>(cfg.trials), TrialResult{});
    if (cfg.threads <= 1) {
        for (int s = 0; s < cfg.trials; ++s) rep.trials[s] = one_trial(s);
    } else {
        // Trials are independent; each worker owns a fixed stride of slots, so
        // the report is identical to the sequential one.
        const int n = std::min(cfg.threads, cfg.trials);
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (int w = 0; w < n; ++w)
            pool.emplace_back([&, w] {
                for (int s = w; s < cfg.trials; s += n) rep.trials[s] = one_trial(s);
            });
        for (auto& th : pool) th.join();
    }

    // Aggregates, always in seed order.
    long double rev_sum = 0.0L, ratio_sum = 0.0L;
    int infeasible = 0, failures = 0, with_ratio = 0;
    std::vector<double> ratios;
    for (const auto& tr : rep.trials) {
        rev_sum += tr.revenue;
        if (std::isfinite(tr.ratio)) {
            ratio_sum += tr.ratio;
            ratios.push_back(tr.ratio);
            ++with_ratio;
        }
        infeasible += tr.feasible ? 0 : 1;
        failures += tr.failed ? 1 : 0;
    }
    rep.mean_revenue = static_cast<double>(rev_sum / cfg.trials);
    if (with_ratio > 0) {
        rep.mean_ratio = static_cast<double>(ratio_sum / with_ratio);
        std::sort(ratios.begin(), ratios.end());
        const std::size_t h = ratios.size() / 2;
        rep.median_ratio = (ratios.size() % 2 == 1)
                               ? ratios[h]
                               : 0.5 * (ratios[h - 1] + ratios[h]);
    }
    rep.infeasibility_frequency = static_cast<double>(infeasible) / cfg.trials;
    rep.failure_frequency = static_cast<double>(failures) / cfg.trials;
    return rep;
}

// ─── Report serialization ────────────────────────────────────────────────────

namespace detail {

inline void set_if_finite(json& j, const char* key, double v) {
    if (std::isfinite(v)) j[key] = v;
}

} // namespace detail

inline json report_to_json(const MetricsReport& rep) {
    json j;
    j["algorithm"] = rep.algorithm;
    j["epsilon"] = rep.epsilon;
    j["seed"] = rep.seed;

    json off;
    off["w_expected"] = rep.offline.w_expected;
    off["xi_star"] = rep.offline.xi_star;
    off["tau"] = rep.offline.tau;
    detail::set_if_finite(off, "w_tau", rep.offline.w_tau);
    detail::set_if_finite(off, "t_star", rep.offline.t_star);
    detail::set_if_finite(off, "ratio_bound", rep.offline.ratio_bound);
    json gm;
    const auto& g = rep.offline.gammas;
    if (g.gamma_defined) gm["gamma"] = g.gamma;
    if (g.gamma1_defined) gm["gamma1"] = g.gamma1;
    if (g.gamma1_proxy_defined) gm["gamma1_proxy"] = g.gamma1_proxy;
    if (g.gamma2_defined) gm["gamma2"] = g.gamma2;
    gm["threshold"] = g.threshold;
    gm["within_regime"] = g.within_regime;
    if (!g.diagnostic.empty()) gm["diagnostic"] = g.diagnostic;
    off["scale_ratios"] = gm;
    j["offline"] = off;

    json agg;
    agg["trials"] = rep.trials.size();
    agg["mean_revenue"] = rep.mean_revenue;
    detail::set_if_finite(agg, "mean_ratio", rep.mean_ratio);
    detail::set_if_finite(agg, "median_ratio", rep.median_ratio);
    agg["infeasibility_frequency"] = rep.infeasibility_frequency;
    agg["failure_frequency"] = rep.failure_frequency;
    j["aggregates"] = agg;

    j["trials"] = json::array();
    for (const auto& tr : rep.trials) {
        json t;
        t["seed"] = tr.seed;
        t["revenue"] = tr.revenue;
        detail::set_if_finite(t, "ratio", tr.ratio);
        t["feasible"] = tr.feasible;
        t["violated_lower"] = tr.violated_lower;
        t["violated_upper"] = tr.violated_upper;
        t["failed"] = tr.failed;
        if (!tr.failure_tag.empty()) t["failure_tag"] = tr.failure_tag;
        detail::set_if_finite(t, "xi_hat", tr.xi_hat);
        j["trials"].push_back(std::move(t));
    }
    return j;
}

inline std::string report_to_csv(const MetricsReport& rep) {
    std::string out;
    char buf[512];
    auto num = [&](double v) -> std::string {
        if (!std::isfinite(v)) return "";
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    };
    out += "trial,seed,revenue,ratio,feasible,violated_lower,violated_upper,"
           "failed,failure_tag,xi_hat\n";
    for (std::size_t s = 0; s < rep.trials.size(); ++s) {
        const auto& tr = rep.trials[s];
        std::string tag = tr.failure_tag;
        for (auto& c : tag)
            if (c == ',') c = ';';
        out += std::to_string(s) + "," + std::to_string(tr.seed) + "," +
               num(tr.revenue) + "," + num(tr.ratio) + "," +
               (tr.feasible ? "1" : "0") + "," + std::to_string(tr.violated_lower) +
               "," + std::to_string(tr.violated_upper) + "," +
               (tr.failed ? "1" : "0") + "," + tag + "," + num(tr.xi_hat) + "\n";
    }
    auto agg = [&](const char* key, double v) {
        out += std::string("# ") + key + " = " + num(v) + "\n";
    };
    out += "# algorithm = " + rep.algorithm + "\n";
    agg("epsilon", rep.epsilon);
    agg("w_expected", rep.offline.w_expected);
    agg("xi_star", rep.offline.xi_star);
    if (std::isfinite(rep.offline.w_tau)) agg("w_tau", rep.offline.w_tau);
    if (std::isfinite(rep.offline.t_star)) agg("t_star", rep.offline.t_star);
    if (std::isfinite(rep.offline.ratio_bound)) agg("ratio_bound", rep.offline.ratio_bound);
    agg("mean_revenue", rep.mean_revenue);
    if (std::isfinite(rep.mean_ratio)) agg("mean_ratio", rep.mean_ratio);
    if (std::isfinite(rep.median_ratio)) agg("median_ratio", rep.median_ratio);
    agg("infeasibility_frequency", rep.infeasibility_frequency);
    agg("failure_frequency", rep.failure_frequency);
    return out;
}

} // namespace tsra
