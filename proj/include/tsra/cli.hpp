#pragma once
//
// Command-line front end.
//
//   tsra gen           generate a synthetic instance (JSON to stdout or --out)
//   tsra offline       solve the expected instance and feasibility margin
//   tsra factor-check  certify the revenue ratio for a target epsilon
//   tsra run           run an online policy over sampled streams
//   tsra bench         compare all four policies on one instance
//
// Exit codes: 0 success, 1 usage/config/input errors, 2 when the requested
// analysis is impossible on this instance (expected instance infeasible,
// feasibility margin at or below epsilon, scale ratios undefined).
//
// cli_main is a plain function so tests can drive the binary's exact code
// path in process.
//
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "harness.hpp"
#include "io.hpp"
#include "model.hpp"
#include "offline.hpp"

namespace tsra {

namespace cli_detail {

inline void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

inline void emit_json(const json& j, const std::string& out_path) {
    emit(j.dump(2), out_path);
}

// ─── gen ─────────────────────────────────────────────────────────────────────

inline int cmd_gen(const GeneratorParams& gp, const std::string& out_path) {
    auto inst = generate_instance(gp);
    emit_json(instance_to_json(inst), out_path);
    return 0;
}

// ─── offline ─────────────────────────────────────────────────────────────────

inline int cmd_offline(const std::string& instance_path, double beta,
                       bool with_policy, const std::string& out_path) {
    auto inst = load_instance(instance_path);
    auto sol = solve_expected(inst, beta);
    auto feas = measure_of_feasibility(inst);

    json j;
    j["beta"] = beta;
    j["status"] = to_string(sol.status);
    if (sol.status == LpStatus::Optimal) j["w_beta"] = sol.w_beta;
    j["xi_star"] = feas.xi_star;
    if (with_policy && sol.status == LpStatus::Optimal) j["policy"] = sol.x;
    emit_json(j, out_path);
    return sol.status == LpStatus::Optimal ? 0 : 2;
}

// ─── factor-check ────────────────────────────────────────────────────────────

inline int cmd_factor_check(const std::string& instance_path, double epsilon,
                            const std::string& out_path) {
    auto inst = load_instance(instance_path);
    auto feas = measure_of_feasibility(inst);
    const double tau = epsilon / (1.0 - epsilon);

    json j;
    j["epsilon"] = epsilon;
    j["tau"] = tau;
    j["xi_star"] = feas.xi_star;
    if (!(feas.xi_star > tau)) {
        j["ok"] = false;
        j["reason"] = "feasibility margin at or below the lift tau";
        emit_json(j, out_path);
        return 2;
    }
    auto rep = sensitivity_check(inst, epsilon);
    j["w_expected"] = rep.w_e;
    j["w_tau"] = rep.w_tau;
    j["t_star"] = rep.t_star;
    j["certified_ratio"] = 1.0 - rep.t_star;
    j["certified_floor"] = rep.bound;
    j["ok"] = rep.ok;
    emit_json(j, out_path);
    return rep.ok ? 0 : 2;
}

// ─── run ─────────────────────────────────────────────────────────────────────

inline int cmd_run(const ExperimentConfig& cfg) {
    auto rep = run_experiment(cfg);
    if (cfg.format == "csv")
        emit(report_to_csv(rep), cfg.out);
    else
        emit_json(report_to_json(rep), cfg.out);
    return 0;
}

// ─── bench ───────────────────────────────────────────────────────────────────

inline int cmd_bench(ExperimentConfig cfg) {
    std::printf("%-14s %12s %12s %10s %10s %9s\n", "algorithm", "mean_ratio",
                "median", "infeas", "fail", "ms");
    for (auto alg : {Algorithm::LiftedRounding, Algorithm::FixedTarget,
                     Algorithm::Staged, Algorithm::Adaptive}) {
        cfg.algorithm = alg;
        const auto start = std::chrono::steady_clock::now();
        try {
            auto rep = run_experiment(cfg);
            const double ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
            std::printf("%-14s %12.4f %12.4f %10.3f %10.3f %9.1f\n",
                        to_string(alg), rep.mean_ratio, rep.median_ratio,
                        rep.infeasibility_frequency, rep.failure_frequency, ms);
        } catch (const std::exception& e) {
            std::printf("%-14s  skipped: %s\n", to_string(alg), e.what());
        }
    }
    return 0;
}

} // namespace cli_detail

inline int cli_main(int argc, char** argv) {
    CLI::App app{"two-sided online resource allocation toolkit"};
    app.require_subcommand(1);

    // gen
    GeneratorParams gp;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "generate a synthetic instance");
    gen->add_option("-K,--resources", gp.num_resources, "number of resources");
    gen->add_option("-J,--types", gp.num_types, "number of request types");
    gen->add_option("--channels", gp.num_real_channels, "real channels (excludes no-pick)");
    gen->add_option("-T,--horizon", gp.horizon, "number of rounds");
    gen->add_option("--seed", gp.seed, "generator seed");
    gen->add_option("--margin-low", gp.margin_low, "slack below the witness consumption");
    gen->add_option("--margin-high", gp.margin_high, "slack above the witness consumption");
    gen->add_option("-o,--out", gen_out, "output path (default stdout)");

    // offline
    std::string off_instance, off_out;
    double off_beta = 0.0;
    bool off_policy = false;
    auto* off = app.add_subcommand("offline", "expected optimum and feasibility margin");
    off->add_option("-i,--instance", off_instance, "instance JSON path")->required();
    off->add_option("--beta", off_beta, "lower-bound lift in [0, 1]");
    off->add_flag("--policy", off_policy, "include the optimal policy matrix");
    off->add_option("-o,--out", off_out, "output path (default stdout)");

    // factor-check
    std::string fc_instance, fc_out;
    double fc_epsilon = 0.25;
    auto* fc = app.add_subcommand("factor-check", "certify the revenue ratio at epsilon");
    fc->add_option("-i,--instance", fc_instance, "instance JSON path")->required();
    fc->add_option("-e,--epsilon", fc_epsilon, "accuracy parameter in (0, 1)");
    fc->add_option("-o,--out", fc_out, "output path (default stdout)");

    // run / bench share most flags
    std::string run_config, run_instance, run_alg, run_out, run_format;
    double run_epsilon = -1.0, run_gamma_c = -1.0;
    int run_trials = -1, run_threads = -1;
    long long run_seed = -1;
    auto add_run_flags = [&](CLI::App* c) {
        c->add_option("-c,--config", run_config, "experiment config JSON path");
        c->add_option("-i,--instance", run_instance, "instance JSON path (overrides config)");
        c->add_option("-a,--alg", run_alg,
                      "policy: rounding, fixed-target, staged, adaptive");
        c->add_option("-e,--epsilon", run_epsilon, "accuracy parameter in (0, 1)");
        c->add_option("-n,--trials", run_trials, "number of independent streams");
        c->add_option("--seed", run_seed, "base stream seed");
        c->add_option("--gamma-c", run_gamma_c, "regime threshold coefficient");
        c->add_option("--threads", run_threads, "worker threads");
    };
    auto* run = app.add_subcommand("run", "run an online policy over sampled streams");
    add_run_flags(run);
    run->add_option("-o,--out", run_out, "report path (default stdout)");
    run->add_option("-f,--format", run_format, "report format: json or csv");

    auto* bench = app.add_subcommand("bench", "compare all policies on one instance");
    add_run_flags(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // --help/--version are successes
    }

    // Input handling: bad paths, malformed JSON, invalid instances or configs
    // are usage errors (1); an impossible analysis on valid input is 2.
    try {
        if (gen->parsed()) return cli_detail::cmd_gen(gp, gen_out);
        if (off->parsed())
            return cli_detail::cmd_offline(off_instance, off_beta, off_policy, off_out);
        if (fc->parsed()) return cli_detail::cmd_factor_check(fc_instance, fc_epsilon, fc_out);

        ExperimentConfig cfg;
        if (!run_config.empty()) cfg = config_from_json(load_json_file(run_config));
        if (!run_instance.empty()) {
            cfg.instance.reset();
            cfg.generator.reset();
            cfg.instance_path = run_instance;
        }
        if (!cfg.instance && cfg.instance_path.empty() && !cfg.generator)
            throw std::invalid_argument("no instance: pass --config or --instance");
        if (!run_alg.empty()) cfg.algorithm = parse_algorithm(run_alg);
        if (run_epsilon >= 0.0) cfg.epsilon = run_epsilon;
        if (run_trials >= 0) cfg.trials = run_trials;
        if (run_seed >= 0) cfg.seed = static_cast<std::uint64_t>(run_seed);
        if (run_gamma_c >= 0.0) cfg.gamma_c = run_gamma_c;
        if (run_threads >= 0) cfg.threads = run_threads;
        if (!run_out.empty()) cfg.out = run_out;
        if (!run_format.empty()) cfg.format = run_format;
        if (!(cfg.epsilon > 0.0) || cfg.epsilon >= 1.0)
            throw std::invalid_argument("epsilon must lie in (0, 1)");
        if (cfg.format != "json" && cfg.format != "csv")
            throw std::invalid_argument("format must be json or csv");

        if (run->parsed()) return cli_detail::cmd_run(cfg);
        return cli_detail::cmd_bench(cfg);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        std::fprintf(stderr, "error: %s\n", what.c_str());
        // Input problems are usage errors; analysis impossibilities are not.
        const bool usage = what.find("cannot open") != std::string::npos ||
                           what.find("cannot parse") != std::string::npos ||
                           what.find("malformed") != std::string::npos ||
                           what.find("invalid instance") != std::string::npos ||
                           what.find("config") != std::string::npos;
        return usage ? 1 : 2;
    }
}

} // namespace tsra
