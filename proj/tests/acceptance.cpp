//
// Acceptance gate: ten independent end-to-end checks, one verdict line each.
// Exits with the number of failed checks, so any red line fails the build.
//
// Each check re-derives its expectation from an independent oracle
// (enumeration, closed forms, long-double replay, concentration bounds) —
// never from the code under test.
//
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "tsra/cli.hpp"
#include "tsra/estimators.hpp"
#include "tsra/harness.hpp"
#include "tsra/lp.hpp"
#include "tsra/model.hpp"
#include "tsra/offline.hpp"
#include "tsra/online.hpp"
#include "tsra/rng.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace tsra;

namespace {

int g_failures = 0;

void verdict(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s  %2d. %-62s %s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// Generated instance with a guaranteed feasibility margin.
std::optional<Instance> gen_margin(std::uint64_t seed, double need, long long T) {
    for (std::uint64_t bump = 0; bump < 64; ++bump) {
        GeneratorParams gp;
        gp.num_resources = 1 + static_cast<int>((seed + bump) % 3);
        gp.num_types = 2 + static_cast<int>((seed + bump) % 3);
        gp.num_real_channels = 2 + static_cast<int>((seed + bump) % 2);
        gp.horizon = T;
        gp.seed = seed + 1000 * bump;
        Instance inst = generate_instance(gp);
        auto fm = measure_of_feasibility(inst);
        if (fm.status == LpStatus::Optimal && fm.xi_star > need) return inst;
    }
    return std::nullopt;
}

double row_residual(const LpProblem& p, const std::vector<double>& x) {
    double worst = 0.0;
    for (int r = 0; r < p.num_rows(); ++r) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) lhs += p.rows[r][j] * x[j];
        double viol = 0.0;
        if (p.senses[r] == Sense::LessEqual) viol = lhs - p.rhs[r];
        if (p.senses[r] == Sense::GreaterEqual) viol = p.rhs[r] - lhs;
        if (p.senses[r] == Sense::Equal) viol = std::abs(lhs - p.rhs[r]);
        worst = std::max(worst, viol);
    }
    for (double v : x) worst = std::max(worst, -v);
    return worst;
}

// ─── 1. simplex kernel vs vertex enumeration ─────────────────────────────────

void check_1() {
    const int n = 5, m = 5, cases = 200;
    int bad = 0;
    double worst_gap = 0.0;
    for (int t = 0; t < cases; ++t) {
        CounterRng rng(31000 + static_cast<std::uint64_t>(t), RngDomain::generator);
        std::vector<double> c(n), b(m);
        std::vector<std::vector<double>> A(m, std::vector<double>(n));
        for (auto& v : c) v = rng.uniform(-0.5, 1.0);
        for (auto& v : b) v = rng.uniform(0.5, 2.0);
        for (auto& row : A)
            for (auto& v : row) v = rng.uniform(0.1, 1.0);

        LpProblem p;
        for (int j = 0; j < n; ++j) p.add_var(c[j]);
        for (int r = 0; r < m; ++r) p.add_row(A[r], Sense::LessEqual, b[r]);

        auto s = solve_lp(p);
        auto v = oracle::vertex_enumeration_max(c, A, b);
        const double scale = 1.0 + std::abs(v.value);
        bool ok = s.status == LpStatus::Optimal && v.feasible &&
                  std::abs(s.objective - v.value) <= 1e-7 * scale &&
                  row_residual(p, s.x) <= 1e-8 * scale &&
                  std::abs(s.objective - s.dual_objective) <= 1e-6 * scale;
        // Dual certificates: sign, complementary slackness, dual feasibility.
        for (int r = 0; ok && r < m; ++r) {
            if (s.y[r] < -1e-9) ok = false;
            double slack = b[r];
            for (int j = 0; j < n; ++j) slack -= A[r][j] * s.x[j];
            if (std::abs(s.y[r] * slack) > 1e-6 * scale) ok = false;
        }
        for (int j = 0; ok && j < n; ++j) {
            double red = -c[j];
            for (int r = 0; r < m; ++r) red += A[r][j] * s.y[r];
            if (red < -1e-7 || std::abs(red * s.x[j]) > 1e-6 * scale) ok = false;
        }
        if (!ok) ++bad;
        if (s.status == LpStatus::Optimal)
            worst_gap = std::max(worst_gap, std::abs(s.objective - v.value) / scale);
    }
    verdict(1, "simplex kernel matches vertex enumeration with certificates",
            bad == 0, fmt("%d/%d programs, worst relative gap %.2e", cases - bad,
                          cases, worst_gap));
}

// ─── 2. feasibility margin: pinned values + frontier ─────────────────────────

void check_2() {
    bool ok = true;
    std::string why;

    auto pin = [&](const Instance& inst, double want, const char* tag) {
        double got = measure_of_feasibility(inst).xi_star;
        if (std::abs(got - want) > 1e-8) {
            ok = false;
            why += fmt("%s: got %.9f want %.9f; ", tag, got, want);
        }
    };
    pin(fixtures::single_channel(100, 0.2, 1.0), 0.8, "single(0.2,1.0)");
    pin(fixtures::single_channel(100, 0.0, 0.5), 0.5, "single(0.0,0.5)");
    pin(fixtures::tight_two_channel(100), 0.5, "tight pair");

    int checked = 0, frontier_bad = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto inst = gen_margin(200 + s, 0.02, 300);
        if (!inst) continue;
        double xs = measure_of_feasibility(*inst).xi_star;
        if (solve_expected(*inst, std::max(0.0, xs - 1e-6)).status != LpStatus::Optimal)
            ++frontier_bad;
        // Above the margin the lift is infeasible — unless xi sits at its cap,
        // beyond which the lift variable could not have gone anyway.
        if (xs + 1e-6 <= 1.0 &&
            solve_expected(*inst, xs + 1e-6).status == LpStatus::Optimal)
            ++frontier_bad;
        ++checked;
    }
    if (checked < 90 || frontier_bad > 0) ok = false;
    verdict(2, "feasibility margin: pinned values and two-sided frontier", ok,
            why + fmt("%d instances, %d frontier violations", checked, frontier_bad));
}

// ─── 3./4. revenue-floor certificate and factor bound ────────────────────────

void check_3_and_4() {
    const double eps = 0.1, tau = eps / (1.0 - eps);
    int checked = 0, cert_bad = 0, bound_bad = 0;
    double min_slack = 1e300, worst_excess = 0.0;

    for (std::uint64_t s = 0; s < 100; ++s) {
        auto inst = gen_margin(900 + s, tau + 0.02, 300);
        if (!inst) continue;
        double xs = measure_of_feasibility(*inst).xi_star;
        auto rep = sensitivity_check(*inst, eps);
        if (!rep.ok) ++cert_bad;
        min_slack = std::min(min_slack, rep.w_tau - rep.bound);
        const double cap = tau / xs + 1e-8;
        if (rep.t_star > cap) ++bound_bad;
        worst_excess = std::max(worst_excess, rep.t_star - tau / xs);
        ++checked;
    }

    // Tight fixture: both inequalities are equalities.
    auto tight = fixtures::tight_two_channel(100);
    auto trep = sensitivity_check(tight, eps);
    const bool tight_cert =
        std::abs(trep.w_tau - trep.bound) <= 1e-6 * (1.0 + std::abs(trep.w_tau));
    const bool tight_bound = std::abs(trep.t_star - 2.0 / 9.0) <= 1e-9;

    verdict(3, "revenue floor (1 - t*) W_0 certified on generated instances",
            checked >= 90 && cert_bad == 0 && tight_cert,
            fmt("%d instances, %d violations, min slack %.3e, tight gap %.2e",
                checked, cert_bad, min_slack, std::abs(trep.w_tau - trep.bound)));
    verdict(4, "factor bound t* <= lift/margin, exact on the tight pair",
            checked >= 90 && bound_bad == 0 && tight_bound,
            fmt("%d instances, %d violations, worst excess %.2e, tight t* = %.9f",
                checked, bound_bad, worst_excess, trep.t_star));
}

// ─── 5. realized optimum vs expected-instance optimum ────────────────────────

void check_5() {
    auto inst = fixtures::enumeration_friendly();
    auto w_e = solve_expected(inst, 0.0);
    const int trials = 2000;
    double sum = 0.0, sumsq = 0.0;
    int infeasible = 0;
    for (int t = 0; t < trials; ++t) {
        auto stream = sample_stream(inst, 40000 + static_cast<std::uint64_t>(t));
        auto res = offline_ilp_opt(inst, stream);
        if (!res.feasible) {
            ++infeasible;
            continue;
        }
        sum += res.w_r;
        sumsq += res.w_r * res.w_r;
    }
    const int n = trials - infeasible;
    const double mean = sum / n;
    const double sd = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
    const bool ok = w_e.status == LpStatus::Optimal && infeasible == 0 &&
                    mean <= w_e.w_beta + 3.0 * sd;
    verdict(5, "mean realized optimum below the expected-instance optimum", ok,
            fmt("mean %.4f vs W_0 %.4f (3sd %.4f, %d streams)", mean, w_e.w_beta,
                3.0 * sd, n));
}

// ─── 6./7. decision and potential replay ─────────────────────────────────────

void check_6_and_7() {
    int runs = 0, argmin_bad = 0, ties_bad = 0;
    long double worst_score = 0.0L, worst_pot = 0.0L;

    RunOptions opts;
    opts.record_potentials = true;
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto inst = gen_margin(5000 + 37 * s, 0.3, 2000);
        if (!inst) continue;
        auto stream = sample_stream(*inst, 777 + s);

        // Fixed-target rule at eps = 0.1.
        auto plan = solve_expected(*inst, 0.1 / 0.9);
        if (plan.status == LpStatus::Optimal) {
            auto trace = run_fixed_target(*inst, stream, 0.1, plan.w_beta, opts);
            auto rep = oracle::replay_fixed_target(*inst, stream, 0.1, plan.w_beta, trace);
            worst_score = std::max(worst_score, rep.worst_score_gap);
            worst_pot = std::max(worst_pot, rep.worst_pot_gap);
            if (rep.worst_score_gap > 1e-9L) ++argmin_bad;
            ties_bad += rep.tie_violations;
            ++runs;
        }

        // Stage-doubling rule at eps = 0.25 with the oracle margin.
        auto g = compute_gammas(*inst, 0.25);
        const double gamma1 = g.gamma1_defined ? g.gamma1 : g.gamma1_proxy;
        const double xs = measure_of_feasibility(*inst).xi_star;
        if (gamma1 > 0.0 && xs > 0.25) {
            auto trace = run_staged(*inst, stream, 0.25, gamma1, xs, opts);
            if (!trace.failed) {
                auto rep = oracle::replay_stages(*inst, stream, 0.25, trace);
                worst_score = std::max(worst_score, rep.worst_score_gap);
                worst_pot = std::max(worst_pot, rep.worst_pot_gap);
                if (rep.worst_score_gap > 1e-9L) ++argmin_bad;
                ties_bad += rep.tie_violations;
                ++runs;
            }
        }
    }
    verdict(6, "recorded decisions replay as potential argmins (ties to low index)",
            runs >= 30 && argmin_bad == 0 && ties_bad == 0,
            fmt("%d runs, worst score gap %.2Le, %d tie violations", runs,
                worst_score, ties_bad));
    verdict(7, "potential trajectories replay within 1e-10 in log space",
            runs >= 30 && worst_pot < 1e-10L,
            fmt("%d runs, worst potential gap %.2Le", runs, worst_pot));
}

// ─── 8. estimator confidence bands ───────────────────────────────────────────

void check_8() {
    GeneratorParams gp;
    gp.num_resources = 2;
    gp.num_types = 4;
    gp.num_real_channels = 2;
    gp.horizon = 200000;
    gp.seed = 81;
    gp.margin_low = 0.3;
    gp.margin_high = 0.3;
    auto inst = generate_instance(gp);

    const double eps = 0.25;
    const double T = static_cast<double>(inst.horizon);
    auto sch1 = make_stage_schedule(eps, inst.horizon, DeltaRule::KnownMargin);
    auto sch2 = make_stage_schedule(eps, inst.horizon, DeltaRule::EstimatedMargin);
    const long long t_r = sch1.t_init;  // 50000

    auto g = compute_gammas(inst, eps);
    const double gamma1 = g.gamma1_defined ? g.gamma1 : g.gamma1_proxy;
    const double xs = measure_of_feasibility(inst).xi_star;
    auto we = solve_expected(inst, eps);
    if (we.status != LpStatus::Optimal || !(gamma1 > 0.0) || !(g.gamma2 > 0.0)) {
        verdict(8, "estimator confidence bands hold at the advertised frequency",
                false, "precondition failed: instance not in the usable regime");
        return;
    }
    const double target = (static_cast<double>(t_r) / T) * we.w_beta;
    const double eps_x_obj = std::sqrt(
        4.0 * T * gamma1 *
        std::log((2.0 * inst.num_resources + 1.0) / sch1.delta) /
        static_cast<double>(t_r));

    const int trials = 300;
    int obj_in = 0, feas_in = 0;
    double feas_radius = 0.0;
    for (int t = 0; t < trials; ++t) {
        auto stream = sample_stream(inst, 60000 + static_cast<std::uint64_t>(t));
        std::span<const int> prefix(stream.types.data(), static_cast<std::size_t>(t_r));

        auto est = objective_estimator(inst, prefix, eps);
        if (est.status == LpStatus::Optimal &&
            std::abs(est.w_r - target) <= eps_x_obj * target)
            ++obj_in;

        auto fe = feas_estimator(inst, prefix, g.gamma2, sch2.delta);
        feas_radius = fe.eps_x;
        if (fe.status == LpStatus::Optimal && fe.xi_hat >= xs - 4.0 * fe.eps_x &&
            fe.xi_hat <= xs + 1e-9)
            ++feas_in;
    }
    const double obj_freq = static_cast<double>(obj_in) / trials;
    const double feas_freq = static_cast<double>(feas_in) / trials;
    const bool ok = obj_freq >= 1.0 - 2.0 * sch1.delta &&
                    feas_freq >= 1.0 - 2.0 * sch2.delta;
    verdict(8, "estimator confidence bands hold at the advertised frequency", ok,
            fmt("objective %.3f (need %.3f), margin %.3f (need %.3f), radii %.3f/%.3f",
                obj_freq, 1.0 - 2.0 * sch1.delta, feas_freq, 1.0 - 2.0 * sch2.delta,
                eps_x_obj, feas_radius));
}

// ─── 9. adaptive policy end-to-end ───────────────────────────────────────────

void check_9() {
    ExperimentConfig cfg;
    cfg.instance = fixtures::balanced_two_resource(100000, 0.72, 0.10);
    cfg.algorithm = Algorithm::Adaptive;
    cfg.epsilon = 0.25;
    cfg.trials = 200;
    cfg.seed = 7001;

    auto rep = run_experiment(cfg);
    // Binding guarantees at this scale: bound violations and failed trials
    // each stay within the epsilon budget.  The theoretical revenue floor
    // (1 - 2eps - stage losses) W_tau is nonpositive at eps = 0.25 — every
    // nonnegative revenue clears it — so it is reported, not load-bearing.
    const double floor_per_w = 1.0 - 2.0 * cfg.epsilon -
                               (1.0 + 1.0 / (rep.offline.xi_star - cfg.epsilon)) *
                                   cfg.epsilon;
    const bool revenue_ok = floor_per_w <= 0.0 || rep.mean_ratio >= floor_per_w;
    const bool ok = rep.infeasibility_frequency <= cfg.epsilon &&
                    rep.failure_frequency <= cfg.epsilon && revenue_ok;
    verdict(9, "adaptive policy: violation and failure rates within budget", ok,
            fmt("infeas %.3f, failed %.3f (budget %.2f), mean ratio %.3f, "
                "floor %.2f (vacuous when <= 0), margin %.2f",
                rep.infeasibility_frequency, rep.failure_frequency, cfg.epsilon,
                rep.mean_ratio, floor_per_w, rep.offline.xi_star));
}

// ─── 10. byte-identical reruns ───────────────────────────────────────────────

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "tsra");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

void check_10() {
    const std::string inst = "/tmp/tsra_accept_inst.json";
    const std::string o1 = "/tmp/tsra_accept_r1.json";
    const std::string o2 = "/tmp/tsra_accept_r2.json";
    const std::string c1 = "/tmp/tsra_accept_r1.csv";
    const std::string c2 = "/tmp/tsra_accept_r2.csv";

    int rc = cli({"gen", "-K", "2", "-J", "3", "-T", "20000", "--seed", "17",
                  "-o", inst});
    auto run = [&](const std::string& out, const std::string& format) {
        return cli({"run", "-i", inst, "-a", "adaptive", "-e", "0.25", "-n", "6",
                    "--seed", "90", "-f", format, "-o", out});
    };
    rc |= run(o1, "json");
    rc |= run(o2, "json");
    rc |= run(c1, "csv");
    rc |= run(c2, "csv");

    const bool ok = rc == 0 && !slurp(o1).empty() && slurp(o1) == slurp(o2) &&
                    !slurp(c1).empty() && slurp(c1) == slurp(c2);
    verdict(10, "report runs are byte-identical across reruns", ok,
            fmt("rc %d, json %zu bytes, csv %zu bytes", rc, slurp(o1).size(),
                slurp(c1).size()));
}

} // namespace

int main() {
    std::printf("acceptance gate: ten checks\n");
    check_1();
    check_2();
    check_3_and_4();
    check_5();
    check_6_and_7();
    check_8();
    check_9();
    check_10();
    std::printf("%d/10 passed\n", 10 - g_failures);
    return g_failures;
}
