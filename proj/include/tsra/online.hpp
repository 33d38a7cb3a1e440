#pragma once
//
// Online allocation policies.
//
// Four policies share the same contract: walk the request stream once, commit
// a channel per round, never look ahead, and leave a full audit trail
// (decisions, per-stage records, optional potential trajectories) so tests can
// replay every choice.
//
//   run_lifted_rounding  randomized rounding of the lifted expected-instance
//                        plan: route type j to channel i with probability
//                        (1-eps) x*[i][j].
//   run_fixed_target     potential-based rule that needs the lifted optimum
//                        W_tau up front.  Three exponential potential families
//                        track upper bounds, lower bounds and a revenue floor;
//                        each round picks the channel minimizing the summed
//                        potentials, then updates multiplicatively with the
//                        realized consumption/revenue.
//   run_staged           stage-doubling variant that learns the revenue target
//                        from its own history (needs the margin xi and scale
//                        ratio gamma1).
//   run_adaptive         additionally estimates the margin from the
//                        observation stage (needs gamma1 and gamma2 only).
//
// Potentials are kept in log space throughout; scores are evaluated with a
// max-shifted exponential sum, so comparisons stay finite no matter how far
// the potentials drift.  Ties in the argmin go to the smallest channel index
// (the no-pick channel is index 0).
//
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "estimators.hpp"
#include "lp.hpp"
#include "model.hpp"
#include "offline.hpp"
#include "rng.hpp"

namespace tsra {

// ─── Stage schedule ──────────────────────────────────────────────────────────

enum class DeltaRule { KnownMargin, EstimatedMargin };  // A1: eps/3l, A2: eps/(3l+2)

struct StageSchedule {
    double epsilon = 0.0;
    long long horizon = 0;
    int l = 0;                     // number of serving stages
    double delta = 0.0;            // per-use failure budget
    long long t_init = 0;          // observation-stage length (stage -1)
    std::vector<long long> t;      // serving-stage lengths, sum + t_init == horizon

    long long stage_begin(int r) const {  // r in [0, l)
        long long b = t_init;
        for (int s = 0; s < r; ++s) b += t[s];
        return b;
    }
};

// l = ceil(log2(1/eps)) serving stages of nominal length eps*2^r*T, preceded
// by an observation stage of floor(eps*T) rounds; the final stage is truncated
// (or extended) so the lengths sum exactly to the horizon.
inline StageSchedule make_stage_schedule(double epsilon, long long horizon,
                                         DeltaRule rule) {
    if (!(epsilon > 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    if (horizon < 1) throw std::invalid_argument("horizon must be positive");

    StageSchedule sch;
    sch.epsilon = epsilon;
    sch.horizon = horizon;

    // Smallest l with 2^l * eps >= 1, computed in integers to dodge roundoff.
    int l = 0;
    while (l < 62 && std::ldexp(epsilon, l) < 1.0 - 1e-12) ++l;
    sch.l = std::max(l, 1);
    sch.delta = (rule == DeltaRule::KnownMargin)
                    ? epsilon / (3.0 * sch.l)
                    : epsilon / (3.0 * sch.l + 2.0);

    const double T = static_cast<double>(horizon);
    sch.t_init = static_cast<long long>(std::floor(epsilon * T));
    if (sch.t_init < 1)
        throw std::invalid_argument("horizon too short: observation stage would be empty");

    long long used = sch.t_init;
    sch.t.assign(sch.l, 0);
    for (int r = 0; r + 1 < sch.l; ++r) {
        sch.t[r] = static_cast<long long>(std::floor(std::ldexp(epsilon, r) * T));
        used += sch.t[r];
    }
    sch.t[sch.l - 1] = horizon - used;
    if (sch.t[sch.l - 1] < 1)
        throw std::invalid_argument("horizon too short: final stage would be empty");
    return sch;
}

// ─── Run traces ──────────────────────────────────────────────────────────────

struct StageRecord {
    int r = 0;
    std::size_t begin = 0, end = 0;  // request index window of this stage
    double w_prev = 0.0;             // previous stage's sampled optimum
    LpStatus est_status = LpStatus::Infeasible;
    StageParams params;
};

struct RunOptions {
    bool record_potentials = false;  // keep per-round log-potential snapshots
};

struct RunTrace {
    std::vector<int> decisions;   // one channel per round (0 where unserved)
    AllocationOutcome outcome;    // scored over the whole horizon
    std::size_t served_begin = 0, served_end = 0;
    bool failed = false;
    std::string failure_tag;
    std::vector<StageRecord> stages;     // empty for the single-shot rules
    LpStatus feas_status = LpStatus::Optimal;  // the adaptive rule's margin estimator
    double xi_hat = std::numeric_limits<double>::quiet_NaN();

    // Per served round, after that round's update (when recording).
    bool recorded = false;
    std::vector<std::vector<double>> log_phi_steps;
    std::vector<std::vector<double>> log_varphi_steps;
    std::vector<double> log_psi_steps;
};

// ─── Randomized rounding of the lifted policy ────────────────────────────────

inline RunTrace run_lifted_rounding(const Instance& inst, const RequestStream& stream,
                           double epsilon) {
    if (!(epsilon > 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    if (static_cast<long long>(stream.types.size()) != inst.horizon)
        throw std::invalid_argument("stream length != horizon");

    const double tau = epsilon / (1.0 - epsilon);
    auto plan = solve_expected(inst, tau);
    if (plan.status != LpStatus::Optimal)
        throw std::runtime_error(
            "strong feasibility violated: expected instance infeasible at lift tau");

    // Per type: cumulative routing probabilities (1-eps) x*[i][j] over real
    // channels; any remainder falls to the no-pick channel.
    const int I = inst.num_channels(), J = inst.num_types;
    std::vector<std::vector<double>> cum(J, std::vector<double>(I, 0.0));
    for (int j = 0; j < J; ++j) {
        double acc = 0.0;
        for (int i = 1; i < I; ++i) {
            acc += (1.0 - epsilon) * std::max(0.0, plan.x[i][j]);
            cum[j][i] = acc;
        }
    }

    RunTrace trace;
    trace.decisions.assign(stream.types.size(), 0);
    trace.served_end = stream.types.size();
    for (std::size_t t = 0; t < stream.types.size(); ++t) {
        int j = stream.types[t];
        double u = rng_uniform(stream.seed, RngDomain::routing, static_cast<std::uint64_t>(t));
        int pick = 0;
        for (int i = 1; i < I; ++i)
            if (u < cum[j][i]) { pick = i; break; }
        trace.decisions[t] = pick;
    }
    trace.outcome = evaluate_outcome(inst, stream, trace.decisions);
    return trace;
}

// ─── Potential rule with a known revenue target ──────────────────────────────

struct FixedTargetRates {
    std::vector<double> c1;  // -ln(1-eps)/a_bar_k, 0 where a_bar_k == 0
    double c2 = 0.0;         // -ln(1-eps)/w_bar, 0 if w_bar == 0
};

inline FixedTargetRates fixed_target_rates(const Instance& inst, double epsilon) {
    FixedTargetRates r;
    r.c1.assign(inst.num_resources, 0.0);
    const double lrate = -std::log1p(-epsilon);
    for (int k = 0; k < inst.num_resources; ++k)
        if (inst.a_bar[k] > 0.0) r.c1[k] = lrate / inst.a_bar[k];
    if (inst.w_bar > 0.0) r.c2 = lrate / inst.w_bar;
    return r;
}

namespace detail {

// Argmin over channels of sum_t exp(term[t][i]), evaluated max-shifted.
// `terms` is a flat [n_terms][I] array.  Ties go to the smallest index.
inline int argmin_shifted(const std::vector<double>& terms, int n_terms, int I) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : terms) m = std::max(m, v);
    int best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (int i = 0; i < I; ++i) {
        double s = 0.0;
        for (int t = 0; t < n_terms; ++t) s += std::exp(terms[t * I + i] - m);
        if (s < best_score) { best_score = s; best = i; }
    }
    return best;
}

inline void record_step(RunTrace& trace, const std::vector<double>& lphi,
                        const std::vector<double>& lvarphi, double lpsi) {
    trace.log_phi_steps.push_back(lphi);
    trace.log_varphi_steps.push_back(lvarphi);
    trace.log_psi_steps.push_back(lpsi);
}

} // namespace detail

// Single-stage potential rule.  Needs the lifted optimum w_tau (tau =
// eps/(1-eps)), typically supplied by the offline oracle.
inline RunTrace run_fixed_target(const Instance& inst, const RequestStream& stream,
                         double epsilon, double w_tau, const RunOptions& opts = {}) {
    if (!(epsilon > 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    if (static_cast<long long>(stream.types.size()) != inst.horizon)
        throw std::invalid_argument("stream length != horizon");

    const int I = inst.num_channels(), K = inst.num_resources;
    const double T = static_cast<double>(inst.horizon);
    const auto rates = fixed_target_rates(inst, epsilon);
    const bool rev_on = rates.c2 > 0.0;
    const double rev_target = (1.0 - 2.0 * epsilon) * w_tau / T;

    std::vector<double> lphi(K, 0.0), lvarphi(K, 0.0);
    double lpsi = 0.0;

    RunTrace trace;
    trace.decisions.assign(stream.types.size(), 0);
    trace.served_end = stream.types.size();
    trace.recorded = opts.record_potentials;

    const int n_terms = 2 * K + (rev_on ? 1 : 0);
    std::vector<double> terms(static_cast<std::size_t>(n_terms) * I);
    for (std::size_t t = 0; t < stream.types.size(); ++t) {
        const int j = stream.types[t];
        for (int i = 0; i < I; ++i) {
            for (int k = 0; k < K; ++k) {
                terms[k * I + i] =
                    lphi[k] + rates.c1[k] * (inst.cons[i][j][k] - inst.upper[k] / T);
                terms[(K + k) * I + i] =
                    lvarphi[k] + rates.c1[k] * (inst.lower[k] / T - inst.cons[i][j][k]);
            }
            if (rev_on)
                terms[2 * K * I + i] = lpsi + rates.c2 * (rev_target - inst.revenue[i][j]);
        }
        const int pick = detail::argmin_shifted(terms, n_terms, I);
        trace.decisions[t] = pick;
        for (int k = 0; k < K; ++k) {
            lphi[k] += rates.c1[k] * (inst.cons[pick][j][k] - inst.upper[k] / T);
            lvarphi[k] += rates.c1[k] * (inst.lower[k] / T - inst.cons[pick][j][k]);
        }
        if (rev_on) lpsi += rates.c2 * (rev_target - inst.revenue[pick][j]);
        if (trace.recorded) detail::record_step(trace, lphi, lvarphi, lpsi);
    }
    trace.outcome = evaluate_outcome(inst, stream, trace.decisions);
    return trace;
}

// ─── Stage-doubling variants ─────────────────────────────────────────────────

namespace detail {

// Serving stages shared by the known-margin and estimated-margin variants.
// Stage r re-estimates the sampled optimum from stage r-1's requests, derives
// its potential parameters, then runs the potential rule over its window.
// On an estimator failure the trial is marked failed and the remaining rounds
// stay on the no-pick channel.
inline void run_stage_loop(const Instance& inst, const RequestStream& stream,
                           const StageSchedule& sch, double gamma1, double xi,
                           RunTrace& trace, const RunOptions& opts) {
    const int I = inst.num_channels(), K = inst.num_resources;
    const double T = static_cast<double>(inst.horizon);
    const double eps = sch.epsilon;

    trace.served_begin = static_cast<std::size_t>(sch.t_init);
    trace.served_end = stream.types.size();
    trace.recorded = opts.record_potentials;

    for (int r = 0; r < sch.l; ++r) {
        const long long prev_begin = (r == 0) ? 0 : sch.stage_begin(r - 1);
        const long long prev_len = (r == 0) ? sch.t_init : sch.t[r - 1];
        const long long begin = sch.stage_begin(r);
        const long long len = sch.t[r];

        StageRecord rec;
        rec.r = r;
        rec.begin = static_cast<std::size_t>(begin);
        rec.end = static_cast<std::size_t>(begin + len);

        auto est = objective_estimator(
            inst,
            std::span<const int>(stream.types.data() + prev_begin,
                                 static_cast<std::size_t>(prev_len)),
            eps);
        rec.est_status = est.status;
        rec.w_prev = est.w_r;
        if (est.status != LpStatus::Optimal) {
            trace.stages.push_back(rec);
            trace.failed = true;
            trace.failure_tag = "objective estimator " +
                                std::string(to_string(est.status)) + " at stage " +
                                std::to_string(r);
            return;  // remaining rounds stay on the no-pick channel
        }

        const StageParams sp =
            stage_params(inst, len, prev_len, est.w_r, xi, eps, gamma1, sch.delta);
        rec.params = sp;
        trace.stages.push_back(rec);

        // Per-stage targets (per-round units).
        std::vector<double> up_g(K), low_g(K);
        for (int k = 0; k < K; ++k) {
            up_g[k] = (1.0 + sp.eps_x) * inst.upper[k] / T;
            low_g[k] = (1.0 + sp.eps_x) *
                       ((1.0 - eps) * T * inst.a_bar[k] - inst.lower[k]) / T;
        }
        const double rev_g = sp.revenue_active ? (1.0 - sp.eps_y) * sp.z_r / T : 0.0;

        std::vector<double> lphi(K, sp.log_phi0), lvarphi(K, sp.log_phi0);
        double lpsi = sp.log_psi0;

        const int n_terms = 2 * K + (sp.revenue_active ? 1 : 0);
        std::vector<double> terms(static_cast<std::size_t>(n_terms) * I);
        for (long long t = begin; t < begin + len; ++t) {
            const int j = stream.types[static_cast<std::size_t>(t)];
            for (int i = 0; i < I; ++i) {
                for (int k = 0; k < K; ++k) {
                    terms[k * I + i] = lphi[k] + sp.c1[k] * (inst.cons[i][j][k] - up_g[k]);
                    terms[(K + k) * I + i] =
                        lvarphi[k] +
                        sp.c1[k] * ((inst.a_bar[k] - inst.cons[i][j][k]) - low_g[k]);
                }
                if (sp.revenue_active)
                    terms[2 * K * I + i] = lpsi + sp.c2 * (rev_g - inst.revenue[i][j]);
            }
            const int pick = argmin_shifted(terms, n_terms, I);
            trace.decisions[static_cast<std::size_t>(t)] = pick;
            for (int k = 0; k < K; ++k) {
                lphi[k] += sp.c1[k] * (inst.cons[pick][j][k] - up_g[k]) + sp.drift_x;
                lvarphi[k] +=
                    sp.c1[k] * ((inst.a_bar[k] - inst.cons[pick][j][k]) - low_g[k]) +
                    sp.drift_x;
            }
            if (sp.revenue_active)
                lpsi += sp.c2 * (rev_g - inst.revenue[pick][j]) + sp.drift_y;
            if (trace.recorded) record_step(trace, lphi, lvarphi, lpsi);
        }
    }
}

} // namespace detail

// Stage-doubling rule with a known feasibility margin xi (> epsilon, or the
// call refuses to start).  The observation stage is never served.
inline RunTrace run_staged(const Instance& inst, const RequestStream& stream,
                          double epsilon, double gamma1, double xi,
                          const RunOptions& opts = {}) {
    if (static_cast<long long>(stream.types.size()) != inst.horizon)
        throw std::invalid_argument("stream length != horizon");
    if (!(xi > epsilon)) throw std::runtime_error("feasibility margin exhausted (xi <= epsilon)");

    auto sch = make_stage_schedule(epsilon, inst.horizon, DeltaRule::KnownMargin);
    RunTrace trace;
    trace.decisions.assign(stream.types.size(), 0);
    trace.xi_hat = xi;
    detail::run_stage_loop(inst, stream, sch, gamma1, xi, trace, opts);
    trace.outcome = evaluate_outcome(inst, stream, trace.decisions);
    return trace;
}

// Fully adaptive rule: estimates the margin from the observation stage, then
// runs the stage loop with it.  A margin estimate at or below epsilon marks
// the trial failed (everything stays on the no-pick channel).
inline RunTrace run_adaptive(const Instance& inst, const RequestStream& stream,
                          double epsilon, double gamma1, double gamma2,
                          const RunOptions& opts = {}) {
    if (static_cast<long long>(stream.types.size()) != inst.horizon)
        throw std::invalid_argument("stream length != horizon");

    auto sch = make_stage_schedule(epsilon, inst.horizon, DeltaRule::EstimatedMargin);
    RunTrace trace;
    trace.decisions.assign(stream.types.size(), 0);
    trace.served_begin = static_cast<std::size_t>(sch.t_init);
    trace.served_end = stream.types.size();

    auto fe = feas_estimator(
        inst,
        std::span<const int>(stream.types.data(), static_cast<std::size_t>(sch.t_init)),
        gamma2, sch.delta);
    trace.feas_status = fe.status;
    trace.xi_hat = fe.xi_hat;
    if (fe.status != LpStatus::Optimal) {
        trace.failed = true;
        trace.failure_tag = "feasibility estimator " + std::string(to_string(fe.status));
        trace.outcome = evaluate_outcome(inst, stream, trace.decisions);
        return trace;
    }
    if (!(fe.xi_hat > epsilon)) {
        trace.failed = true;
        trace.failure_tag = "feasibility margin exhausted (estimated)";
        trace.outcome = evaluate_outcome(inst, stream, trace.decisions);
        return trace;
    }

    detail::run_stage_loop(inst, stream, sch, gamma1, fe.xi_hat, trace, opts);
    trace.outcome = evaluate_outcome(inst, stream, trace.decisions);
    return trace;
}

} // namespace tsra
