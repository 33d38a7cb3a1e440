#pragma once
//
// Estimation from observed requests.
//
// Both estimators solve the sampled analog of the expected instance over the
// t_r requests seen so far, with every bound scaled by t_r/T.  Requests are
// collapsed by type first (counts n_j); by an averaging argument the collapsed
// program has exactly the per-request optimum, and it stays desk-scale no
// matter how long the horizon is.
//
// Confidence radii (delta = per-use failure budget, K resources):
//   objective bands  eps_x = sqrt( 4 T gamma1 ln((2K+1)/delta) / t_r )
//   feasibility band eps_x = sqrt( 4 T gamma2 ln( K   /delta) / t_r )
// The log arguments differ between the two uses on purpose; they are kept
// exactly as each bound requires.
//
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lp.hpp"
#include "model.hpp"

namespace tsra {

namespace detail {

inline std::vector<long long> type_counts(const Instance& inst,
                                          std::span<const int> requests) {
    std::vector<long long> n(inst.num_types, 0);
    for (int j : requests) {
        if (j < 0 || j >= inst.num_types) throw std::invalid_argument("unknown type index");
        ++n[j];
    }
    return n;
}

// Sampled program over type counts.  Variables are x[i][j] for present types
// (plus an optional lift variable); rows mirror the expected instance with
// bounds scaled by t_r/T.
struct SampledLp {
    LpProblem lp;
    std::vector<int> types;               // present types, in index order
    std::vector<std::vector<int>> var;    // [I][J] -> column or -1
    int xi_col = -1;
};

inline SampledLp build_sampled_lp(const Instance& inst,
                                  const std::vector<long long>& counts,
                                  double t_r, double beta, bool with_xi) {
    const int K = inst.num_resources, J = inst.num_types, I = inst.num_channels();
    const double T = static_cast<double>(inst.horizon);
    const double scale = t_r / T;

    SampledLp s;
    s.var.assign(I, std::vector<int>(J, -1));
    for (int j = 0; j < J; ++j)
        if (counts[j] > 0) s.types.push_back(j);
    for (int i = 0; i < I; ++i)
        for (int j : s.types)
            s.var[i][j] = s.lp.add_var(with_xi ? 0.0
                                               : static_cast<double>(counts[j]) *
                                                     inst.revenue[i][j]);
    if (with_xi) s.xi_col = s.lp.add_var(1.0, 0.0, 1.0);

    for (int k = 0; k < K; ++k) {
        std::vector<double> row(s.lp.num_vars(), 0.0);
        for (int i = 0; i < I; ++i)
            for (int j : s.types)
                row[s.var[i][j]] = static_cast<double>(counts[j]) * inst.cons[i][j][k];
        s.lp.add_row(row, Sense::LessEqual, scale * inst.upper[k]);
    }
    for (int k = 0; k < K; ++k) {
        std::vector<double> row(s.lp.num_vars(), 0.0);
        for (int i = 0; i < I; ++i)
            for (int j : s.types)
                row[s.var[i][j]] = static_cast<double>(counts[j]) * inst.cons[i][j][k];
        if (with_xi) row[s.xi_col] = -t_r * inst.a_bar[k];
        double lift = with_xi ? 0.0 : beta * T * inst.a_bar[k];
        s.lp.add_row(row, Sense::GreaterEqual, scale * (inst.lower[k] + lift));
    }
    for (int j : s.types) {
        std::vector<double> row(s.lp.num_vars(), 0.0);
        for (int i = 0; i < I; ++i) row[s.var[i][j]] = 1.0;
        s.lp.add_row(row, Sense::LessEqual, 1.0);
    }
    return s;
}

} // namespace detail

struct ObjectiveEstimate {
    LpStatus status = LpStatus::Infeasible;
    double w_r = 0.0;  // optimum of the sampled program; 0 unless Optimal
};

// Optimum of the sampled program at lift beta over the given requests.
// Concentration: w_r tracks (t_r/T) * W_beta within the eps_x band above.
inline ObjectiveEstimate objective_estimator(const Instance& inst,
                                             std::span<const int> requests,
                                             double beta) {
    if (requests.empty()) throw std::invalid_argument("estimator needs at least one request");
    auto counts = detail::type_counts(inst, requests);
    auto s = detail::build_sampled_lp(inst, counts,
                                      static_cast<double>(requests.size()), beta, false);
    auto sol = solve_lp(s.lp);
    ObjectiveEstimate out;
    out.status = sol.status;
    if (sol.status == LpStatus::Optimal) out.w_r = sol.objective;
    return out;
}

struct FeasibilityEstimate {
    LpStatus status = LpStatus::Infeasible;
    double xi_max = 0.0;  // optimum of the sampled margin program
    double xi_hat = 0.0;  // xi_max - 2 eps_x, clipped to [0, 1]
    double eps_x = 0.0;
};

// Sampled feasibility margin with its one-sided correction: with probability
// 1 - 2 delta the estimate lands in [xi_star - 4 eps_x, xi_star].
inline FeasibilityEstimate feas_estimator(const Instance& inst,
                                          std::span<const int> requests,
                                          double gamma2, double delta) {
    if (requests.empty()) throw std::invalid_argument("estimator needs at least one request");
    if (!(gamma2 > 0.0)) throw std::invalid_argument("gamma2 must be positive");
    if (!(delta > 0.0) || delta >= 1.0) throw std::invalid_argument("delta must lie in (0, 1)");

    const double T = static_cast<double>(inst.horizon);
    const double t_r = static_cast<double>(requests.size());
    FeasibilityEstimate out;
    out.eps_x = std::sqrt(4.0 * gamma2 * T *
                          std::log(static_cast<double>(inst.num_resources) / delta) / t_r);

    auto counts = detail::type_counts(inst, requests);
    auto s = detail::build_sampled_lp(inst, counts, t_r, 0.0, true);
    auto sol = solve_lp(s.lp);
    out.status = sol.status;
    if (sol.status != LpStatus::Optimal) return out;
    out.xi_max = sol.objective;
    out.xi_hat = std::min(1.0, std::max(0.0, out.xi_max - 2.0 * out.eps_x));
    return out;
}

// Per-stage potential parameters for the adaptive allocation loop.
struct StageParams {
    long long t_r = 0;
    double z_r = 0.0;        // lower confidence scaling of the revenue target
    double eps_x = 0.0;      // resource confidence radius at t_r
    double eps_y = 0.0;      // revenue confidence radius at t_r
    std::vector<double> c1;  // per-resource rate ln(1+eps_x)/a_bar_k (0 if a_bar_k = 0)
    double c2 = 0.0;         // revenue rate ln(1+eps_y)/w_bar
    bool revenue_active = false;
    double log_phi0 = 0.0;   // initial log potential, resource side (both kinds)
    double log_psi0 = 0.0;   // initial log potential, revenue side
    double drift_x = 0.0;    // additive per-round drift in log space
    double drift_y = 0.0;
};

// Computes the stage-r parameters from the previous stage's estimate w_prev
// (over t_prev requests).  Requires a usable margin xi > epsilon; throws
// "feasibility margin exhausted" otherwise.
inline StageParams stage_params(const Instance& inst, long long t_r, long long t_prev,
                                double w_prev, double xi, double epsilon,
                                double gamma1, double delta) {
    if (!(epsilon > 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    if (!(gamma1 > 0.0)) throw std::invalid_argument("gamma1 must be positive");
    if (!(delta > 0.0) || delta >= 1.0) throw std::invalid_argument("delta must lie in (0, 1)");
    if (t_r < 1 || t_prev < 1) throw std::invalid_argument("stage lengths must be positive");
    if (!(xi > epsilon)) throw std::runtime_error("feasibility margin exhausted (xi <= epsilon)");

    const double T = static_cast<double>(inst.horizon);
    const int K = inst.num_resources;
    const double logK = std::log((2.0 * K + 1.0) / delta);
    auto radius = [&](long long t) {
        return std::sqrt(4.0 * T * gamma1 * logK / static_cast<double>(t));
    };

    StageParams sp;
    sp.t_r = t_r;
    sp.eps_x = radius(t_r);
    const double eps_x_prev = radius(t_prev);
    sp.z_r = T * w_prev /
             ((1.0 + (2.0 + 1.0 / (xi - epsilon)) * eps_x_prev) * static_cast<double>(t_prev));

    sp.c1.assign(K, 0.0);
    for (int k = 0; k < K; ++k)
        if (inst.a_bar[k] > 0.0) sp.c1[k] = std::log1p(sp.eps_x) / inst.a_bar[k];

    sp.revenue_active = inst.w_bar > 0.0 && sp.z_r > 0.0;
    if (sp.revenue_active) {
        sp.eps_y = std::sqrt(4.0 * T * std::log((2.0 * K + 1.0) / delta) * inst.w_bar /
                             (sp.z_r * static_cast<double>(t_r)));
        sp.c2 = std::log1p(sp.eps_y) / inst.w_bar;
        sp.log_psi0 = -(static_cast<double>(t_r) - 1.0) * sp.eps_y * sp.eps_y * sp.z_r /
                      (4.0 * inst.w_bar * T);
        sp.drift_y = sp.eps_y * sp.eps_y * sp.z_r / (4.0 * T * inst.w_bar);
    }
    sp.log_phi0 = -(static_cast<double>(t_r) - 1.0) * sp.eps_x * sp.eps_x / (4.0 * gamma1 * T);
    sp.drift_x = sp.eps_x * sp.eps_x / (4.0 * T * gamma1);
    return sp;
}

} // namespace tsra
