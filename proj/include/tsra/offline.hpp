#pragma once
//
// Offline oracles built on the expected instance.
//
// For type distribution p the expected instance at lift beta is the LP
//
//   maximize   sum_{i,j} T p_j w[i][j] x[i][j]
//   subject to L_k + beta*T*a_bar_k  <=  sum_{i,j} T p_j a[i][j][k] x[i][j]  <=  U_k
//              sum_i x[i][j] <= 1                 for every type j
//              x >= 0
//
// Its optimum W_beta is the planning benchmark: W_0 bounds the expected revenue
// of any online policy from above, and the lift beta prices how much slack the
// lower bounds have.  The feasibility margin xi_star is the largest feasible
// lift; the factor-revealing program turns a target lift tau into a certified
// revenue ratio: W_tau >= (1 - t_star) * W_0 with t_star <= tau/xi_star.
//
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lp.hpp"
#include "model.hpp"

namespace tsra {

struct ExpectedSolution {
    LpStatus status = LpStatus::Infeasible;
    double beta = 0.0;
    double w_beta = 0.0;                 // optimum; 0 unless status == Optimal
    std::vector<std::vector<double>> x;  // [I][J] optimal policy
    // Duals, all reported nonnegative: alpha for the upper rows, eta for the
    // lower rows, rho for the per-type rows.  Stationarity at an optimum:
    // x[i][j] > 0  =>  T p_j w[i][j] = sum_k (alpha_k - eta_k) T p_j a[i][j][k] + rho_j.
    std::vector<double> alpha, eta, rho;
};

namespace detail {

// Rows shared by the expected instance and the feasibility-margin LP, in a
// fixed order: K upper rows, K lower rows, J per-type rows.  `xi_col` >= 0
// adds -T*a_bar_k * xi to the lower rows (margin as a variable).
inline void add_expected_rows(LpProblem& lp, const Instance& inst, double beta,
                              int xi_col) {
    const int K = inst.num_resources, J = inst.num_types, I = inst.num_channels();
    const double T = static_cast<double>(inst.horizon);
    auto vid = [J](int i, int j) { return i * J + j; };

    for (int k = 0; k < K; ++k) {
        std::vector<double> row(lp.num_vars(), 0.0);
        for (int i = 0; i < I; ++i)
            for (int j = 0; j < J; ++j)
                row[vid(i, j)] = T * inst.probs[j] * inst.cons[i][j][k];
        lp.add_row(row, Sense::LessEqual, inst.upper[k]);
    }
    for (int k = 0; k < K; ++k) {
        std::vector<double> row(lp.num_vars(), 0.0);
        for (int i = 0; i < I; ++i)
            for (int j = 0; j < J; ++j)
                row[vid(i, j)] = T * inst.probs[j] * inst.cons[i][j][k];
        if (xi_col >= 0) row[xi_col] = -T * inst.a_bar[k];
        double lift = (xi_col >= 0) ? 0.0 : beta * T * inst.a_bar[k];
        lp.add_row(row, Sense::GreaterEqual, inst.lower[k] + lift);
    }
    for (int j = 0; j < J; ++j) {
        std::vector<double> row(lp.num_vars(), 0.0);
        for (int i = 0; i < I; ++i) row[vid(i, j)] = 1.0;
        lp.add_row(row, Sense::LessEqual, 1.0);
    }
}

} // namespace detail

inline ExpectedSolution solve_expected(const Instance& inst, double beta) {
    const int K = inst.num_resources, J = inst.num_types, I = inst.num_channels();
    const double T = static_cast<double>(inst.horizon);

    LpProblem lp;
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j) lp.add_var(T * inst.probs[j] * inst.revenue[i][j]);
    detail::add_expected_rows(lp, inst, beta, -1);

    auto s = solve_lp(lp);
    ExpectedSolution out;
    out.status = s.status;
    out.beta = beta;
    if (s.status != LpStatus::Optimal) return out;

    out.w_beta = s.objective;
    out.x.assign(I, std::vector<double>(J, 0.0));
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j) out.x[i][j] = s.x[i * J + j];
    out.alpha.assign(K, 0.0);
    out.eta.assign(K, 0.0);
    out.rho.assign(J, 0.0);
    for (int k = 0; k < K; ++k) out.alpha[k] = s.y[k];       // <= rows: y >= 0
    for (int k = 0; k < K; ++k) out.eta[k] = -s.y[K + k];    // >= rows: y <= 0, flip
    for (int j = 0; j < J; ++j) out.rho[j] = s.y[2 * K + j];
    return out;
}

struct FeasibilityMeasure {
    LpStatus status = LpStatus::Infeasible;
    double xi_star = 0.0;
};

// Largest uniform lift of the lower bounds (in units of T*a_bar_k) that keeps
// the expected instance feasible.  The lift variable is capped at 1, which is
// never binding below its natural ceiling min_k (1 - L_k/(T*a_bar_k)) and
// keeps the program bounded even when no resource is ever consumed.
inline FeasibilityMeasure measure_of_feasibility(const Instance& inst) {
    const int J = inst.num_types, I = inst.num_channels();

    LpProblem lp;
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j) lp.add_var(0.0);
    int xi = lp.add_var(1.0, 0.0, 1.0);
    detail::add_expected_rows(lp, inst, 0.0, xi);

    auto s = solve_lp(lp);
    FeasibilityMeasure out;
    out.status = s.status;
    if (s.status == LpStatus::Optimal) out.xi_star = s.objective;
    return out;
}

// Factor-revealing program for a lower-bound lift tau = epsilon/(1-epsilon):
//
//   minimize   t
//   subject to sum_i d[i][j] <= t                                  (each type)
//              sum_{i,j} d[i][j] T p_j a[i][j][k] <= t U_k         (each k)
//              sum_{i,j} d[i][j] T p_j a[i][j][k] >= t L_k + tau T a_bar_k
//              d >= 0, t >= 0
//
// Its optimum certifies W_tau >= (1 - t_star) W_0; always t_star <=
// tau/xi_star (witness d = (tau/xi_star) x' with x' the margin policy).
// Throws when the program is infeasible, i.e. the instance has no positive
// feasibility margin to trade against.
inline double factor_revealing_t(const Instance& inst, double epsilon) {
    if (!(epsilon >= 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must lie in [0, 1)");
    const int K = inst.num_resources, J = inst.num_types, I = inst.num_channels();
    const double T = static_cast<double>(inst.horizon);
    const double tau = epsilon / (1.0 - epsilon);

    LpProblem lp;
    lp.sense = Objective::Minimize;
    int tvar = lp.add_var(1.0);
    auto did = [J, tvar](int i, int j) { return tvar + 1 + i * J + j; };
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j) lp.add_var(0.0);

    for (int j = 0; j < J; ++j) {
        std::vector<double> row(lp.num_vars(), 0.0);
        for (int i = 0; i < I; ++i) row[did(i, j)] = 1.0;
        row[tvar] = -1.0;
        lp.add_row(row, Sense::LessEqual, 0.0);
    }
    for (int k = 0; k < K; ++k) {
        std::vector<double> row(lp.num_vars(), 0.0);
        for (int i = 0; i < I; ++i)
            for (int j = 0; j < J; ++j) row[did(i, j)] = T * inst.probs[j] * inst.cons[i][j][k];
        row[tvar] = -inst.upper[k];
        lp.add_row(row, Sense::LessEqual, 0.0);
    }
    for (int k = 0; k < K; ++k) {
        std::vector<double> row(lp.num_vars(), 0.0);
        for (int i = 0; i < I; ++i)
            for (int j = 0; j < J; ++j) row[did(i, j)] = T * inst.probs[j] * inst.cons[i][j][k];
        row[tvar] = -inst.lower[k];
        lp.add_row(row, Sense::GreaterEqual, tau * T * inst.a_bar[k]);
    }

    auto s = solve_lp(lp);
    if (s.status != LpStatus::Optimal)
        throw std::runtime_error(
            "strong feasibility violated: factor-revealing program is " +
            std::string(to_string(s.status)));
    return s.objective;
}

// Exact optimum of the realized instance: enumerate every channel assignment
// for the given stream and keep the best one meeting both bounds.  Guarded by
// an enumeration budget of |I|^T <= 1e7 states.
struct IlpResult {
    bool feasible = false;
    double w_r = -std::numeric_limits<double>::infinity();
    std::vector<int> decisions;  // an optimal assignment, when feasible
};

inline IlpResult offline_ilp_opt(const Instance& inst, const RequestStream& stream) {
    const int I = inst.num_channels(), K = inst.num_resources;
    const std::size_t T = stream.types.size();

    double states = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
        states *= static_cast<double>(I);
        if (states > 1e7)
            throw std::invalid_argument("instance too large for enumeration (|I|^T > 1e7)");
    }

    IlpResult best;
    std::vector<int> assign(T, 0);
    std::vector<double> consumption(K);
    while (true) {
        double rev = 0.0;
        for (int k = 0; k < K; ++k) consumption[k] = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            rev += inst.revenue[assign[t]][stream.types[t]];
            for (int k = 0; k < K; ++k)
                consumption[k] += inst.cons[assign[t]][stream.types[t]][k];
        }
        bool ok = true;
        for (int k = 0; ok && k < K; ++k)
            ok = consumption[k] >= inst.lower[k] && consumption[k] <= inst.upper[k];
        if (ok && (!best.feasible || rev > best.w_r)) {
            best.feasible = true;
            best.w_r = rev;
            best.decisions = assign;
        }
        std::size_t t = 0;
        while (t < T && ++assign[t] == I) assign[t++] = 0;
        if (t == T) break;
    }
    return best;
}

// Certifies the revenue cost of lifting the lower bounds by tau: computes W_0,
// W_tau and the factor-revealing optimum, and checks W_tau >= (1 - t_star) W_0.
struct SensitivityReport {
    double w_e = 0.0;     // W_0
    double w_tau = 0.0;   // optimum at lift tau
    double t_star = 0.0;  // factor-revealing optimum
    double bound = 0.0;   // (1 - t_star) * W_0
    bool ok = false;
};

inline SensitivityReport sensitivity_check(const Instance& inst, double epsilon) {
    auto e0 = solve_expected(inst, 0.0);
    if (e0.status != LpStatus::Optimal)
        throw std::runtime_error("expected instance infeasible at lift 0");
    const double tau = epsilon / (1.0 - epsilon);
    auto et = solve_expected(inst, tau);
    if (et.status != LpStatus::Optimal)
        throw std::runtime_error("strong feasibility violated: expected instance infeasible at lift tau");

    SensitivityReport rep;
    rep.w_e = e0.w_beta;
    rep.w_tau = et.w_beta;
    rep.t_star = factor_revealing_t(inst, epsilon);
    rep.bound = (1.0 - rep.t_star) * rep.w_e;
    rep.ok = rep.w_tau >= rep.bound - 1e-8 * (1.0 + std::abs(rep.bound));
    return rep;
}

// ─── Regime diagnostics ──────────────────────────────────────────────────────
//
// The guarantees of the online algorithms require the scale ratios below to be
// small against eps^2 / ln(K/eps):
//
//   gamma   = max_k max( a_bar_k/U_k, a_bar_k/(T a_bar_k - L_k), w_bar/W_tau )
//   gamma1  = like gamma but with (1-eps) T a_bar_k - L_k and the optimum at
//             lift eps + tau1, tau1 = sqrt(eps)/(1 - sqrt(eps))
//   gamma2  = the two resource terms only
//
// gamma/gamma1 are undefined whenever their shifted instance is infeasible or
// a denominator is nonpositive; `diagnostic` says which.  gamma1's shift
// eps + tau1 reaches 1 already at eps ~ 0.17, so for larger eps the report
// also carries gamma1_proxy, the same ratio with the optimum at lift eps —
// a lower bound on the undefined value that the harness can run with.

struct GammaReport {
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double gamma1 = std::numeric_limits<double>::quiet_NaN();
    double gamma2 = std::numeric_limits<double>::quiet_NaN();
    double gamma1_proxy = std::numeric_limits<double>::quiet_NaN();
    double threshold = 0.0;  // c * eps^2 / ln(K/eps)
    bool gamma_defined = false;
    bool gamma1_defined = false;
    bool gamma2_defined = false;
    bool gamma1_proxy_defined = false;
    bool within_regime = false;  // all of gamma, gamma1, gamma2 defined and <= threshold
    std::string diagnostic;
};

inline GammaReport compute_gammas(const Instance& inst, double epsilon,
                                  double c_coeff = 1.0) {
    if (!(epsilon > 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    const int K = inst.num_resources;
    const double T = static_cast<double>(inst.horizon);

    GammaReport rep;
    rep.threshold = c_coeff * epsilon * epsilon /
                    std::log(static_cast<double>(K) / epsilon);

    auto note = [&rep](const std::string& msg) {
        if (!rep.diagnostic.empty()) rep.diagnostic += "; ";
        rep.diagnostic += msg;
    };

    // Resource terms.  A nonpositive denominator means the corresponding
    // slack is already exhausted and the ratio has no finite meaning.
    double res_full = 0.0, res_eps = 0.0, res2 = 0.0;
    bool res_full_ok = true, res_eps_ok = true;
    for (int k = 0; k < K; ++k) {
        if (inst.a_bar[k] == 0.0) continue;  // never consumed: no constraint pressure
        if (inst.upper[k] <= 0.0) { res_full_ok = res_eps_ok = false; continue; }
        double cap = inst.a_bar[k] / inst.upper[k];
        res_full = std::max(res_full, cap);
        res_eps = std::max(res_eps, cap);
        res2 = std::max(res2, cap);

        double den_full = T * inst.a_bar[k] - inst.lower[k];
        if (den_full <= 0.0) res_full_ok = false;
        else {
            res_full = std::max(res_full, inst.a_bar[k] / den_full);
            res2 = std::max(res2, inst.a_bar[k] / den_full);
        }
        double den_eps = (1.0 - epsilon) * T * inst.a_bar[k] - inst.lower[k];
        if (den_eps <= 0.0) res_eps_ok = false;
        else res_eps = std::max(res_eps, inst.a_bar[k] / den_eps);
    }
    if (!res_full_ok) note("a resource has T*a_bar_k <= L_k");
    if (!res_eps_ok) note("a resource has (1-eps)*T*a_bar_k <= L_k");

    rep.gamma2 = res2;
    rep.gamma2_defined = res_full_ok;

    // Revenue term of a ratio at lift `shift`; w_bar == 0 contributes nothing.
    auto revenue_term = [&](double shift, double& out) -> bool {
        if (inst.w_bar == 0.0) { out = 0.0; return true; }
        auto sol = solve_expected(inst, shift);
        if (sol.status != LpStatus::Optimal || sol.w_beta <= 0.0) return false;
        out = inst.w_bar / sol.w_beta;
        return true;
    };

    const double tau = epsilon / (1.0 - epsilon);
    double rev = 0.0;
    if (res_full_ok && revenue_term(tau, rev)) {
        rep.gamma = std::max(res_full, rev);
        rep.gamma_defined = true;
    } else if (res_full_ok) {
        note("expected instance infeasible (or worthless) at lift tau");
    }

    const double sq = std::sqrt(epsilon);
    const double tau1 = sq / (1.0 - sq);
    if (res_eps_ok && revenue_term(epsilon + tau1, rev)) {
        rep.gamma1 = std::max(res_eps, rev);
        rep.gamma1_defined = true;
    } else if (res_eps_ok) {
        note("expected instance infeasible (or worthless) at lift eps+tau1");
    }
    if (res_eps_ok && revenue_term(epsilon, rev)) {
        rep.gamma1_proxy = std::max(res_eps, rev);
        rep.gamma1_proxy_defined = true;
    }

    rep.within_regime = rep.gamma_defined && rep.gamma1_defined && rep.gamma2_defined &&
                        rep.gamma <= rep.threshold && rep.gamma1 <= rep.threshold &&
                        rep.gamma2 <= rep.threshold;
    return rep;
}

} // namespace tsra
