#pragma once
//
// Dense two-phase primal simplex.
//
// Scope: the linear programs in this library are desk-scale (tens of variables,
// tens of rows), so a dense tableau is the right tool — no sparsity, no
// factorization updates, no presolve.  What it does guarantee:
//
//   * distinct Optimal / Infeasible / Unbounded statuses, plus IterationLimit
//     as an honest failure mode (never a silently wrong Optimal);
//   * row duals with a fixed sign convention (see below) extracted from the
//     final tableau, so callers can check complementary slackness and strong
//     duality directly;
//   * anti-cycling: Dantzig pricing normally, switching permanently to Bland's
//     rule after a run of degenerate pivots.
//
// Dual sign convention for the reported multipliers y[r]:
//   maximize:  <= rows give y >= 0,  >= rows give y <= 0,  == rows free.
//   minimize:  >= rows give y >= 0,  <= rows give y <= 0,  == rows free.
// In both cases  objective == dual_objective  holds at an optimum (strong
// duality), where dual_objective also accounts for finite variable bounds.
//
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsra {

enum class Objective { Maximize, Minimize };
enum class Sense { LessEqual, GreaterEqual, Equal };
enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "Optimal";
        case LpStatus::Infeasible: return "Infeasible";
        case LpStatus::Unbounded: return "Unbounded";
        case LpStatus::IterationLimit: return "IterationLimit";
    }
    return "?";
}

struct LpProblem {
    Objective sense = Objective::Maximize;
    std::vector<double> c;                   // objective, one entry per variable
    std::vector<double> lb, ub;              // variable bounds (default [0, +inf))
    std::vector<std::vector<double>> rows;   // dense row coefficients
    std::vector<Sense> senses;
    std::vector<double> rhs;

    int num_vars() const { return static_cast<int>(c.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    // Returns the new variable's index.
    int add_var(double obj, double lo = 0.0,
                double hi = std::numeric_limits<double>::infinity()) {
        c.push_back(obj);
        lb.push_back(lo);
        ub.push_back(hi);
        return num_vars() - 1;
    }

    void add_row(std::vector<double> coeffs, Sense s, double b) {
        if (static_cast<int>(coeffs.size()) != num_vars())
            throw std::invalid_argument("row length != variable count");
        rows.push_back(std::move(coeffs));
        senses.push_back(s);
        rhs.push_back(b);
    }
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;        // primal values, one per variable
    std::vector<double> y;        // row duals (convention above); empty unless Optimal
    double objective = 0.0;       // in the problem's own sense
    double dual_objective = 0.0;  // equals objective at an optimum
    int iterations = 0;
};

struct LpOptions {
    int max_iterations = 50000;
    double pivot_tol = 1e-9;   // entries below this never pivot
    int stall_limit = 50;      // degenerate pivots before switching to Bland's rule
};

inline LpSolution solve_lp(const LpProblem& prob, const LpOptions& opt = {}) {
    const int n0 = prob.num_vars();
    const int m0 = prob.num_rows();

    LpSolution sol;
    sol.x.assign(n0, 0.0);

    // ── 1. Rewrite as:  maximize cmax·x',  internal rows,  x' >= 0. ─────────
    // Finite lower bounds shift; free variables split into x+ - x-.  Finite
    // upper bounds become explicit <= rows appended after the original ones.
    std::vector<double> cmax = prob.c;
    if (prob.sense == Objective::Minimize)
        for (double& v : cmax) v = -v;

    struct VarMap {
        int col = -1;       // column of the (shifted) positive part
        int neg = -1;       // column of the negative part, -1 unless split
        double shift = 0.0;
    };
    std::vector<VarMap> vmap(n0);
    int ncols = 0;
    for (int j = 0; j < n0; ++j) {
        double lo = prob.lb[j], hi = prob.ub[j];
        if (hi < lo) return sol;  // empty box: Infeasible
        if (std::isfinite(lo)) {
            vmap[j].col = ncols++;
            vmap[j].shift = lo;
        } else {
            vmap[j].col = ncols++;
            vmap[j].neg = ncols++;
        }
    }

    struct IntRow {
        std::vector<double> a;
        Sense sense;
        double b;
    };
    std::vector<IntRow> irows;
    irows.reserve(m0 + n0);
    double obj_shift = 0.0;
    std::vector<double> cint(ncols, 0.0);
    for (int j = 0; j < n0; ++j) {
        cint[vmap[j].col] += cmax[j];
        if (vmap[j].neg >= 0) cint[vmap[j].neg] -= cmax[j];
        obj_shift += cmax[j] * vmap[j].shift;
    }
    for (int r = 0; r < m0; ++r) {
        IntRow row{std::vector<double>(ncols, 0.0), prob.senses[r], prob.rhs[r]};
        for (int j = 0; j < n0; ++j) {
            double a = prob.rows[r][j];
            if (a == 0.0) continue;
            row.a[vmap[j].col] += a;
            if (vmap[j].neg >= 0) row.a[vmap[j].neg] -= a;
            row.b -= a * vmap[j].shift;
        }
        irows.push_back(std::move(row));
    }
    for (int j = 0; j < n0; ++j) {
        if (!std::isfinite(prob.ub[j])) continue;
        IntRow row{std::vector<double>(ncols, 0.0), Sense::LessEqual,
                   prob.ub[j] - vmap[j].shift};
        row.a[vmap[j].col] = 1.0;
        if (vmap[j].neg >= 0) row.a[vmap[j].neg] = -1.0;
        irows.push_back(std::move(row));
    }
    const int m = static_cast<int>(irows.size());

    // ── 2. Standard form tableau. ────────────────────────────────────────────
    // Flip rows to make rhs nonnegative, then add slack (+1, post-flip <=),
    // surplus (-1, post-flip >=) and one artificial (+1) per >=/== row.  Both
    // slack and artificial columns are +e_r, so the final objective row gives
    // the tableau dual of row r at dual_col[r] directly.
    std::vector<double> flip(m, 1.0);
    std::vector<Sense> fsense(m);
    std::vector<double> fb(m);
    double bnorm = 0.0;
    for (int r = 0; r < m; ++r) {
        fsense[r] = irows[r].sense;
        fb[r] = irows[r].b;
        bnorm = std::max(bnorm, std::abs(irows[r].b));
        if (fb[r] < 0.0) {
            flip[r] = -1.0;
            fb[r] = -fb[r];
            for (double& v : irows[r].a) v = -v;
            if (fsense[r] == Sense::LessEqual) fsense[r] = Sense::GreaterEqual;
            else if (fsense[r] == Sense::GreaterEqual) fsense[r] = Sense::LessEqual;
        }
    }

    int total = ncols;
    std::vector<int> slack_col(m, -1), art_col(m, -1);
    for (int r = 0; r < m; ++r)
        if (fsense[r] == Sense::LessEqual) slack_col[r] = total++;
        else if (fsense[r] == Sense::GreaterEqual) slack_col[r] = total++;  // surplus
    for (int r = 0; r < m; ++r)
        if (fsense[r] != Sense::LessEqual) art_col[r] = total++;

    const int width = total + 1;  // last column holds b
    std::vector<double> tab(static_cast<std::size_t>(m) * width, 0.0);
    auto T = [&](int r, int j) -> double& { return tab[static_cast<std::size_t>(r) * width + j]; };
    std::vector<int> basis(m, -1);
    std::vector<bool> is_art(total, false);
    for (int r = 0; r < m; ++r) {
        for (int j = 0; j < ncols; ++j) T(r, j) = irows[r].a[j];
        T(r, total) = fb[r];
        if (fsense[r] == Sense::LessEqual) {
            T(r, slack_col[r]) = 1.0;
            basis[r] = slack_col[r];
        } else {
            if (fsense[r] == Sense::GreaterEqual) T(r, slack_col[r]) = -1.0;
            T(r, art_col[r]) = 1.0;
            is_art[art_col[r]] = true;
            basis[r] = art_col[r];
        }
    }

    std::vector<double> zrow(width, 0.0);
    auto rebuild_zrow = [&](const std::vector<double>& cost) {
        for (int j = 0; j < width; ++j) zrow[j] = (j < total) ? -cost[j] : 0.0;
        for (int r = 0; r < m; ++r) {
            double cb = cost[basis[r]];
            if (cb == 0.0) continue;
            for (int j = 0; j < width; ++j) zrow[j] += cb * T(r, j);
        }
    };

    auto pivot = [&](int pr, int pc) {
        double piv = T(pr, pc);
        for (int j = 0; j < width; ++j) T(pr, j) /= piv;
        for (int r = 0; r < m; ++r) {
            if (r == pr) continue;
            double f = T(r, pc);
            if (f == 0.0) continue;
            for (int j = 0; j < width; ++j) T(r, j) -= f * T(pr, j);
            T(r, pc) = 0.0;
        }
        double f = zrow[pc];
        if (f != 0.0) {
            for (int j = 0; j < width; ++j) zrow[j] -= f * T(pr, j);
            zrow[pc] = 0.0;
        }
        basis[pr] = pc;
    };

    const double tol = opt.pivot_tol;
    int iterations = 0;
    bool bland = false;

    // Runs simplex iterations on the current zrow; returns Optimal or
    // Unbounded or IterationLimit.  `allow_art` gates artificial columns
    // from entering (phase 2 bars them).
    auto iterate = [&](bool allow_art) {
        int stall = 0;
        double last_obj = zrow[total];
        while (true) {
            if (++iterations > opt.max_iterations) return LpStatus::IterationLimit;
            int enter = -1;
            if (!bland) {
                double best = -tol;
                for (int j = 0; j < total; ++j) {
                    if (!allow_art && is_art[j]) continue;
                    if (zrow[j] < best) { best = zrow[j]; enter = j; }
                }
            } else {
                for (int j = 0; j < total; ++j) {
                    if (!allow_art && is_art[j]) continue;
                    if (zrow[j] < -tol) { enter = j; break; }
                }
            }
            if (enter < 0) return LpStatus::Optimal;

            int leave = -1;
            double best_ratio = 0.0;
            for (int r = 0; r < m; ++r) {
                double a = T(r, enter);
                if (a <= tol) continue;
                double ratio = std::max(T(r, total), 0.0) / a;
                if (leave < 0 || ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && basis[r] < basis[leave])) {
                    leave = r;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) return LpStatus::Unbounded;
            pivot(leave, enter);

            if (zrow[total] > last_obj + 1e-12 * (1.0 + std::abs(last_obj))) {
                stall = 0;
                last_obj = zrow[total];
            } else if (++stall > opt.stall_limit) {
                bland = true;  // degeneracy run: switch pricing permanently
            }
        }
    };

    // ── 3. Phase 1: drive the artificials to zero. ──────────────────────────
    bool have_art = false;
    for (int r = 0; r < m; ++r) have_art = have_art || art_col[r] >= 0;
    if (have_art) {
        std::vector<double> cost1(total, 0.0);
        for (int j = 0; j < total; ++j)
            if (is_art[j]) cost1[j] = -1.0;
        rebuild_zrow(cost1);
        LpStatus st = iterate(true);
        sol.iterations = iterations;
        if (st == LpStatus::IterationLimit) { sol.status = st; return sol; }
        double art_sum = -zrow[total];  // phase-1 objective = -sum of artificials
        if (art_sum > 1e-8 * (1.0 + bnorm)) { sol.status = LpStatus::Infeasible; return sol; }

        // Pivot basic artificials out where possible; a row with no real
        // coefficients left is redundant and simply stays put at zero.
        for (int r = 0; r < m; ++r) {
            if (!is_art[basis[r]]) continue;
            for (int j = 0; j < ncols; ++j)
                if (std::abs(T(r, j)) > tol) { pivot(r, j); break; }
        }
    }

    // ── 4. Phase 2 on the real objective; artificials barred from entering. ─
    std::vector<double> cost2(total, 0.0);
    for (int j = 0; j < ncols; ++j) cost2[j] = cint[j];
    rebuild_zrow(cost2);
    LpStatus st = iterate(false);
    sol.iterations = iterations;
    if (st != LpStatus::Optimal) { sol.status = st; return sol; }

    // ── 5. Extract primal, duals and both objective values. ─────────────────
    std::vector<double> xt(total, 0.0);
    for (int r = 0; r < m; ++r) xt[basis[r]] = T(r, total);
    for (int j = 0; j < n0; ++j) {
        sol.x[j] = vmap[j].shift + xt[vmap[j].col];
        if (vmap[j].neg >= 0) sol.x[j] -= xt[vmap[j].neg];
    }
    sol.objective = 0.0;
    for (int j = 0; j < n0; ++j) sol.objective += prob.c[j] * sol.x[j];

    // Tableau dual of row r sits in the final objective row under its +e_r
    // column (the slack for <= rows, the artificial otherwise); undo the
    // rhs-sign flip, then map back to the caller's objective sense.
    double dual_obj = obj_shift;
    sol.y.assign(m0, 0.0);
    for (int r = 0; r < m; ++r) {
        int col = (fsense[r] == Sense::LessEqual) ? slack_col[r] : art_col[r];
        double y_int = flip[r] * zrow[col];
        dual_obj += y_int * irows[r].b;  // irows rhs was never flipped
        if (r < m0) sol.y[r] = (prob.sense == Objective::Minimize) ? -y_int : y_int;
    }
    sol.dual_objective = (prob.sense == Objective::Minimize) ? -dual_obj : dual_obj;
    sol.status = LpStatus::Optimal;
    return sol;
}

} // namespace tsra
