#include "ugwkit/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ugwkit {

const char* lp_status_name(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration_limit";
    }
    return "?";
}

namespace {

// Row-major dense tableau: rows 0..M-1 constraints, last column the rhs.
struct Tableau {
    int rows = 0;
    int cols = 0;  // structural + artificial columns, rhs excluded
    std::vector<double> a;
    std::vector<double> cost;  // reduced cost row, last entry = -objective
    std::vector<int> basis;

    double& at(int r, int c) { return a[static_cast<size_t>(r) * (cols + 1) + c]; }
    double at(int r, int c) const { return a[static_cast<size_t>(r) * (cols + 1) + c]; }
    double& rhs(int r) { return at(r, cols); }

    void pivot(int pr, int pc) {
        const int w = cols + 1;
        double* prow = &a[static_cast<size_t>(pr) * w];
        const double inv = 1.0 / prow[pc];
        for (int c = 0; c < w; ++c) prow[c] *= inv;
        prow[pc] = 1.0;
        for (int r = 0; r < rows; ++r) {
            if (r == pr) continue;
            double* row = &a[static_cast<size_t>(r) * w];
            const double f = row[pc];
            if (f == 0.0) continue;
            for (int c = 0; c < w; ++c) row[c] -= f * prow[c];
            row[pc] = 0.0;
        }
        const double f = cost[pc];
        if (f != 0.0) {
            for (int c = 0; c < w; ++c) cost[c] -= f * prow[c];
            cost[pc] = 0.0;
        }
        basis[pr] = pc;
    }

    void remove_row(int r) {
        const int w = cols + 1;
        a.erase(a.begin() + static_cast<long>(r) * w, a.begin() + static_cast<long>(r + 1) * w);
        basis.erase(basis.begin() + r);
        --rows;
    }
};

enum class Step { Optimal, Unbounded, Limit };

// Primal simplex on columns [0, ncols). Dantzig pricing, Bland after `bland_after` pivots.
Step run_simplex(Tableau& t, int ncols, double tol, int bland_after, int max_iter, int& iters) {
    int local = 0;
    while (true) {
        if (iters >= max_iter) return Step::Limit;
        const bool bland = local >= bland_after;
        int enter = -1;
        double best = -tol;
        for (int c = 0; c < ncols; ++c) {
            const double rc = t.cost[c];
            if (rc < best) {
                enter = c;
                if (bland) break;
                best = rc;
            }
        }
        if (enter < 0) return Step::Optimal;
        int leave = -1;
        double ratio = kInf;
        for (int r = 0; r < t.rows; ++r) {
            const double v = t.at(r, enter);
            if (v <= tol) continue;
            const double q = std::max(t.at(r, t.cols), 0.0) / v;
            if (q < ratio - 1e-13) {
                ratio = q;
                leave = r;
            } else if (q <= ratio + 1e-13 && t.basis[r] < t.basis[leave]) {
                leave = r;
            }
        }
        if (leave < 0) return Step::Unbounded;
        t.pivot(leave, enter);
        ++iters;
        ++local;
    }
}

}  // namespace

LpResult solve_lp(const LpProblem& p, const LpOptions& opt) {
    const Mat& A = p.eq_matrix;
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (p.objective.size() != n || p.eq_rhs.size() != m) throw std::invalid_argument("LP dimension mismatch");
    if (!A.allFinite() || !p.objective.allFinite() || !p.eq_rhs.allFinite())
        throw std::invalid_argument("LP data must be finite");

    LpResult res;
    const int max_iter = opt.max_iterations > 0 ? opt.max_iterations : 50 * (m + n) + 1000;
    const double bnorm = m ? p.eq_rhs.cwiseAbs().maxCoeff() : 0.0;

    Tableau t;
    t.rows = m;
    t.cols = n + m;
    t.a.assign(static_cast<size_t>(m) * (t.cols + 1), 0.0);
    t.basis.resize(m);
    std::vector<int> row_of(m);
    for (int r = 0; r < m; ++r) {
        const double sign = p.eq_rhs(r) < 0.0 ? -1.0 : 1.0;
        for (int c = 0; c < n; ++c) t.at(r, c) = sign * A(r, c);
        t.at(r, n + r) = 1.0;
        t.rhs(r) = sign * p.eq_rhs(r);
        t.basis[r] = n + r;
        row_of[r] = r;
    }
    // Phase 1: minimize the sum of artificials.
    t.cost.assign(t.cols + 1, 0.0);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c <= t.cols; ++c)
            if (c < n || c == t.cols) t.cost[c] -= t.at(r, c);

    Step st = run_simplex(t, t.cols, opt.pivot_tol, 5 * n, max_iter, res.iterations);
    if (st == Step::Limit) {
        res.status = LpStatus::IterationLimit;
        return res;
    }
    const double infeas = -t.cost[t.cols];
    if (infeas > opt.feas_tol * (1.0 + bnorm)) {
        res.status = LpStatus::Infeasible;
        return res;
    }
    // Drive remaining artificials out of the basis or drop redundant rows.
    for (int r = t.rows - 1; r >= 0; --r) {
        if (t.basis[r] < n) continue;
        int best = -1;
        double big = opt.pivot_tol;
        for (int c = 0; c < n; ++c)
            if (std::abs(t.at(r, c)) > big) {
                big = std::abs(t.at(r, c));
                best = c;
            }
        if (best >= 0) {
            t.pivot(r, best);
        } else {
            t.remove_row(r);
            row_of.erase(row_of.begin() + r);
        }
    }
    // Phase 2 with the true objective, artificials barred from entering.
    std::fill(t.cost.begin(), t.cost.end(), 0.0);
    for (int c = 0; c < n; ++c) t.cost[c] = p.objective(c);
    for (int r = 0; r < t.rows; ++r) {
        const double cb = p.objective(t.basis[r]);
        if (cb == 0.0) continue;
        for (int c = 0; c <= t.cols; ++c) t.cost[c] -= cb * t.at(r, c);
    }
    st = run_simplex(t, n, opt.pivot_tol, 5 * n, max_iter, res.iterations);
    if (st == Step::Limit) {
        res.status = LpStatus::IterationLimit;
        return res;
    }
    if (st == Step::Unbounded) {
        res.status = LpStatus::Unbounded;
        return res;
    }

    // Re-solve the basic system from the original data for accuracy.
    const int k = t.rows;
    Mat B(k, k);
    Vec bb(k), cb(k);
    for (int r = 0; r < k; ++r) {
        bb(r) = p.eq_rhs(row_of[r]);
        for (int q = 0; q < k; ++q) B(r, q) = A(row_of[r], t.basis[q]);
    }
    for (int q = 0; q < k; ++q) cb(q) = p.objective(t.basis[q]);
    res.x = Vec::Zero(n);
    res.duals = Vec::Zero(m);
    if (k > 0) {
        Eigen::PartialPivLU<Mat> lu(B);
        const Vec xb = lu.solve(bb);
        const Vec y = lu.transpose().solve(cb);
        for (int q = 0; q < k; ++q) res.x(t.basis[q]) = std::max(0.0, xb(q));
        for (int r = 0; r < k; ++r) res.duals(row_of[r]) = y(r);
    }
    res.basis = t.basis;
    res.objective_value = p.objective.dot(res.x);
    res.status = LpStatus::Optimal;
    return res;
}

}  // namespace ugwkit
