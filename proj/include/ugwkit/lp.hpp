#pragma once

#include <vector>

#include "ugwkit/measures.hpp"

namespace ugwkit {

// min c'x  s.t.  A x = b, x >= 0
struct LpProblem {
    Vec objective;
    Mat eq_matrix;
    Vec eq_rhs;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* lp_status_name(LpStatus s);

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Vec x;
    double objective_value = 0.0;
    Vec duals;                // y with A'y <= c at optimality; 0 on redundant rows
    std::vector<int> basis;   // basic column per kept row
    int iterations = 0;
};

struct LpOptions {
    double pivot_tol = 1e-10;
    double feas_tol = 1e-9;
    int max_iterations = 0;  // 0: 50 * (rows + cols)
};

LpResult solve_lp(const LpProblem& p, const LpOptions& opt = {});

}  // namespace ugwkit
