#pragma once

#include <cstdint>
#include <optional>

#include "ugwkit/measures.hpp"
#include "ugwkit/sinkhorn.hpp"

namespace ugwkit {

struct UgwConfig {
    double eps = 1e-2;
    double rho1 = 1.0;
    double rho2 = 1.0;
    int max_outer = 3000;
    int max_inner = 3000;
    double tol_plan = 1e-5;
    double tol_pot = 1e-6;
    std::uint64_t seed = 0;

    static UgwConfig balanced(double eps = 1e-2) {
        UgwConfig c;
        c.eps = eps;
        c.rho1 = kInf;
        c.rho2 = kInf;
        return c;
    }
    void validate() const;
};

struct Tightness {
    double f_pi_gamma = 0.0;
    double f_pi_pi = 0.0;
    double f_gamma_gamma = 0.0;
    double plan_gap = 0.0;  // sup |pi - gamma|

    double max_value_gap() const;
};

struct UgwSolution {
    TransportPlan pi;
    TransportPlan gamma;
    double cost_biconvex = 0.0;
    double cost_primal = 0.0;
    int outer_iterations = 0;
    int inner_iterations = 0;
    bool converged = false;
    bool mass_underflow = false;
    double mass_lock_error = 0.0;  // worst relative |m(pi) - m(gamma)| over outer iterations
    Potentials potentials;
    Tightness tightness;
};

// Sum_{i,j,k,l} (DX_ij - DY_kl)^2 pi_ik gamma_jl via the O(n^3) expansion.
double distortion_cost(const Mat& dx, const Mat& dy, const TransportPlan& pi, const TransportPlan& gamma);

// Linearized cost of the biconvex functional at gamma, including the constant entropy terms.
Mat local_cost(const MmSpace& x, const MmSpace& y, const TransportPlan& gamma, const UgwConfig& cfg);

// Penalized objective. Infinite rho sides use the balanced indicator.
double ugw_functional(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, const UgwConfig& cfg);

double biconvex_functional(const MmSpace& x, const MmSpace& y, const TransportPlan& pi,
                           const TransportPlan& gamma, const UgwConfig& cfg);

// Same as the two functionals above but without the balanced indicators; used
// for reporting solutions whose marginals only match up to the solver tolerance.
double ugw_functional_relaxed(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, const UgwConfig& cfg);
double biconvex_functional_relaxed(const MmSpace& x, const MmSpace& y, const TransportPlan& pi,
                                   const TransportPlan& gamma, const UgwConfig& cfg);

// Unregularized functional (eps = 0).
double ugw_unregularized(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, const UgwConfig& cfg);

TransportPlan product_init(const MmSpace& x, const MmSpace& y);

UgwSolution solve_ugw(const MmSpace& x, const MmSpace& y, const UgwConfig& cfg,
                      const std::optional<TransportPlan>& init = std::nullopt);

struct DebiasedResult {
    double value = 0.0;
    double cross = 0.0;
    double self_x = 0.0;
    double self_y = 0.0;
    double correction = 0.0;
    bool converged = false;
};

DebiasedResult debiased_ugw(const MmSpace& x, const MmSpace& y, const UgwConfig& cfg);

Tightness tightness_diagnostics(const MmSpace& x, const MmSpace& y, const UgwSolution& sol, const UgwConfig& cfg);

}  // namespace ugwkit
