#pragma once

#include <functional>
#include <vector>

#include "ugwkit/measures.hpp"

namespace ugwkit {

// Principal branch, z >= 0.
double lambert_w(double z);
// W(exp(log_z)) without forming exp(log_z).
double lambert_w_of_exp(double log_z);

// Minimizer over t in [lo, hi] of a unimodal function, by golden section.
double golden_section_min(const std::function<double(double)>& f, double lo, double hi, int iters);

// theta -> L(theta*pi) + eps*KL(theta*pi ⊗ theta*pi | (mu⊗nu)⊗(mu⊗nu)), rho on both sides.
double scale_profile(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, double rho, double eps,
                     double theta);

struct QuadraticScale {
    double theta = 1.0;             // returned value
    double theta_closed = 1.0;      // log-linear stationarity with m(pi)^2
    double theta_single_mass = 1.0; // same relation with m(pi) in place of m(pi)^2
    double theta_oracle = 1.0;      // golden section over log theta in [-14, 14]
    bool discrepancy = false;       // closed form rejected in favor of the oracle
    bool single_mass_matches = false;
    double foc_residual = 0.0;      // stationarity residual at the returned theta
};

QuadraticScale optimal_scale_quadratic(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, double rho,
                                       double eps);

struct LinearScale {
    double theta = 1.0;
    double theta_lambert = 1.0;     // exp(-W((2b/a) e^{-c/a}) - c/a)
    double theta_alt_form = 1.0;    // exp(W((b/a) e^{-c/a}) - c/a)
    double foc_residual = 0.0;      // a log theta + 2 b theta + c at theta
    double alt_form_residual = 0.0; // same, at theta_alt_form
    double a = 0.0, b = 0.0, c = 0.0;
};

// Optimal scaling for the functional with linear (non-tensorized) KL penalties.
LinearScale optimal_scale_linear(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, double rho);

// Solves a*log(theta) + 2*b*theta + c = 0 (a > 0, b >= 0).
LinearScale solve_linear_foc(double a, double b, double c);

struct ScalingReport {
    double kappa = 1.0;
    double theta_quadratic = 1.0;
    double theta_linear = 1.0;
    double foc_residual_quadratic = 0.0;
    double foc_residual_linear = 0.0;
};

// pi stays fixed while both measures are multiplied by each kappa.
std::vector<ScalingReport> scaling_bias_report(const MmSpace& x, const MmSpace& y, const TransportPlan& pi,
                                               double rho, const std::vector<double>& kappas);

}  // namespace ugwkit
