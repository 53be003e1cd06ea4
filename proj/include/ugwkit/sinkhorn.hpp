#pragma once

#include <optional>
#include <stdexcept>

#include "ugwkit/measures.hpp"

namespace ugwkit {

struct Potentials {
    Vec f;
    Vec g;
};

struct SinkhornOptions {
    double tol_pot = 1e-6;
    int max_inner = 3000;
};

struct SinkhornResult {
    Potentials potentials;
    TransportPlan plan;
    int iterations = 0;
    bool converged = false;
    double residual = kInf;
};

// Raised when a potential or plan entry stops being finite.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// eps * rho / (eps + rho), or eps when rho is infinite.
double sinkhorn_prefactor(double rho, double eps);

// One f update: f_i = -k * log sum_j exp((g_j - c_ij)/eps) nu_j, k = sinkhorn_prefactor(rho1, eps).
Vec sinkhorn_update_f(const Mat& cost, const Vec& g, const Vec& log_nu, double rho1, double eps);
Vec sinkhorn_update_g(const Mat& cost, const Vec& f, const Vec& log_mu, double rho2, double eps);

TransportPlan plan_from_potentials(const Vec& f, const Vec& g, const Mat& cost, double eps,
                                   const Vec& mu, const Vec& nu);

// rho1 pairs with the f (row, mu) update and rho2 with the g (column, nu) update.
SinkhornResult uot_sinkhorn(const Mat& cost, const Vec& mu, const Vec& nu, double rho1, double rho2,
                            double eps, const std::optional<Potentials>& init = std::nullopt,
                            const SinkhornOptions& opt = {});

}  // namespace ugwkit
