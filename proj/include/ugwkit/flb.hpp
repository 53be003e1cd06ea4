#pragma once

#include "ugwkit/measures.hpp"
#include "ugwkit/sinkhorn.hpp"

namespace ugwkit {

// e_i = sum_j D_ij w_j / m(w)
Vec eccentricity(const Mat& d, const Vec& w);

Mat flb_cost(const MmSpace& x, const MmSpace& y);

SinkhornResult solve_flb(const MmSpace& x, const MmSpace& y, double rho, double eps, const SinkhornOptions& opt = {},
                         double rho2 = -1.0);

// FLB plan rescaled to mass sqrt(m(mu) m(nu)), for use as a UGW starting plan.
TransportPlan flb_init(const MmSpace& x, const MmSpace& y, double rho, double eps, const SinkhornOptions& opt = {});

}  // namespace ugwkit
