#include "ugwkit/flb.hpp"

#include <cmath>
#include <stdexcept>

namespace ugwkit {

Vec eccentricity(const Mat& d, const Vec& w) {
    if (d.rows() != w.size() || d.cols() != w.size()) throw std::invalid_argument("eccentricity shape mismatch");
    return d * (w / w.sum());
}

Mat flb_cost(const MmSpace& x, const MmSpace& y) {
    const Vec ex = eccentricity(x.dist, x.weights);
    const Vec ey = eccentricity(y.dist, y.weights);
    Mat c(ex.size(), ey.size());
    for (Eigen::Index i = 0; i < ex.size(); ++i)
        for (Eigen::Index j = 0; j < ey.size(); ++j) c(i, j) = (ex(i) - ey(j)) * (ex(i) - ey(j));
    return c;
}

SinkhornResult solve_flb(const MmSpace& x, const MmSpace& y, double rho, double eps, const SinkhornOptions& opt,
                         double rho2) {
    return uot_sinkhorn(flb_cost(x, y), x.weights, y.weights, rho, rho2 < 0.0 ? rho : rho2, eps, std::nullopt, opt);
}

TransportPlan flb_init(const MmSpace& x, const MmSpace& y, double rho, double eps, const SinkhornOptions& opt) {
    const SinkhornResult r = solve_flb(x, y, rho, eps, opt);
    const double m = r.plan.mass();
    if (!(m > 0.0)) throw NumericalError("FLB plan has zero mass");
    return r.plan.scaled(std::sqrt(x.mass() * y.mass()) / m);
}

}  // namespace ugwkit
