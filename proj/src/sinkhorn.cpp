#include "ugwkit/sinkhorn.hpp"

#include <cmath>

namespace ugwkit {

double sinkhorn_prefactor(double rho, double eps) {
    if (is_infinite(rho)) return eps;
    return eps * rho / (eps + rho);
}

namespace {

// Max-shifted log-sum-exp of the entries of `x`.
double lse(const double* x, Eigen::Index n, Eigen::Index stride) {
    double m = -kInf;
    for (Eigen::Index k = 0; k < n; ++k) m = std::max(m, x[k * stride]);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) s += std::exp(x[k * stride] - m);
    return m + std::log(s);
}

void require_finite(const Vec& v, const char* what) {
    if (!v.allFinite()) throw NumericalError(std::string("non-finite ") + what + " potential");
}

}  // namespace

Vec sinkhorn_update_f(const Mat& cost, const Vec& g, const Vec& log_nu, double rho1, double eps) {
    const Eigen::Index n = cost.rows(), m = cost.cols();
    const double k = sinkhorn_prefactor(rho1, eps);
    Vec f(n);
    Vec buf(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) buf(j) = (g(j) - cost(i, j)) / eps + log_nu(j);
        f(i) = -k * lse(buf.data(), m, 1);
    }
    return f;
}

Vec sinkhorn_update_g(const Mat& cost, const Vec& f, const Vec& log_mu, double rho2, double eps) {
    const Eigen::Index n = cost.rows(), m = cost.cols();
    const double k = sinkhorn_prefactor(rho2, eps);
    Vec g(m);
    Vec buf(n);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) buf(i) = (f(i) - cost(i, j)) / eps + log_mu(i);
        g(j) = -k * lse(buf.data(), n, 1);
    }
    return g;
}

TransportPlan plan_from_potentials(const Vec& f, const Vec& g, const Mat& cost, double eps,
                                   const Vec& mu, const Vec& nu) {
    const Eigen::Index n = cost.rows(), m = cost.cols();
    Mat p(n, m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < n; ++i) p(i, j) = std::exp((f(i) + g(j) - cost(i, j)) / eps) * mu(i) * nu(j);
    if (!p.allFinite()) throw NumericalError("plan overflow");
    return TransportPlan(std::move(p));
}

SinkhornResult uot_sinkhorn(const Mat& cost, const Vec& mu, const Vec& nu, double rho1, double rho2,
                            double eps, const std::optional<Potentials>& init, const SinkhornOptions& opt) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (cost.rows() != mu.size() || cost.cols() != nu.size()) throw std::invalid_argument("cost shape mismatch");
    if (!cost.allFinite()) throw std::invalid_argument("cost must be finite");
    if ((mu.array() <= 0.0).any() || (nu.array() <= 0.0).any())
        throw std::invalid_argument("measures must be strictly positive");

    const Vec log_mu = mu.array().log();
    const Vec log_nu = nu.array().log();
    SinkhornResult res;
    Vec f = init ? init->f : Vec::Zero(mu.size());
    Vec g = init ? init->g : Vec::Zero(nu.size());

    for (int it = 1; it <= opt.max_inner; ++it) {
        Vec f_new = sinkhorn_update_f(cost, g, log_nu, rho1, eps);
        require_finite(f_new, "f");
        g = sinkhorn_update_g(cost, f_new, log_mu, rho2, eps);
        require_finite(g, "g");
        res.residual = (f_new - f).cwiseAbs().maxCoeff();
        f = std::move(f_new);
        res.iterations = it;
        if (res.residual <= opt.tol_pot) {
            res.converged = true;
            break;
        }
    }
    res.plan = plan_from_potentials(f, g, cost, eps, mu, nu);
    res.potentials = {std::move(f), std::move(g)};
    return res;
}

}  // namespace ugwkit
