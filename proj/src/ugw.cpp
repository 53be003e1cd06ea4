#include "ugwkit/ugw.hpp"

#include <algorithm>
#include <cmath>

namespace ugwkit {

void UgwConfig::validate() const {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (!(rho1 >= 0.0) || !(rho2 >= 0.0)) throw std::invalid_argument("rho must be nonnegative");
    if (!(tol_plan > 0.0) || !(tol_pot > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (max_outer < 1 || max_inner < 1) throw std::invalid_argument("iteration caps must be positive");
}

double Tightness::max_value_gap() const {
    return std::max(std::abs(f_pi_gamma - f_pi_pi), std::abs(f_pi_gamma - f_gamma_gamma));
}

namespace {

void check_dims(const MmSpace& x, const MmSpace& y, const TransportPlan& p) {
    if (p.rows() != x.size() || p.cols() != y.size()) throw std::invalid_argument("plan shape does not match spaces");
}

Vec flat(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

Vec flat_product(const Vec& mu, const Vec& nu) {
    // column-major layout to match flat()
    return flat(mu * nu.transpose());
}

// rho * KL(a⊗c | b⊗b) with the balanced side handled by `indicator`.
double marginal_term(double rho, const Vec& a, const Vec& c, const Vec& b, bool indicator) {
    if (is_infinite(rho)) {
        if (!indicator) return 0.0;
        const double gap = std::max((a - b).cwiseAbs().maxCoeff(), (c - b).cwiseAbs().maxCoeff());
        return gap <= kBalancedTol ? 0.0 : kInf;
    }
    if (rho == 0.0) return 0.0;
    return rho * tensor_kl(a, b, c, b);
}

double biconvex_impl(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, const TransportPlan& gamma,
                     const UgwConfig& cfg, bool indicator) {
    check_dims(x, y, pi);
    check_dims(x, y, gamma);
    double v = distortion_cost(x.dist, y.dist, pi, gamma);
    v += marginal_term(cfg.rho1, pi.row_marginal(), gamma.row_marginal(), x.weights, indicator);
    v += marginal_term(cfg.rho2, pi.col_marginal(), gamma.col_marginal(), y.weights, indicator);
    if (cfg.eps > 0.0) {
        const Vec ref = flat_product(x.weights, y.weights);
        v += cfg.eps * tensor_kl(flat(pi.values()), ref, flat(gamma.values()), ref);
    }
    return v;
}

double quad_term(double rho, const Vec& a, const Vec& b, bool indicator) {
    if (is_infinite(rho)) {
        if (!indicator) return 0.0;
        return csiszar_div(a, b, EntropySpec::balanced());
    }
    if (rho == 0.0) return 0.0;
    return rho * quad_kl(a, b);
}

double functional_impl(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, const UgwConfig& cfg,
                       bool indicator) {
    check_dims(x, y, pi);
    double v = distortion_cost(x.dist, y.dist, pi, pi);
    v += quad_term(cfg.rho1, pi.row_marginal(), x.weights, indicator);
    v += quad_term(cfg.rho2, pi.col_marginal(), y.weights, indicator);
    if (cfg.eps > 0.0) v += cfg.eps * quad_kl(flat(pi.values()), flat_product(x.weights, y.weights));
    return v;
}

double scaled_rho(double rho, double m) { return is_infinite(rho) ? kInf : m * rho; }

double log_plan_gap(const Mat& a, const Mat& b) {
    constexpr double floor = 1e-300;
    double gap = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        const double u = a.data()[k], v = b.data()[k];
        if (u < floor || v < floor) continue;
        gap = std::max(gap, std::abs(std::log(u) - std::log(v)));
    }
    return gap;
}

}  // namespace

double distortion_cost(const Mat& dx, const Mat& dy, const TransportPlan& pi, const TransportPlan& gamma) {
    if (dx.rows() != pi.rows() || dy.rows() != pi.cols() || pi.rows() != gamma.rows() || pi.cols() != gamma.cols())
        throw std::invalid_argument("distortion_cost dimension mismatch");
    const Vec a = dx.cwiseProduct(dx) * gamma.row_marginal();
    const Vec b = dy.cwiseProduct(dy) * gamma.col_marginal();
    const Mat c = dx * gamma.values() * dy;
    return pi.row_marginal().dot(a) + pi.col_marginal().dot(b) - 2.0 * pi.values().cwiseProduct(c).sum();
}

Mat local_cost(const MmSpace& x, const MmSpace& y, const TransportPlan& gamma, const UgwConfig& cfg) {
    check_dims(x, y, gamma);
    const Vec& g1 = gamma.row_marginal();
    const Vec& g2 = gamma.col_marginal();
    const Vec a = x.dist.cwiseProduct(x.dist) * g1;
    const Vec b = y.dist.cwiseProduct(y.dist) * g2;
    double e = 0.0;
    if (!is_infinite(cfg.rho1) && cfg.rho1 > 0.0) e += cfg.rho1 * xlogx_ratio(g1, x.weights);
    if (!is_infinite(cfg.rho2) && cfg.rho2 > 0.0) e += cfg.rho2 * xlogx_ratio(g2, y.weights);
    if (cfg.eps > 0.0) e += cfg.eps * xlogx_ratio(flat(gamma.values()), flat_product(x.weights, y.weights));
    Mat c = -2.0 * (x.dist * gamma.values() * y.dist);
    c.colwise() += a;
    c.rowwise() += b.transpose();
    c.array() += e;
    return c;
}

double ugw_functional(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, const UgwConfig& cfg) {
    return functional_impl(x, y, pi, cfg, true);
}

double ugw_functional_relaxed(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, const UgwConfig& cfg) {
    return functional_impl(x, y, pi, cfg, false);
}

double biconvex_functional(const MmSpace& x, const MmSpace& y, const TransportPlan& pi,
                           const TransportPlan& gamma, const UgwConfig& cfg) {
    return biconvex_impl(x, y, pi, gamma, cfg, true);
}

double biconvex_functional_relaxed(const MmSpace& x, const MmSpace& y, const TransportPlan& pi,
                                   const TransportPlan& gamma, const UgwConfig& cfg) {
    return biconvex_impl(x, y, pi, gamma, cfg, false);
}

double ugw_unregularized(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, const UgwConfig& cfg) {
    UgwConfig c = cfg;
    c.eps = 0.0;
    return functional_impl(x, y, pi, c, false);
}

TransportPlan product_init(const MmSpace& x, const MmSpace& y) {
    const double s = std::sqrt(x.mass() * y.mass());
    return TransportPlan(x.weights * y.weights.transpose() / s);
}

Tightness tightness_diagnostics(const MmSpace& x, const MmSpace& y, const UgwSolution& sol, const UgwConfig& cfg) {
    Tightness t;
    t.f_pi_gamma = biconvex_functional_relaxed(x, y, sol.pi, sol.gamma, cfg);
    t.f_pi_pi = biconvex_functional_relaxed(x, y, sol.pi, sol.pi, cfg);
    t.f_gamma_gamma = biconvex_functional_relaxed(x, y, sol.gamma, sol.gamma, cfg);
    t.plan_gap = (sol.pi.values() - sol.gamma.values()).cwiseAbs().maxCoeff();
    return t;
}

UgwSolution solve_ugw(const MmSpace& x, const MmSpace& y, const UgwConfig& cfg,
                      const std::optional<TransportPlan>& init) {
    cfg.validate();
    UgwSolution sol;
    TransportPlan gamma = init ? *init : product_init(x, y);
    check_dims(x, y, gamma);
    if (!(gamma.mass() > 0.0)) throw std::invalid_argument("initial plan must have positive mass");
    TransportPlan pi = gamma;
    std::optional<Potentials> pot;
    const SinkhornOptions sopt{cfg.tol_pot, cfg.max_inner};

    for (int t = 1; t <= cfg.max_outer; ++t) {
        pi = gamma;
        const double m = pi.mass();
        const Mat c = local_cost(x, y, pi, cfg);
        SinkhornResult sr;
        try {
            sr = uot_sinkhorn(c, x.weights, y.weights, scaled_rho(cfg.rho1, m), scaled_rho(cfg.rho2, m),
                              m * cfg.eps, pot, sopt);
        } catch (const NumericalError&) {
            sol.outer_iterations = t;
            break;
        }
        sol.outer_iterations = t;
        sol.inner_iterations += sr.iterations;
        pot = sr.potentials;
        const double mg = sr.plan.mass();
        if (!(mg > 0.0)) {
            sol.mass_underflow = true;
            gamma = sr.plan;
            break;
        }
        // F(s pi, gamma / s) = F(pi, gamma): scale both to the common mass sqrt(m(pi) m(gamma)).
        gamma = sr.plan.scaled(std::sqrt(m / mg));
        pi = pi.scaled(std::sqrt(mg / m));
        sol.mass_lock_error = std::max(sol.mass_lock_error, std::abs(gamma.mass() - pi.mass()) / pi.mass());
        if (log_plan_gap(gamma.values(), pi.values()) < cfg.tol_plan) {
            sol.converged = true;
            break;
        }
    }
    sol.pi = pi;
    sol.gamma = gamma;
    if (pot) sol.potentials = *pot;
    sol.tightness = tightness_diagnostics(x, y, sol, cfg);
    sol.cost_biconvex = sol.tightness.f_pi_gamma;
    sol.cost_primal = ugw_functional_relaxed(x, y, pi, cfg);
    return sol;
}

DebiasedResult debiased_ugw(const MmSpace& x, const MmSpace& y, const UgwConfig& cfg) {
    const UgwSolution sxy = solve_ugw(x, y, cfg);
    const UgwSolution sxx = solve_ugw(x, x, cfg);
    const UgwSolution syy = solve_ugw(y, y, cfg);
    DebiasedResult r;
    r.cross = sxy.cost_biconvex;
    r.self_x = sxx.cost_biconvex;
    r.self_y = syy.cost_biconvex;
    const double dm = x.mass() * x.mass() - y.mass() * y.mass();
    r.correction = 0.5 * cfg.eps * dm * dm;
    r.value = r.cross - 0.5 * r.self_x - 0.5 * r.self_y + r.correction;
    r.converged = sxy.converged && sxx.converged && syy.converged;
    return r;
}

}  // namespace ugwkit
