#include "ugwkit/scaling.hpp"

#include <cmath>
#include <stdexcept>

#include "ugwkit/ugw.hpp"

namespace ugwkit {

double lambert_w(double z) {
    if (!(z >= 0.0)) throw std::domain_error("lambert_w requires z >= 0");
    if (z == 0.0) return 0.0;
    if (is_infinite(z)) return kInf;
    double w = z < 1.0 ? std::log1p(z) : std::log(z) - (z > M_E ? std::log(std::log(z)) : 0.0);
    if (z >= 1.0 && w < 0.5) w = 0.5;
    for (int it = 0; it < 100; ++it) {
        const double ew = std::exp(w);
        const double r = w * ew - z;
        const double d = ew * (w + 1.0) - (w + 2.0) * r / (2.0 * w + 2.0);
        const double step = r / d;
        w -= step;
        if (std::abs(step) <= 4e-16 * (1.0 + std::abs(w))) break;
    }
    return w;
}

double lambert_w_of_exp(double log_z) {
    if (log_z < 500.0) return lambert_w(std::exp(log_z));
    // w + log w = log_z
    double w = log_z - std::log(log_z);
    for (int it = 0; it < 100; ++it) {
        const double step = (w + std::log(w) - log_z) / (1.0 + 1.0 / w);
        w -= step;
        if (std::abs(step) <= 4e-16 * w) break;
    }
    return w;
}

double golden_section_min(const std::function<double(double)>& f, double lo, double hi, int iters) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < iters && b - a > 0.0; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

double scale_profile(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, double rho, double eps,
                     double theta) {
    UgwConfig cfg;
    cfg.rho1 = rho;
    cfg.rho2 = rho;
    cfg.eps = eps;
    return ugw_functional_relaxed(x, y, pi.scaled(theta), cfg);
}

namespace {

Vec flat(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

}  // namespace

QuadraticScale optimal_scale_quadratic(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, double rho,
                                       double eps) {
    const double m = pi.mass();
    if (!(m > 0.0)) throw std::invalid_argument("optimal scaling needs a nonzero plan");
    if (!(rho > 0.0) || !(eps >= 0.0)) throw std::invalid_argument("optimal scaling needs rho > 0, eps >= 0");

    // S_a = sum log(a a'/(b b')) a a' = 2 m(a) sum a log(a/b)
    const double d = distortion_cost(x.dist, y.dist, pi, pi);
    const double s1 = 2.0 * m * xlogx_ratio(pi.row_marginal(), x.weights);
    const double s2 = 2.0 * m * xlogx_ratio(pi.col_marginal(), y.weights);
    const double sp = eps > 0.0 ? 2.0 * m * xlogx_ratio(flat(pi.values()), flat(x.weights * y.weights.transpose()))
                                : 0.0;
    const double rhs = -(d + rho * s1 + rho * s2 + eps * sp);
    const double k = 2.0 * (2.0 * rho + eps);
    auto residual = [&](double theta) { return k * m * m * std::log(theta) - rhs; };

    QuadraticScale q;
    q.theta_closed = std::exp(rhs / (k * m * m));
    q.theta_single_mass = std::exp(rhs / (k * m));
    const double shift = scale_profile(x, y, pi, rho, eps, 1.0);
    const double lt = golden_section_min(
        [&](double t) { return scale_profile(x, y, pi, rho, eps, std::exp(t)) - shift; }, -14.0, 14.0, 200);
    q.theta_oracle = std::exp(lt);
    q.single_mass_matches = close_rel(q.theta_single_mass, q.theta_oracle, 1e-6);
    if (close_rel(q.theta_closed, q.theta_oracle, 1e-6)) {
        q.theta = q.theta_closed;
    } else {
        q.theta = q.theta_oracle;
        q.discrepancy = true;
    }
    q.foc_residual = residual(q.theta);
    return q;
}

LinearScale solve_linear_foc(double a, double b, double c) {
    if (!(a > 0.0) || !(b >= 0.0)) throw std::invalid_argument("linear scaling needs a > 0 and b >= 0");
    LinearScale s;
    s.a = a;
    s.b = b;
    s.c = c;
    auto h = [&](double u) { return a * u + 2.0 * b * std::exp(u) + c; };

    double u_lambert;
    if (b == 0.0) {
        u_lambert = -c / a;
    } else {
        u_lambert = -c / a - lambert_w_of_exp(std::log(2.0 * b / a) - c / a);
    }
    s.theta_lambert = std::exp(u_lambert);
    const double u_alt = b == 0.0 ? -c / a : lambert_w_of_exp(std::log(b / a) - c / a) - c / a;
    s.theta_alt_form = std::exp(u_alt);
    s.alt_form_residual = h(u_alt);

    // Safeguarded Newton on u = log theta; h is strictly increasing.
    double lo = u_lambert - 1.0, hi = u_lambert + 1.0;
    while (h(lo) > 0.0) lo -= 2.0 * (hi - lo);
    while (h(hi) < 0.0) hi += 2.0 * (hi - lo);
    double u = std::isfinite(u_lambert) ? u_lambert : 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double hv = h(u);
        if (hv == 0.0) break;
        if (hv < 0.0) lo = u; else hi = u;
        double next = u - hv / (a + 2.0 * b * std::exp(u));
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - u) <= 1e-16 * (1.0 + std::abs(u))) {
            u = next;
            break;
        }
        u = next;
    }
    s.theta = std::exp(u);
    s.foc_residual = a * std::log(s.theta) + 2.0 * b * s.theta + c;
    return s;
}

LinearScale optimal_scale_linear(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, double rho) {
    const double m = pi.mass();
    if (!(m > 0.0)) throw std::invalid_argument("optimal scaling needs a nonzero plan");
    if (!(rho > 0.0)) throw std::invalid_argument("optimal scaling needs rho > 0");
    const double a = 2.0 * rho * m;
    const double b = distortion_cost(x.dist, y.dist, pi, pi);
    const double c = rho * xlogx_ratio(pi.row_marginal(), x.weights) + rho * xlogx_ratio(pi.col_marginal(), y.weights);
    return solve_linear_foc(a, b, c);
}

std::vector<ScalingReport> scaling_bias_report(const MmSpace& x, const MmSpace& y, const TransportPlan& pi,
                                               double rho, const std::vector<double>& kappas) {
    std::vector<ScalingReport> out;
    for (double kappa : kappas) {
        if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
        const MmSpace xk = x.scaled(kappa), yk = y.scaled(kappa);
        const QuadraticScale q = optimal_scale_quadratic(xk, yk, pi, rho, 0.0);
        const LinearScale l = optimal_scale_linear(xk, yk, pi, rho);
        out.push_back({kappa, q.theta, l.theta, q.foc_residual, l.foc_residual});
    }
    return out;
}

}  // namespace ugwkit
