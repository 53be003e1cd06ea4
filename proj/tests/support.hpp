#pragma once

#include <cmath>
#include <functional>

#include "ugwkit/geometry.hpp"
#include "ugwkit/measures.hpp"
#include "ugwkit/rng.hpp"
#include "ugwkit/ugw.hpp"

// Random inputs and brute-force oracles shared by the unit and acceptance tests.
// The oracles deliberately avoid the library's fast paths.
namespace testkit {

using ugwkit::Mat;
using ugwkit::MmSpace;
using ugwkit::Rng;
using ugwkit::TransportPlan;
using ugwkit::UgwConfig;
using ugwkit::Vec;
using ugwkit::kInf;

inline Vec random_positive(Rng& rng, int n, double lo = 0.05, double hi = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
    return v;
}

inline Mat random_points(Rng& rng, int n, int dim) {
    Mat p(n, dim);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < dim; ++k) p(i, k) = rng.uniform();
    return p;
}

inline Mat loop_euclidean(const Mat& p) {
    Mat d(p.rows(), p.rows());
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.rows(); ++j) {
            double s = 0.0;
            for (int k = 0; k < p.cols(); ++k) s += (p(i, k) - p(j, k)) * (p(i, k) - p(j, k));
            d(i, j) = std::sqrt(s);
        }
    return d;
}

inline MmSpace random_space(Rng& rng, int n, int dim = 2, double total = -1.0) {
    Vec w = random_positive(rng, n);
    if (total > 0.0) w *= total / w.sum();
    return MmSpace(loop_euclidean(random_points(rng, n, dim)), w);
}

inline TransportPlan random_plan(Rng& rng, int n, int m, double lo = 0.01, double hi = 1.0) {
    Mat v(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) v(i, j) = rng.uniform(lo, hi);
    return TransportPlan(v);
}

// Sum a log(a/b) - a + b over atoms, 0 log 0 = 0, +inf if a > 0 where b = 0.
inline double kl_loop(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        if (b(i) == 0.0) {
            if (a(i) > 0.0) return kInf;
            continue;
        }
        if (a(i) > 0.0) s += a(i) * std::log(a(i) / b(i));
        s += b(i) - a(i);
    }
    return s;
}

inline Vec outer_flat(const Vec& a, const Vec& c) {
    Vec out(a.size() * c.size());
    for (int i = 0; i < a.size(); ++i)
        for (int k = 0; k < c.size(); ++k) out(i * c.size() + k) = a(i) * c(k);
    return out;
}

// KL(a⊗c | b⊗d), tensorized explicitly.
inline double tensor_kl_loop(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
    return kl_loop(outer_flat(a, c), outer_flat(b, d));
}

inline Vec plan_flat(const Mat& p) {
    Vec out(p.size());
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j) out(i * p.cols() + j) = p(i, j);
    return out;
}

inline Vec product_flat(const Vec& mu, const Vec& nu) { return outer_flat(mu, nu); }

inline Vec row_sums(const Mat& p) {
    Vec r = Vec::Zero(p.rows());
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j) r(i) += p(i, j);
    return r;
}

inline Vec col_sums(const Mat& p) {
    Vec c = Vec::Zero(p.cols());
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j) c(j) += p(i, j);
    return c;
}

// Sum_{i,j,k,l} (DX_ij - DY_kl)^2 pi_ik gamma_jl.
inline double distortion_loop(const Mat& dx, const Mat& dy, const Mat& pi, const Mat& gamma) {
    double s = 0.0;
    for (int i = 0; i < dx.rows(); ++i)
        for (int j = 0; j < dx.rows(); ++j)
            for (int k = 0; k < dy.rows(); ++k)
                for (int l = 0; l < dy.rows(); ++l) {
                    const double t = dx(i, j) - dy(k, l);
                    s += t * t * pi(i, k) * gamma(j, l);
                }
    return s;
}

// Penalized objective with KL penalties, every tensor built explicitly.
inline double ugw_loop(const MmSpace& x, const MmSpace& y, const Mat& pi, double rho1, double rho2, double eps) {
    const Vec p1 = row_sums(pi), p2 = col_sums(pi);
    double v = distortion_loop(x.dist, y.dist, pi, pi);
    v += rho1 * tensor_kl_loop(p1, x.weights, p1, x.weights);
    v += rho2 * tensor_kl_loop(p2, y.weights, p2, y.weights);
    if (eps > 0.0) {
        const Vec f = plan_flat(pi), r = product_flat(x.weights, y.weights);
        v += eps * tensor_kl_loop(f, r, f, r);
    }
    return v;
}

inline double biconvex_loop(const MmSpace& x, const MmSpace& y, const Mat& pi, const Mat& gamma, double rho1,
                            double rho2, double eps) {
    double v = distortion_loop(x.dist, y.dist, pi, gamma);
    v += rho1 * tensor_kl_loop(row_sums(pi), x.weights, row_sums(gamma), x.weights);
    v += rho2 * tensor_kl_loop(col_sums(pi), y.weights, col_sums(gamma), y.weights);
    if (eps > 0.0) {
        const Vec r = product_flat(x.weights, y.weights);
        v += eps * tensor_kl_loop(plan_flat(pi), r, plan_flat(gamma), r);
    }
    return v;
}

// c(i, l) = Sum_{j, k} (DX_ij - DY_lk)^2 gamma_jk + E
inline Mat local_cost_loop(const MmSpace& x, const MmSpace& y, const Mat& gamma, const UgwConfig& cfg) {
    const Vec g1 = row_sums(gamma), g2 = col_sums(gamma);
    double e = 0.0;
    auto xlog = [](const Vec& a, const Vec& b) {
        double s = 0.0;
        for (int i = 0; i < a.size(); ++i)
            if (a(i) > 0.0) s += a(i) * std::log(a(i) / b(i));
        return s;
    };
    if (!std::isinf(cfg.rho1)) e += cfg.rho1 * xlog(g1, x.weights);
    if (!std::isinf(cfg.rho2)) e += cfg.rho2 * xlog(g2, y.weights);
    e += cfg.eps * xlog(plan_flat(gamma), product_flat(x.weights, y.weights));
    Mat c(x.size(), y.size());
    for (int i = 0; i < x.size(); ++i)
        for (int l = 0; l < y.size(); ++l) {
            double s = 0.0;
            for (int j = 0; j < x.size(); ++j)
                for (int k = 0; k < y.size(); ++k) {
                    const double t = x.dist(i, j) - y.dist(l, k);
                    s += t * t * gamma(j, k);
                }
            c(i, l) = s + e;
        }
    return c;
}

// Golden section over log(theta) in [-14, 14] on an explicitly tensorized profile.
inline double oracle_theta(const std::function<double(double)>& profile) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = -14.0, hi = 14.0;
    const double base = profile(1.0);
    auto f = [&](double t) { return profile(std::exp(t)) - base; };
    double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    double fa = f(a), fb = f(b);
    for (int it = 0; it < 200; ++it) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    return std::exp(0.5 * (lo + hi));
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace testkit
