#include "ugwkit/conic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ugwkit/rng.hpp"
#include "ugwkit/scaling.hpp"

namespace ugwkit {

double cone_ground_cost(const ConeMetricSpec& spec, double d) {
    switch (spec.setting) {
        case ConeSetting::GaussianHellinger:
            return spec.literal_gh ? spec.rho * d : d * d;
        case ConeSetting::HellingerKantorovich:
            return d >= M_PI / 2.0 ? kInf : -2.0 * std::log(std::cos(d));
        case ConeSetting::PartialTV:
            return std::pow(d, spec.q);
    }
    return kInf;
}

double cone_dist(const ConeMetricSpec& spec, double r, double s, double d) {
    const double rho = spec.rho;
    switch (spec.setting) {
        case ConeSetting::GaussianHellinger: {
            const double k = spec.literal_gh ? std::exp(-d / 2.0) : std::exp(-d * d / (2.0 * rho));
            return rho * (r * r + s * s - 2.0 * r * s * k);
        }
        case ConeSetting::HellingerKantorovich: {
            const double k = d >= M_PI / 2.0 ? 0.0 : std::pow(std::cos(d), 1.0 / rho);
            return rho * (r * r + s * s - 2.0 * r * s * k);
        }
        case ConeSetting::PartialTV: {
            const double cut = std::max(0.0, 2.0 * rho - std::pow(d, spec.q));
            return rho * (r + s) - std::min(r, s) * cut;
        }
    }
    return kInf;
}

double cone_dist(const ConeMetricSpec& spec, const ConePoint& a, const ConePoint& b, double base_distance) {
    return cone_dist(spec, a.r, b.r, base_distance);
}

double perspective_H(double c, double r, double s, const EntropySpec& ent) {
    const double rho = ent.rho;
    if (r == 0.0 && s == 0.0) return 0.0;
    switch (ent.kind) {
        case Entropy::KL:
            if (is_infinite(c)) return rho * (r + s);
            return rho * (r + s - 2.0 * std::sqrt(r * s) * std::exp(-c / (2.0 * rho)));
        case Entropy::TV:
            return std::min(rho * (r + s), std::min(r, s) * c + rho * std::abs(r - s));
        case Entropy::Balanced:
            return r == s ? r * c : kInf;
        case Entropy::ReverseKL:
            break;
    }
    return perspective_H_generic(c, r, s, ent);
}

double perspective_H_generic(double c, double r, double s, const EntropySpec& ent) {
    if (r == 0.0 && s == 0.0) return 0.0;
    const double rho = ent.rho;
    // theta * psi(r / theta) = r * phi(theta / r); r = 0 leaves theta * phi'(inf)
    auto part = [&](double a, double theta) {
        if (a > 0.0) return a * ent.phi(theta / a);
        const double rec = ent.recession();
        return is_infinite(rec) ? kInf : theta * rec;
    };
    auto g = [&](double theta) {
        const double lin = is_infinite(c) ? kInf : theta * c;
        return lin + rho * (part(r, theta) + part(s, theta));
    };
    const double phi0 = ent.phi_at_zero();
    const double at_zero = is_infinite(phi0) ? kInf : rho * phi0 * (r + s);
    // phi is nondecreasing past 1 and c >= 0, so the minimizer lies in [0, max(r, s)].
    const double hi = std::max(r, s);
    const double t = golden_section_min(g, 0.0, hi, 300);
    return std::min({at_zero, g(t), g(hi)});
}

ConicGrid::ConicGrid(int n_, int m_, int K_, int L_, double R_) : n(n_), m(m_), K(K_), L(L_), R(R_) {
    if (K < 1 || L < 1) throw std::invalid_argument("grid needs K, L >= 1");
    alpha = Vec::Zero(size());
}

AtomPlan ConicGrid::atoms() const {
    AtomPlan out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k <= K; ++k)
                for (int l = 0; l <= L; ++l) {
                    const double w = alpha(index(i, j, k, l));
                    if (w != 0.0) out.push_back({i, radius_r(k), j, radius_s(l), w});
                }
    return out;
}

AtomPlan dilate(const AtomPlan& alpha, const Vec& v, double p) {
    if (static_cast<size_t>(v.size()) != alpha.size()) throw std::invalid_argument("one scaling per atom expected");
    AtomPlan out = alpha;
    for (size_t a = 0; a < out.size(); ++a) {
        const double va = v(static_cast<Eigen::Index>(a));
        if (out[a].w != 0.0 && !(va > 0.0)) throw std::invalid_argument("dilation must be positive on the support");
        out[a].r /= va;
        out[a].s /= va;
        out[a].w *= std::pow(va, p);
    }
    return out;
}

AtomPlan dilate(const ConicGrid& alpha, const Vec& v, double p) { return dilate(alpha.atoms(), v, p); }

AtomPlan conic_lift(const TransportPlan& pi, const Vec& mu, const Vec& nu, double p) {
    if (pi.rows() != mu.size() || pi.cols() != nu.size()) throw std::invalid_argument("lift shape mismatch");
    const Vec& p1 = pi.row_marginal();
    const Vec& p2 = pi.col_marginal();
    AtomPlan out;
    for (int i = 0; i < pi.rows(); ++i)
        for (int j = 0; j < pi.cols(); ++j) {
            const double w = pi.values()(i, j);
            if (w <= 0.0) continue;
            out.push_back({i, std::pow(mu(i) / p1(i), 1.0 / p), j, std::pow(nu(j) / p2(j), 1.0 / p), w});
        }
    for (int i = 0; i < pi.rows(); ++i)
        if (p1(i) == 0.0 && mu(i) > 0.0) out.push_back({i, 1.0, kApex, 0.0, mu(i)});
    for (int j = 0; j < pi.cols(); ++j)
        if (p2(j) == 0.0 && nu(j) > 0.0) out.push_back({kApex, 0.0, j, 1.0, nu(j)});
    return out;
}

UpResidual up_residual(const AtomPlan& alpha, const Vec& mu, const Vec& nu, double p) {
    UpResidual res;
    res.row = -mu;
    res.col = -nu;
    for (const ConicAtom& a : alpha) {
        if (a.i != kApex) res.row(a.i) += std::pow(a.r, p) * a.w;
        if (a.j != kApex) res.col(a.j) += std::pow(a.s, p) * a.w;
    }
    res.mu = res.row.size() ? res.row.cwiseAbs().maxCoeff() : 0.0;
    res.nu = res.col.size() ? res.col.cwiseAbs().maxCoeff() : 0.0;
    return res;
}

double conic_energy(const AtomPlan& alpha, const Mat& dx, const Mat& dy, const ConeMetricSpec& spec) {
    double e = 0.0;
    for (const ConicAtom& a : alpha)
        for (const ConicAtom& b : alpha) {
            const bool apex = a.i == kApex || b.i == kApex || a.j == kApex || b.j == kApex;
            const double gap = apex ? 0.0 : std::abs(dx(a.i, b.i) - dy(a.j, b.j));
            e += a.w * b.w * cone_dist(spec, a.r * b.r, a.s * b.s, gap);
        }
    return e;
}

double conic_energy(const ConicGrid& alpha, const Mat& dx, const Mat& dy, const ConeMetricSpec& spec) {
    return conic_energy(alpha.atoms(), dx, dy, spec);
}

Vec conic_local_cost(const ConicGrid& beta, const Mat& dx, const Mat& dy, const ConeMetricSpec& spec) {
    if (spec.setting != ConeSetting::GaussianHellinger) throw std::invalid_argument("grid local cost is GH only");
    if (dx.rows() != beta.n || dy.rows() != beta.m || beta.alpha.size() != beta.size())
        throw std::invalid_argument("conic_local_cost dimension mismatch");
    const int n = beta.n, m = beta.m, K = beta.K, L = beta.L;
    const double rho = spec.rho;
    double sr = 0.0, ss = 0.0;
    Mat t = Mat::Zero(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k <= K; ++k)
                for (int l = 0; l <= L; ++l) {
                    const double w = beta.alpha(beta.index(i, j, k, l));
                    if (w == 0.0) continue;
                    const double r = beta.radius_r(k), s = beta.radius_s(l);
                    sr += r * r * w;
                    ss += s * s * w;
                    t(i, j) += r * s * w;
                }
    Mat g = Mat::Zero(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int i2 = 0; i2 < n; ++i2)
                for (int j2 = 0; j2 < m; ++j2) {
                    if (t(i2, j2) == 0.0) continue;
                    const double gap = std::abs(dx(i, i2) - dy(j, j2));
                    const double k = spec.literal_gh ? std::exp(-gap / 2.0) : std::exp(-gap * gap / (2.0 * rho));
                    acc += k * t(i2, j2);
                }
            g(i, j) = acc;
        }
    Vec c(beta.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k <= K; ++k)
                for (int l = 0; l <= L; ++l) {
                    const double r = beta.radius_r(k), s = beta.radius_s(l);
                    c(beta.index(i, j, k, l)) = rho * (r * r * sr + s * s * ss - 2.0 * r * s * g(i, j));
                }
    return c;
}

namespace {

double grid_radius(const Vec& mu, const Vec& nu) {
    const double a = mu.sum(), b = nu.sum();
    return std::sqrt(a * a + b * b);
}

}  // namespace

// alpha = a_i b_j u_k v_l. Mass is first moved onto u_0 or v_0 so that the
// row and column moment equations admit a common scale.
ConicGrid cgw_random_init(const Vec& mu, const Vec& nu, int K, int L, std::uint64_t seed) {
    const int n = static_cast<int>(mu.size()), m = static_cast<int>(nu.size());
    ConicGrid g(n, m, K, L, grid_radius(mu, nu));
    Rng rng(seed);
    Vec u(K + 1), v(L + 1);
    for (int k = 0; k <= K; ++k) u(k) = rng.uniform(0.05, 1.0);
    for (int l = 0; l <= L; ++l) v(l) = rng.uniform(0.05, 1.0);
    double U = u.sum(), V = v.sum(), Ur = 0.0, Vs = 0.0;
    for (int k = 0; k <= K; ++k) Ur += g.radius_r(k) * g.radius_r(k) * u(k);
    for (int l = 0; l <= L; ++l) Vs += g.radius_s(l) * g.radius_s(l) * v(l);
    const double mm = mu.sum(), mn = nu.sum();
    // need mn * Ur * V == mm * U * Vs
    const double lhs = mn * Ur * V, rhs = mm * U * Vs;
    if (lhs > rhs) {
        const double add = lhs / (mm * Vs) - U;
        u(0) += add;
        U += add;
    } else if (rhs > lhs) {
        const double add = rhs / (mn * Ur) - V;
        v(0) += add;
        V += add;
    }
    const double c = std::sqrt(1.0 / (mn * Ur * V));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k <= K; ++k)
                for (int l = 0; l <= L; ++l)
                    g.alpha(g.index(i, j, k, l)) = (c * mu(i)) * (c * nu(j)) * u(k) * v(l);
    return g;
}

// A random partial permutation copied on every (k, l), scaled to fit under
// both moments; leftover moments go to the (K, 0) and (0, L) axis cells.
ConicGrid cgw_permutation_init(const Vec& mu, const Vec& nu, int K, int L, std::uint64_t seed) {
    const int n = static_cast<int>(mu.size()), m = static_cast<int>(nu.size());
    ConicGrid g(n, m, K, L, grid_radius(mu, nu));
    Rng rng(seed);
    std::vector<int> perm(std::max(n, m));
    std::iota(perm.begin(), perm.end(), 0);
    for (int a = static_cast<int>(perm.size()) - 1; a > 0; --a) std::swap(perm[a], perm[rng.below(a + 1)]);
    double sum_r = 0.0, sum_s = 0.0;
    for (int k = 0; k <= K; ++k) sum_r += g.radius_r(k) * g.radius_r(k);
    for (int l = 0; l <= L; ++l) sum_s += g.radius_s(l) * g.radius_s(l);
    const double mr = sum_r * (L + 1), ms = sum_s * (K + 1);
    const double R2 = g.R * g.R;
    Vec row_left = mu, col_left = nu;
    // pair i with perm[i] when both exist
    std::vector<int> partner(n, -1);
    for (int i = 0; i < n; ++i)
        if (perm[i] < m) partner[i] = perm[i];
    for (int i = 0; i < n; ++i) {
        const int j = partner[i];
        if (j < 0) continue;
        const double t = std::min(mu(i) / mr, nu(j) / ms);
        for (int k = 0; k <= K; ++k)
            for (int l = 0; l <= L; ++l) g.alpha(g.index(i, j, k, l)) = t;
        row_left(i) = std::max(0.0, mu(i) - t * mr);
        col_left(j) = std::max(0.0, nu(j) - t * ms);
    }
    for (int i = 0; i < n; ++i) {
        const int j = partner[i] >= 0 ? partner[i] : 0;
        g.alpha(g.index(i, j, K, 0)) += row_left(i) / R2;
    }
    std::vector<int> owner(m, 0);
    for (int i = 0; i < n; ++i)
        if (partner[i] >= 0) owner[partner[i]] = i;
    for (int j = 0; j < m; ++j) g.alpha(g.index(owner[j], j, 0, L)) += col_left(j) / R2;
    return g;
}

LpProblem cgw_lp(const ConicGrid& shape, const Vec& cost, const Vec& mu, const Vec& nu) {
    const int n = shape.n, m = shape.m;
    LpProblem p;
    p.objective = cost;
    p.eq_matrix = Mat::Zero(n + m, shape.size());
    p.eq_rhs.resize(n + m);
    p.eq_rhs << mu, nu;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k <= shape.K; ++k)
                for (int l = 0; l <= shape.L; ++l) {
                    const Eigen::Index c = shape.index(i, j, k, l);
                    const double r = shape.radius_r(k), s = shape.radius_s(l);
                    p.eq_matrix(i, c) = r * r;
                    p.eq_matrix(n + j, c) = s * s;
                }
    return p;
}

CgwResult solve_cgw(const MmSpace& x, const MmSpace& y, const ConeMetricSpec& spec, const CgwOptions& opt) {
    if (spec.setting != ConeSetting::GaussianHellinger) throw std::invalid_argument("solve_cgw supports GH only");
    if (opt.K < 1 || opt.L < 1) throw std::invalid_argument("grid needs K, L >= 1");
    const Vec& mu = x.weights;
    const Vec& nu = y.weights;
    CgwResult best;
    const int total = opt.random_restarts + opt.permutation_restarts;
    for (int rs = 0; rs < total; ++rs) {
        const bool perm = rs >= opt.random_restarts;
        const std::uint64_t seed = opt.seed * 1000003ULL + static_cast<std::uint64_t>(rs) * 7919ULL + 17ULL;
        ConicGrid alpha = perm ? cgw_permutation_init(mu, nu, opt.K, opt.L, seed)
                               : cgw_random_init(mu, nu, opt.K, opt.L, seed);
        CgwRestart log;
        log.permutation = perm;
        Vec c = conic_local_cost(alpha, x.dist, y.dist, spec);
        double h = alpha.alpha.dot(c);
        ConicGrid run_best = alpha;
        double run_cost = h;
        double prev_lin = kInf;
        LpProblem lp = cgw_lp(alpha, c, mu, nu);
        for (int round = 1; round <= opt.max_rounds; ++round) {
            lp.objective = c;
            const LpResult sol = solve_lp(lp);
            if (sol.status != LpStatus::Optimal) {
                log.lp_ok = false;
                break;
            }
            const double lin = sol.x.dot(c);
            alpha.alpha = sol.x;
            c = conic_local_cost(alpha, x.dist, y.dist, spec);
            h = alpha.alpha.dot(c);
            log.rounds = round;
            if (h < run_cost) {
                run_cost = h;
                run_best = alpha;
            }
            if (prev_lin - lin <= opt.rel_tol * (1.0 + std::abs(lin))) break;
            prev_lin = lin;
        }
        log.cost = run_cost;
        best.restarts.push_back(log);
        if (run_cost < best.cost) {
            best.cost = run_cost;
            best.alpha = run_best;
            best.ok = true;
        }
    }
    return best;
}

}  // namespace ugwkit
