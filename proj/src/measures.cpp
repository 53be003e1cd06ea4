#include "ugwkit/measures.hpp"

#include <algorithm>

namespace ugwkit {

void check_distance_matrix(const Mat& d, double sym_tol) {
    if (d.rows() != d.cols()) throw std::invalid_argument("distance matrix must be square");
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        if (d(i, i) != 0.0) throw std::invalid_argument("distance matrix diagonal must be 0");
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
            if (!std::isfinite(d(i, j)) || d(i, j) < 0.0)
                throw std::invalid_argument("distance entries must be finite and nonnegative");
            if (std::abs(d(i, j) - d(j, i)) > sym_tol)
                throw std::invalid_argument("distance matrix must be symmetric");
        }
    }
}

MmSpace::MmSpace(Mat d, Vec w, std::string name) : label(std::move(name)) {
    if (d.rows() != w.size()) throw std::invalid_argument("distance and weight sizes differ");
    check_distance_matrix(d);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (!std::isfinite(w(i)) || w(i) < 0.0) throw std::invalid_argument("weights must be finite and nonnegative");
        if (w(i) > 0.0) kept.push_back(static_cast<int>(i));
    }
    const auto n = static_cast<Eigen::Index>(kept.size());
    dist.resize(n, n);
    weights.resize(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        weights(a) = w(kept[a]);
        for (Eigen::Index b = 0; b < n; ++b) dist(a, b) = d(kept[a], kept[b]);
    }
}

MmSpace MmSpace::scaled(double kappa) const {
    MmSpace out = *this;
    out.weights *= kappa;
    return out;
}

TransportPlan::TransportPlan(Mat values) : values_(std::move(values)) {
    if ((values_.array() < 0.0).any()) throw std::invalid_argument("plan entries must be nonnegative");
    rows_ = values_.rowwise().sum();
    cols_ = values_.colwise().sum().transpose();
    mass_ = values_.sum();
}

Marginals marginals(const TransportPlan& plan) {
    const Mat& v = plan.values();
    return {v.rowwise().sum(), v.colwise().sum().transpose(), v.sum()};
}

Vec tensor(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        for (Eigen::Index k = 0; k < b.size(); ++k) out(i * b.size() + k) = a(i) * b(k);
    return out;
}

double EntropySpec::phi(double r) const {
    switch (kind) {
        case Entropy::KL:
            return r > 0.0 ? r * std::log(r) - r + 1.0 : 1.0;
        case Entropy::TV:
            return std::abs(r - 1.0);
        case Entropy::Balanced:
            return r == 1.0 ? 0.0 : kInf;
        case Entropy::ReverseKL:
            return r > 0.0 ? r - 1.0 - std::log(r) : kInf;
    }
    return kInf;
}

double EntropySpec::recession() const {
    switch (kind) {
        case Entropy::KL:
        case Entropy::Balanced:
            return kInf;
        case Entropy::TV:
        case Entropy::ReverseKL:
            return 1.0;
    }
    return kInf;
}

double EntropySpec::psi(double r) const {
    if (r == 0.0) return recession();
    return r * phi(1.0 / r);
}

EntropySpec EntropySpec::reverse() const {
    switch (kind) {
        case Entropy::KL: return {Entropy::ReverseKL, rho};
        case Entropy::ReverseKL: return {Entropy::KL, rho};
        default: return *this;
    }
}

namespace {

void check_pair(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("divergence arguments differ in length");
    if ((a.array() < 0.0).any() || (b.array() < 0.0).any())
        throw std::invalid_argument("divergence arguments must be nonnegative");
}

}  // namespace

double xlogx_ratio(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) == 0.0) continue;
        if (b(i) == 0.0) return kInf;
        s += a(i) * std::log(a(i) / b(i));
    }
    return s;
}

double csiszar_div(const Vec& a, const Vec& b, const EntropySpec& ent) {
    check_pair(a, b);
    if (ent.kind == Entropy::Balanced) {
        const double gap = a.size() ? (a - b).cwiseAbs().maxCoeff() : 0.0;
        return gap <= kBalancedTol ? 0.0 : kInf;
    }
    double dense = 0.0;
    double singular = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (b(i) > 0.0) {
            if (ent.kind == Entropy::KL) {
                // b*phi(a/b) written without the division
                dense += (a(i) > 0.0 ? a(i) * std::log(a(i) / b(i)) : 0.0) - a(i) + b(i);
            } else if (ent.kind == Entropy::ReverseKL) {
                if (a(i) == 0.0) return kInf;
                dense += a(i) - b(i) - b(i) * std::log(a(i) / b(i));
            } else {
                dense += std::abs(a(i) - b(i));
            }
        } else {
            singular += a(i);
        }
    }
    if (singular > 0.0) {
        const double slope = ent.recession();
        if (is_infinite(slope)) return kInf;
        dense += slope * singular;
    }
    return ent.rho * dense;
}

double kl_div(const Vec& a, const Vec& b) { return csiszar_div(a, b, EntropySpec::kl(1.0)); }

double tensor_kl(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
    const double ma = a.sum(), mb = b.sum(), mc = c.sum(), md = d.sum();
    if (ma == 0.0 || mc == 0.0) {
        check_pair(a, b);
        check_pair(c, d);
        return mb * md;
    }
    const double k1 = kl_div(a, b);
    const double k2 = kl_div(c, d);
    if (is_infinite(k1) || is_infinite(k2)) return kInf;
    return mc * k1 + ma * k2 + (ma - mb) * (mc - md);
}

double quad_kl(const Vec& a, const Vec& b) {
    check_pair(a, b);
    const double ma = a.sum(), mb = b.sum();
    if (ma == 0.0) return mb * mb;
    const double k = kl_div(a, b);
    if (is_infinite(k)) return kInf;
    return 2.0 * ma * k + (ma - mb) * (ma - mb);
}

}  // namespace ugwkit
