#include "ugwkit/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "ugwkit/rng.hpp"

namespace ugwkit {

Mat pairwise_euclidean(const Mat& points) {
    const Eigen::Index n = points.rows();
    Mat d = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (points.row(i) - points.row(j)).norm();
            d(i, j) = v;
            d(j, i) = v;
        }
    return d;
}

Mat graph_geodesics(const WeightedGraph& g) {
    const int n = g.n;
    Mat d = Mat::Constant(n, n, kInf);
    for (int i = 0; i < n; ++i) d(i, i) = 0.0;
    for (const Edge& e : g.edges) {
        if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) throw std::invalid_argument("edge endpoint out of range");
        if (!(e.length > 0.0)) throw std::invalid_argument("edge lengths must be positive");
        if (e.i == e.j) continue;
        d(e.i, e.j) = std::min(d(e.i, e.j), e.length);
        d(e.j, e.i) = d(e.i, e.j);
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            const double dik = d(i, k);
            if (is_infinite(dik)) continue;
            for (int j = 0; j < n; ++j) {
                const double via = dik + d(k, j);
                if (via < d(i, j)) d(i, j) = via;
            }
        }
    if (!d.allFinite()) throw std::invalid_argument("graph is disconnected");
    return d;
}

ShapeKind parse_shape_kind(const std::string& name) {
    if (name == "ellipse2d") return ShapeKind::Ellipse2d;
    if (name == "ellipse3d") return ShapeKind::Ellipse3d;
    if (name == "square") return ShapeKind::Square;
    if (name == "sphere") return ShapeKind::Sphere;
    if (name == "two_moons_outliers") return ShapeKind::TwoMoonsOutliers;
    if (name == "community_graph") return ShapeKind::CommunityGraph;
    throw std::invalid_argument("unknown shape kind: " + name);
}

std::string shape_kind_name(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::Ellipse2d: return "ellipse2d";
        case ShapeKind::Ellipse3d: return "ellipse3d";
        case ShapeKind::Square: return "square";
        case ShapeKind::Sphere: return "sphere";
        case ShapeKind::TwoMoonsOutliers: return "two_moons_outliers";
        case ShapeKind::CommunityGraph: return "community_graph";
    }
    return "?";
}

namespace {

PointCloud ellipse2d(int n, Rng& rng) {
    PointCloud pc{Mat(n, 2), {}};
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * M_PI * rng.uniform();
        pc.points.row(i) << std::cos(t), 0.6 * std::sin(t);
    }
    return pc;
}

// Ellipse in the plane spanned by two orthonormal tilted vectors.
PointCloud ellipse3d(int n, Rng& rng) {
    Eigen::Vector3d u(1.0, 0.0, 0.0);
    Eigen::Vector3d v(0.0, std::cos(M_PI / 5.0), std::sin(M_PI / 5.0));
    PointCloud pc{Mat(n, 3), {}};
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * M_PI * rng.uniform();
        pc.points.row(i) = (std::cos(t) * u + 0.6 * std::sin(t) * v).transpose();
    }
    return pc;
}

PointCloud square(int n, Rng& rng) {
    PointCloud pc{Mat(n, 2), {}};
    for (int i = 0; i < n; ++i) {
        const double u = 4.0 * rng.uniform();
        const int side = std::min(3, static_cast<int>(u));
        const double t = u - side;
        switch (side) {
            case 0: pc.points.row(i) << t, 0.0; break;
            case 1: pc.points.row(i) << 1.0, t; break;
            case 2: pc.points.row(i) << 1.0 - t, 1.0; break;
            default: pc.points.row(i) << 0.0, 1.0 - t; break;
        }
    }
    return pc;
}

PointCloud sphere(int n, double radius, Rng& rng) {
    PointCloud pc{Mat(n, 3), {}};
    for (int i = 0; i < n; ++i) {
        Eigen::Vector3d x;
        do {
            x << rng.normal(), rng.normal(), rng.normal();
        } while (x.norm() < 1e-8);
        pc.points.row(i) = (radius * x / x.norm()).transpose();
    }
    return pc;
}

// n moon points split across the two arcs, then opt.outliers uniform points in
// a box offset to the upper right of the moons.
PointCloud two_moons(int n, const ShapeOptions& opt, Rng& rng) {
    const int total = n + opt.outliers;
    PointCloud pc{Mat(total, 2), std::vector<int>(total, 0)};
    const int first = (n + 1) / 2;
    for (int i = 0; i < n; ++i) {
        const double t = M_PI * rng.uniform();
        double x, y;
        if (i < first) {
            x = std::cos(t);
            y = std::sin(t);
            pc.tags[i] = 0;
        } else {
            x = 1.0 - std::cos(t);
            y = 0.5 - std::sin(t);
            pc.tags[i] = 1;
        }
        pc.points.row(i) << x + opt.noise * rng.normal(), y + opt.noise * rng.normal();
    }
    // moons roughly span [-1, 2] x [-0.5, 1]
    for (int i = n; i < total; ++i) {
        pc.points.row(i) << rng.uniform(2.5, 3.5), rng.uniform(1.5, 2.5);
        pc.tags[i] = kOutlierTag;
    }
    if (opt.normalize_unit_box && n > 0) {
        const Eigen::RowVectorXd lo = pc.points.topRows(n).colwise().minCoeff();
        const Eigen::RowVectorXd hi = pc.points.topRows(n).colwise().maxCoeff();
        const double span = (hi - lo).maxCoeff();
        if (span > 0.0)
            for (int i = 0; i < total; ++i) pc.points.row(i) = (pc.points.row(i) - lo) / span;
    }
    return pc;
}

}  // namespace

PointCloud gen_cloud(ShapeKind kind, int n, std::uint64_t seed, const ShapeOptions& opt) {
    if (n < 1) throw std::invalid_argument("shape size must be positive");
    Rng rng(seed);
    switch (kind) {
        case ShapeKind::Ellipse2d: return ellipse2d(n, rng);
        case ShapeKind::Ellipse3d: return ellipse3d(n, rng);
        case ShapeKind::Square: return square(n, rng);
        case ShapeKind::Sphere: return sphere(n, opt.radius, rng);
        case ShapeKind::TwoMoonsOutliers: return two_moons(n, opt, rng);
        case ShapeKind::CommunityGraph: break;
    }
    throw std::invalid_argument("shape kind is not a point cloud");
}

// Two communities of n nodes in total (split by opt.community_split), plus
// opt.outliers extra nodes each hanging off one community node. Tags are
// 0/1 for communities and kOutlierTag for outliers. A path through each
// community and one bridge keep the graph connected.
WeightedGraph community_graph(int n, std::uint64_t seed, const ShapeOptions& opt) {
    if (n < 2) throw std::invalid_argument("community graph needs at least two nodes");
    Rng rng(seed);
    WeightedGraph g;
    const int n0 = std::clamp(static_cast<int>(std::lround(opt.community_split * n)), 1, n - 1);
    g.n = n + opt.outliers;
    g.tags.assign(g.n, 0);
    for (int i = n0; i < n; ++i) g.tags[i] = 1;
    for (int i = n; i < g.n; ++i) g.tags[i] = kOutlierTag;

    auto add_block = [&](int lo, int hi) {
        for (int i = lo; i + 1 < hi; ++i) g.edges.push_back({i, i + 1, opt.intra_cost});
        for (int i = lo; i < hi; ++i)
            for (int j = i + 2; j < hi; ++j)
                if (rng.uniform() < opt.edge_prob) g.edges.push_back({i, j, opt.intra_cost});
    };
    add_block(0, n0);
    add_block(n0, n);
    g.edges.push_back({0, n0, opt.inter_cost});
    for (int e = 0; e < opt.inter_edges; ++e)
        g.edges.push_back({rng.below(n0), n0 + rng.below(n - n0), opt.inter_cost});
    for (int o = n; o < g.n; ++o) g.edges.push_back({rng.below(n), o, opt.outlier_cost});
    return g;
}

Shape gen_shape(ShapeKind kind, int n, std::uint64_t seed, const ShapeOptions& opt) {
    if (kind == ShapeKind::CommunityGraph) return community_graph(n, seed, opt);
    return gen_cloud(kind, n, seed, opt);
}

Mat random_rotation(int dim, std::uint64_t seed) {
    Rng rng(seed);
    Mat a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = rng.normal();
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j)
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    if (q.determinant() < 0.0) q.col(0) *= -1.0;
    return q;
}

PointCloud uniform_box(int n, int dim, std::uint64_t seed, double lo, double hi) {
    Rng rng(seed);
    PointCloud pc{Mat(n, dim), {}};
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < dim; ++k) pc.points(i, k) = rng.uniform(lo, hi);
    return pc;
}

Vec uniform_weights(int n, double total) { return Vec::Constant(n, total / n); }

}  // namespace ugwkit
