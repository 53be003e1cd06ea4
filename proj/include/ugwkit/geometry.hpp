#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ugwkit/measures.hpp"

namespace ugwkit {

struct PointCloud {
    Mat points;             // one point per row
    std::vector<int> tags;  // empty, or one tag per point
};

struct Edge {
    int i;
    int j;
    double length;
};

struct WeightedGraph {
    int n = 0;
    std::vector<Edge> edges;
    std::vector<int> tags;
};

Mat pairwise_euclidean(const Mat& points);

// All-pairs shortest paths (Floyd-Warshall). Throws on a disconnected graph.
Mat graph_geodesics(const WeightedGraph& g);

enum class ShapeKind { Ellipse2d, Ellipse3d, Square, Sphere, TwoMoonsOutliers, CommunityGraph };

ShapeKind parse_shape_kind(const std::string& name);
std::string shape_kind_name(ShapeKind kind);

inline constexpr int kOutlierTag = -1;

struct ShapeOptions {
    double radius = 1.0;           // sphere
    int outliers = 10;             // two moons: outlier points; graph: outlier nodes
    double noise = 0.05;           // two moons gaussian jitter
    bool normalize_unit_box = true;  // two moons rescaled into [0,1]^2 (outliers excluded from the fit)
    double community_split = 0.5;  // graph: fraction of non-outlier nodes in community 0
    double edge_prob = 0.3;        // graph: intra-community edge probability
    int inter_edges = 2;           // graph: random edges between communities
    double intra_cost = 1.0;
    double inter_cost = 4.0;
    double outlier_cost = 2.0;
};

using Shape = std::variant<PointCloud, WeightedGraph>;

Shape gen_shape(ShapeKind kind, int n, std::uint64_t seed, const ShapeOptions& opt = {});

PointCloud gen_cloud(ShapeKind kind, int n, std::uint64_t seed, const ShapeOptions& opt = {});

WeightedGraph community_graph(int n, std::uint64_t seed, const ShapeOptions& opt = {});

Mat random_rotation(int dim, std::uint64_t seed);

PointCloud uniform_box(int n, int dim, std::uint64_t seed, double lo = 0.0, double hi = 1.0);

Vec uniform_weights(int n, double total = 1.0);

}  // namespace ugwkit
