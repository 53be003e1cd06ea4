#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ugwkit/conic.hpp"
#include "ugwkit/io.hpp"
#include "ugwkit/ugw.hpp"

namespace ugwkit {

// Labels the ceil(r*m) atoms with the largest column marginal +1 (lower index wins ties), the rest -1.
std::vector<int> pu_predict(const TransportPlan& plan, double r);

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

// min over theta of the unregularized functional at theta*pi.
double rescaled_unregularized(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, const UgwConfig& cfg);

// CGW / UGW with 0/0 read as 1.
double cost_ratio(double cgw, double ugw);

struct DriverResult {
    std::vector<std::pair<std::string, Table>> tables;
    json manifest;
    bool converged = true;

    const Table& table(const std::string& name) const;
};

MmSpace euclidean_space(const Mat& points, double total_mass = 1.0, const std::string& label = {});

struct RatioHistOptions {
    std::vector<int> sizes{2, 3, 5};
    int trials = 50;
    int dim = 2;
    double rho = 0.1;
    double eps = 1e-3;
    int K = 10;
    int L = 10;
    int restarts = 20;
    double bin_width = 0.05;
    double bin_max = 1.5;
    std::uint64_t seed = 0;
};
DriverResult run_ratio_hist(const RatioHistOptions& opt);

struct PerturbOptions {
    int n = 3;
    int dim = 2;
    std::vector<double> ts{0.0, 1e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0};
    double rho = 0.1;
    double eps = 1e-3;
    int K = 10;
    int L = 10;
    int restarts = 20;
    std::uint64_t seed = 0;
};
DriverResult run_perturb(const PerturbOptions& opt);

struct MoonsOptions {
    int n = 40;
    int outliers = 8;
    std::vector<double> rhos{10.0, 1.0, 0.1, 0.01};
    double eps = 1e-2;
    int seeds = 1;
    std::uint64_t seed = 0;
};
DriverResult run_moons(const MoonsOptions& opt);

struct GraphMatchOptions {
    int n_x = 20;
    int n_y = 20;
    int outliers = 4;
    double split_y = 0.7;
    std::vector<double> epss{0.5, 3.0};
    std::vector<double> rhos{kInf, 10.0, 1.0, 0.1};
    std::uint64_t seed = 0;
};
DriverResult run_graph_match(const GraphMatchOptions& opt);

struct ScaleBiasOptions {
    int n = 6;
    int dim = 2;
    int instances = 1;
    std::vector<double> kappas{0.1, 0.5, 1.0, 2.0, 10.0};
    double rho = 1.0;
    std::uint64_t seed = 0;
};
DriverResult run_scale_bias(const ScaleBiasOptions& opt);

// Scaling table for a given pair with pi = mu⊗nu held fixed.
Table scale_table(const MmSpace& x, const MmSpace& y, double rho, const std::vector<double>& kappas);

struct PuOptions {
    int n = 40;
    int m = 40;
    double ratio = 0.2;
    int folds = 4;  // first half validates (rho1, rho2), second half is scored
    int k_min = 5;
    int k_max = 10;
    double eps = 1e-2;
    int dim_x = 2;
    int dim_y = 3;
    std::uint64_t seed = 0;
};
DriverResult run_pu(const PuOptions& opt);

}  // namespace ugwkit
