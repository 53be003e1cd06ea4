#pragma once

#include <cstdint>
#include <vector>

#include "ugwkit/lp.hpp"
#include "ugwkit/measures.hpp"

namespace ugwkit {

enum class ConeSetting { GaussianHellinger, HellingerKantorovich, PartialTV };

struct ConeMetricSpec {
    ConeSetting setting = ConeSetting::GaussianHellinger;
    double rho = 1.0;
    double q = 2.0;             // PTV only; GH and HK use q = 2
    bool literal_gh = false;    // GH: e^{-d/2} instead of e^{-d^2/(2 rho)}

    static ConeMetricSpec gh(double rho) { return {ConeSetting::GaussianHellinger, rho, 2.0, false}; }
    static ConeMetricSpec hk(double rho) { return {ConeSetting::HellingerKantorovich, rho, 2.0, false}; }
    static ConeMetricSpec ptv(double rho, double q = 1.0) { return {ConeSetting::PartialTV, rho, q, false}; }

    double p() const { return setting == ConeSetting::PartialTV ? 1.0 : 2.0; }
    double exponent_q() const { return setting == ConeSetting::PartialTV ? q : 2.0; }
};

inline constexpr int kApex = -1;

struct ConePoint {
    int base = 0;
    double r = 0.0;
};

// D^q between [x, r] and [y, s] whose bases are at distance d.
double cone_dist(const ConeMetricSpec& spec, double r, double s, double d);
double cone_dist(const ConeMetricSpec& spec, const ConePoint& a, const ConePoint& b, double base_distance);

// The ground cost lambda(d) whose KL or TV perspective gives the setting's cone distance.
double cone_ground_cost(const ConeMetricSpec& spec, double d);

// inf_{theta >= 0} theta * (c + rho psi(r/theta) + rho psi(s/theta)); closed form for KL and TV.
double perspective_H(double c, double r, double s, const EntropySpec& ent);
// Numerical minimization over theta; works for any entropy with finite phi(0) or not.
double perspective_H_generic(double c, double r, double s, const EntropySpec& ent);

struct ConicAtom {
    int i = 0;
    double r = 0.0;
    int j = 0;
    double s = 0.0;
    double w = 0.0;
};

using AtomPlan = std::vector<ConicAtom>;

// Grid plan over (i, j, k, l) with radii r_k = k R / K and s_l = l R / L.
struct ConicGrid {
    int n = 0, m = 0, K = 0, L = 0;
    double R = 0.0;
    Vec alpha;

    ConicGrid() = default;
    ConicGrid(int n_, int m_, int K_, int L_, double R_);

    Eigen::Index index(int i, int j, int k, int l) const {
        return ((static_cast<Eigen::Index>(i) * m + j) * (K + 1) + k) * (L + 1) + l;
    }
    Eigen::Index size() const { return static_cast<Eigen::Index>(n) * m * (K + 1) * (L + 1); }
    double radius_r(int k) const { return k * R / K; }
    double radius_s(int l) const { return l * R / L; }
    AtomPlan atoms() const;
};

// Each atom (i, r, j, s, w) becomes (i, r/v, j, s/v, w v^p).
AtomPlan dilate(const AtomPlan& alpha, const Vec& v, double p);
AtomPlan dilate(const ConicGrid& alpha, const Vec& v, double p);

AtomPlan conic_lift(const TransportPlan& pi, const Vec& mu, const Vec& nu, double p);

struct UpResidual {
    double mu = 0.0;
    double nu = 0.0;
    Vec row;  // per-atom moment minus mu_i
    Vec col;
    double max() const { return std::max(mu, nu); }
};

UpResidual up_residual(const AtomPlan& alpha, const Vec& mu, const Vec& nu, double p);

double conic_energy(const AtomPlan& alpha, const Mat& dx, const Mat& dy, const ConeMetricSpec& spec);
double conic_energy(const ConicGrid& alpha, const Mat& dx, const Mat& dy, const ConeMetricSpec& spec);

// GH linearized cost of the grid energy at beta, same layout as beta.alpha.
Vec conic_local_cost(const ConicGrid& beta, const Mat& dx, const Mat& dy, const ConeMetricSpec& spec);

struct CgwOptions {
    int K = 10;
    int L = 10;
    int random_restarts = 10;
    int permutation_restarts = 10;
    int max_rounds = 200;
    double rel_tol = 1e-9;
    std::uint64_t seed = 0;
};

struct CgwRestart {
    bool permutation = false;
    double cost = kInf;
    int rounds = 0;
    bool lp_ok = true;
};

struct CgwResult {
    ConicGrid alpha;
    double cost = kInf;
    std::vector<CgwRestart> restarts;
    bool ok = false;
};

ConicGrid cgw_random_init(const Vec& mu, const Vec& nu, int K, int L, std::uint64_t seed);
ConicGrid cgw_permutation_init(const Vec& mu, const Vec& nu, int K, int L, std::uint64_t seed);
LpProblem cgw_lp(const ConicGrid& shape, const Vec& cost, const Vec& mu, const Vec& nu);

CgwResult solve_cgw(const MmSpace& x, const MmSpace& y, const ConeMetricSpec& spec, const CgwOptions& opt = {});

}  // namespace ugwkit
