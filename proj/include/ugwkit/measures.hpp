#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ugwkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline bool is_infinite(double x) { return x == kInf; }

// Finite metric measure space. Zero-weight atoms are removed on construction;
// `kept[i]` is the original index of atom i.
struct MmSpace {
    Mat dist;
    Vec weights;
    std::string label;
    std::vector<int> kept;

    MmSpace() = default;
    MmSpace(Mat d, Vec w, std::string name = {});

    int size() const { return static_cast<int>(weights.size()); }
    double mass() const { return weights.sum(); }
    MmSpace scaled(double kappa) const;
};

// Throws std::invalid_argument if `d` is not a symmetric, zero-diagonal, nonnegative matrix.
void check_distance_matrix(const Mat& d, double sym_tol = 0.0);

class TransportPlan {
public:
    TransportPlan() = default;
    explicit TransportPlan(Mat values);

    const Mat& values() const { return values_; }
    const Vec& row_marginal() const { return rows_; }
    const Vec& col_marginal() const { return cols_; }
    double mass() const { return mass_; }
    int rows() const { return static_cast<int>(values_.rows()); }
    int cols() const { return static_cast<int>(values_.cols()); }

    TransportPlan scaled(double t) const { return TransportPlan(values_ * t); }
    TransportPlan transposed() const { return TransportPlan(values_.transpose()); }

private:
    Mat values_;
    Vec rows_;
    Vec cols_;
    double mass_ = 0.0;
};

struct Marginals {
    Vec rows;
    Vec cols;
    double mass;
};

Marginals marginals(const TransportPlan& plan);

Vec tensor(const Vec& a, const Vec& b);  // flattened a⊗b, index i*len(b)+k

enum class Entropy { KL, TV, Balanced, ReverseKL };

struct EntropySpec {
    Entropy kind = Entropy::KL;
    double rho = 1.0;

    static EntropySpec kl(double rho = 1.0) { return {Entropy::KL, rho}; }
    static EntropySpec tv(double rho = 1.0) { return {Entropy::TV, rho}; }
    static EntropySpec balanced() { return {Entropy::Balanced, 1.0}; }

    double phi(double r) const;        // entropy function, r >= 0
    double psi(double r) const;        // reverse entropy r*phi(1/r), psi(0) = recession()
    double recession() const;          // phi'(inf)
    double phi_at_zero() const { return phi(0.0); }
    EntropySpec reverse() const;       // entropy whose phi is this psi
};

inline constexpr double kBalancedTol = 1e-12;

// rho * D_phi(a|b); +inf when the recession term fires with infinite slope.
double csiszar_div(const Vec& a, const Vec& b, const EntropySpec& ent);

double kl_div(const Vec& a, const Vec& b);

// KL(a⊗a | b⊗b) through the mass decomposition.
double quad_kl(const Vec& a, const Vec& b);

// KL(a⊗c | b⊗d) for possibly different pairs.
double tensor_kl(const Vec& a, const Vec& b, const Vec& c, const Vec& d);

// Sum_i a_i log(a_i/b_i) with 0 log 0 = 0; +inf if some a_i > 0 has b_i = 0.
double xlogx_ratio(const Vec& a, const Vec& b);

}  // namespace ugwkit
