#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "ugwkit/sinkhorn.hpp"

using namespace ugwkit;
using namespace testkit;

namespace {

Mat random_cost(Rng& rng, int n, int m, double scale = 1.0) {
    Mat c(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) c(i, j) = scale * rng.uniform();
    return c;
}

double sup_change(const Mat& c, const Vec& mu, const Vec& nu, const SinkhornResult& r, double rho1, double rho2,
                  double eps) {
    const Vec f = sinkhorn_update_f(c, r.potentials.g, nu.array().log().matrix(), rho1, eps);
    const Vec g = sinkhorn_update_g(c, f, mu.array().log().matrix(), rho2, eps);
    return std::max((f - r.potentials.f).cwiseAbs().maxCoeff(), (g - r.potentials.g).cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("prefactor") {
    CHECK(sinkhorn_prefactor(kInf, 0.1) == 0.1);
    CHECK(sinkhorn_prefactor(1.0, 1.0) == 0.5);
    CHECK(sinkhorn_prefactor(0.3, 0.1) == doctest::Approx(0.1 * 0.3 / 0.4));
}

TEST_CASE("zero cost balanced fixed point") {
    const Vec mu = Vec::Constant(4, 0.25), nu = Vec::Constant(3, 1.0 / 3.0);
    const SinkhornResult r = uot_sinkhorn(Mat::Zero(4, 3), mu, nu, kInf, kInf, 0.1);
    CHECK(r.converged);
    CHECK((r.plan.values() - mu * nu.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(r.potentials.f.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(r.potentials.g.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("one-by-one closed form") {
    for (const auto& [c, a, b, rho, eps] : std::vector<std::tuple<double, double, double, double, double>>{
             {0.7, 2.0, 0.5, 1.0, 0.1}, {0.0, 1.0, 1.0, 0.3, 0.05}, {3.0, 0.2, 5.0, 2.0, 1.0}, {1.0, 1.5, 1.5, 10.0, 0.01}}) {
        const SinkhornResult r = uot_sinkhorn(Mat::Constant(1, 1, c), Vec::Constant(1, a), Vec::Constant(1, b), rho,
                                              rho, eps, std::nullopt, {1e-14, 100000});
        REQUIRE(r.converged);
        const double p = std::pow(a * b, (rho + eps) / (2.0 * rho + eps)) * std::exp(-c / (2.0 * rho + eps));
        CHECK(r.plan.mass() == doctest::Approx(p).epsilon(1e-10));
        // first-order condition of the scalar problem
        CHECK(c + rho * std::log(p / a) + rho * std::log(p / b) + eps * std::log(p / (a * b)) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("random 5x5 satisfies both update equations") {
    Rng rng(31);
    const Mat c = random_cost(rng, 5, 5);
    const Vec mu = random_positive(rng, 5), nu = random_positive(rng, 5);
    const SinkhornResult r = uot_sinkhorn(c, mu, nu, 1.0, 1.0, 0.05);
    REQUIRE(r.converged);
    CHECK(r.residual <= 1e-6);
    CHECK(sup_change(c, mu, nu, r, 1.0, 1.0, 0.05) <= 1e-6);
}

TEST_CASE("fixed point at a tight tolerance") {
    Rng rng(32);
    for (int t = 0; t < 20; ++t) {
        const int n = 2 + rng.below(8), m = 2 + rng.below(8);
        const Mat c = random_cost(rng, n, m);
        const Vec mu = random_positive(rng, n), nu = random_positive(rng, m);
        const double rho = t % 2 ? kInf : rng.uniform(0.1, 5.0);
        const Vec mup = rho == kInf ? Vec(mu / mu.sum()) : mu, nup = rho == kInf ? Vec(nu / nu.sum()) : nu;
        const SinkhornResult r = uot_sinkhorn(c, mup, nup, rho, rho, 0.1, std::nullopt, {1e-9, 100000});
        REQUIRE(r.converged);
        CHECK(sup_change(c, mup, nup, r, rho, rho, 0.1) <= 1e-8);
        if (rho == kInf) {
            const double viol = (r.plan.row_marginal() - mup).lpNorm<1>() + (r.plan.col_marginal() - nup).lpNorm<1>();
            CHECK(viol <= 1e-6);
        }
    }
}

TEST_CASE("plan from potentials") {
    Rng rng(33);
    const Mat c = random_cost(rng, 4, 6);
    const Vec mu = random_positive(rng, 4), nu = random_positive(rng, 6);
    const Vec f = random_positive(rng, 4, -1.0, 1.0), g = random_positive(rng, 6, -1.0, 1.0);
    const double eps = 0.3;
    const TransportPlan p = plan_from_potentials(f, g, c, eps, mu, nu);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 6; ++j)
            CHECK(p.values()(i, j) == doctest::Approx(std::exp((f(i) + g(j) - c(i, j)) / eps) * mu(i) * nu(j)).epsilon(1e-14));

    const TransportPlan zero = plan_from_potentials(Vec::Zero(4), Vec::Zero(6), Mat::Zero(4, 6), eps, mu, nu);
    CHECK((zero.values() - mu * nu.transpose()).cwiseAbs().maxCoeff() == 0.0);

    for (double t : {-3.0, 0.25, 1.7}) {
        const TransportPlan q = plan_from_potentials(f.array() + t, g.array() - t, c, eps, mu, nu);
        CHECK(((q.values() - p.values()).array().abs() <= 1e-12 * p.values().array()).all());
    }
}

TEST_CASE("log-domain stability at large cost scale") {
    Rng rng(34);
    for (double rho : {kInf, 1.0, 1e-2}) {
        const Mat c = random_cost(rng, 8, 7, 1e3);
        const Vec mu = Vec::Constant(8, 1.0 / 8), nu = Vec::Constant(7, 1.0 / 7);
        const SinkhornResult r = uot_sinkhorn(c, mu, nu, rho, rho, 1e-3);
        CHECK(r.potentials.f.allFinite());
        CHECK(r.potentials.g.allFinite());
        CHECK(r.plan.values().allFinite());
    }
}

TEST_CASE("transported mass is nondecreasing in rho") {
    int violations = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(100 + seed);
        const int n = 3 + rng.below(6), m = 3 + rng.below(6);
        const Mat c = random_cost(rng, n, m);
        const Vec mu = random_positive(rng, n), nu = random_positive(rng, m);
        double prev = -1.0;
        for (double rho : {1e-2, 1e-1, 1.0, 10.0}) {
            const SinkhornResult r = uot_sinkhorn(c, mu, nu, rho, rho, 0.05, std::nullopt, {1e-10, 100000});
            REQUIRE(r.converged);
            if (r.plan.mass() < prev) ++violations;
            prev = r.plan.mass();
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("rho1 pairs with the row side") {
    Rng rng(35);
    const Mat c = random_cost(rng, 4, 5);
    const Vec mu = random_positive(rng, 4), nu = random_positive(rng, 5);
    const SinkhornResult r = uot_sinkhorn(c, mu, nu, kInf, 0.5, 0.1, std::nullopt, {1e-12, 100000});
    REQUIRE(r.converged);
    // the last update is on g, so an exact row constraint needs one more f step; the fixed point makes it tight
    CHECK((r.plan.row_marginal() - mu).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((r.plan.col_marginal() - nu).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("warm start and argument checks") {
    Rng rng(36);
    const Mat c = random_cost(rng, 3, 3);
    const Vec mu = random_positive(rng, 3), nu = random_positive(rng, 3);
    const SinkhornResult cold = uot_sinkhorn(c, mu, nu, 1.0, 1.0, 0.1);
    const SinkhornResult warm = uot_sinkhorn(c, mu, nu, 1.0, 1.0, 0.1, cold.potentials);
    CHECK(warm.iterations <= 2);
    CHECK_THROWS(uot_sinkhorn(c, mu, nu, 1.0, 1.0, 0.0));
    CHECK_THROWS(uot_sinkhorn(c, mu, Vec::Ones(2), 1.0, 1.0, 0.1));
    const SinkhornResult capped = uot_sinkhorn(c, mu, nu, 1.0, 1.0, 1e-3, std::nullopt, {1e-15, 2});
    CHECK_FALSE(capped.converged);
    CHECK(capped.iterations == 2);
}
