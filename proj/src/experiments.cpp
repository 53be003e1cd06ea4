#include "ugwkit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ugwkit/flb.hpp"
#include "ugwkit/geometry.hpp"
#include "ugwkit/rng.hpp"
#include "ugwkit/scaling.hpp"

namespace ugwkit {

std::vector<int> pu_predict(const TransportPlan& plan, double r) {
    if (plan.cols() == 0) throw std::invalid_argument("empty plan");
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("positive ratio must lie in (0, 1]");
    const Vec& p2 = plan.col_marginal();
    const int m = plan.cols();
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p2(a) > p2(b); });
    const int top = std::min(m, static_cast<int>(std::ceil(r * m - 1e-12)));
    std::vector<int> labels(m, -1);
    for (int k = 0; k < top; ++k) labels[order[k]] = 1;
    return labels;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    // splitmix64 over the combined key
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double rescaled_unregularized(const MmSpace& x, const MmSpace& y, const TransportPlan& pi, const UgwConfig& cfg) {
    if (!(pi.mass() > 0.0)) return ugw_unregularized(x, y, pi, cfg);
    double theta;
    if (cfg.rho1 == cfg.rho2 && !is_infinite(cfg.rho1)) {
        theta = optimal_scale_quadratic(x, y, pi, cfg.rho1, 0.0).theta;
    } else {
        const double base = ugw_unregularized(x, y, pi, cfg);
        theta = std::exp(golden_section_min(
            [&](double t) { return ugw_unregularized(x, y, pi.scaled(std::exp(t)), cfg) - base; }, -14.0, 14.0, 200));
    }
    return std::min(ugw_unregularized(x, y, pi, cfg), ugw_unregularized(x, y, pi.scaled(theta), cfg));
}

double cost_ratio(double cgw, double ugw) {
    constexpr double tiny = 1e-12;
    if (std::abs(cgw) < tiny && std::abs(ugw) < tiny) return 1.0;
    return cgw / ugw;
}

const Table& DriverResult::table(const std::string& name) const {
    for (const auto& [k, t] : tables)
        if (k == name) return t;
    throw std::out_of_range("no table " + name);
}

MmSpace euclidean_space(const Mat& points, double total_mass, const std::string& label) {
    return MmSpace(pairwise_euclidean(points), uniform_weights(static_cast<int>(points.rows()), total_mass), label);
}

namespace {

json vec_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json("inf"));
    return a;
}

struct PairOutcome {
    double ugw = NAN;
    double ugw_primal = NAN;
    double cgw = NAN;
    bool converged = false;
};

PairOutcome compare_pair(const MmSpace& x, const MmSpace& y, double rho, double eps, int K, int L, int restarts,
                         std::uint64_t seed) {
    PairOutcome o;
    UgwConfig cfg;
    cfg.rho1 = rho;
    cfg.rho2 = rho;
    cfg.eps = eps;
    cfg.seed = seed;
    const UgwSolution sol = solve_ugw(x, y, cfg);
    o.ugw = rescaled_unregularized(x, y, sol.pi, cfg);
    o.ugw_primal = sol.cost_primal;
    CgwOptions copt;
    copt.K = K;
    copt.L = L;
    copt.random_restarts = restarts / 2;
    copt.permutation_restarts = restarts - restarts / 2;
    copt.seed = seed;
    const CgwResult cg = solve_cgw(x, y, ConeMetricSpec::gh(rho), copt);
    o.cgw = cg.cost;
    o.converged = sol.converged && cg.ok;
    return o;
}

}  // namespace

DriverResult run_ratio_hist(const RatioHistOptions& opt) {
    DriverResult res;
    Table trials{{"n", "trial", "ugw", "ugw_primal", "cgw", "ratio", "converged"}, {}};
    Table hist{{"n", "bin_lo", "bin_hi", "count"}, {}};
    for (int n : opt.sizes) {
        const int bins = static_cast<int>(std::ceil(opt.bin_max / opt.bin_width));
        std::vector<double> counts(bins + 1, 0.0);  // last bin collects overflow
        for (int t = 0; t < opt.trials; ++t) {
            const std::uint64_t s = derive_seed(opt.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t));
            const MmSpace x = euclidean_space(uniform_box(n, opt.dim, derive_seed(s, 1)).points, 1.0, "X");
            const MmSpace y = euclidean_space(uniform_box(n, opt.dim, derive_seed(s, 2)).points, 1.0, "Y");
            PairOutcome o;
            try {
                o = compare_pair(x, y, opt.rho, opt.eps, opt.K, opt.L, opt.restarts, s);
            } catch (const std::exception&) {
                o.converged = false;
            }
            res.converged = res.converged && o.converged;
            const double ratio = cost_ratio(o.cgw, o.ugw);
            trials.add({double(n), double(t), o.ugw, o.ugw_primal, o.cgw, ratio, o.converged ? 1.0 : 0.0});
            if (std::isfinite(ratio)) {
                const int b = std::clamp(static_cast<int>(std::floor(ratio / opt.bin_width)), 0, bins);
                counts[b] += 1.0;
            }
        }
        for (int b = 0; b <= bins; ++b)
            hist.add({double(n), b * opt.bin_width, b < bins ? (b + 1) * opt.bin_width : kInf, counts[b]});
    }
    res.tables = {{"ratio_trials", trials}, {"ratio_hist", hist}};
    res.manifest = {{"driver", "ratio-hist"},
                    {"seed", opt.seed},
                    {"sizes", opt.sizes},
                    {"trials", opt.trials},
                    {"dim", opt.dim},
                    {"rho", opt.rho},
                    {"eps", opt.eps},
                    {"grid_k", opt.K},
                    {"grid_l", opt.L},
                    {"restarts", opt.restarts},
                    {"bin_width", opt.bin_width},
                    {"bin_max", opt.bin_max}};
    return res;
}

DriverResult run_perturb(const PerturbOptions& opt) {
    DriverResult res;
    Table tab{{"t", "ugw", "ugw_primal", "cgw", "ratio", "converged"}, {}};
    const Mat pts = uniform_box(opt.n, opt.dim, derive_seed(opt.seed, 1)).points;
    Rng rng(derive_seed(opt.seed, 2));
    Mat delta(opt.n, opt.dim);
    for (int i = 0; i < opt.n; ++i)
        for (int k = 0; k < opt.dim; ++k) delta(i, k) = rng.normal();
    const MmSpace x = euclidean_space(pts, 1.0, "X");
    for (double t : opt.ts) {
        const MmSpace y = euclidean_space(pts + t * delta, 1.0, "Y_t");
        PairOutcome o;
        try {
            o = compare_pair(x, y, opt.rho, opt.eps, opt.K, opt.L, opt.restarts, opt.seed);
        } catch (const std::exception&) {
            o.converged = false;
        }
        res.converged = res.converged && o.converged;
        tab.add({t, o.ugw, o.ugw_primal, o.cgw, cost_ratio(o.cgw, o.ugw), o.converged ? 1.0 : 0.0});
    }
    res.tables = {{"perturb", tab}};
    res.manifest = {{"driver", "perturb"}, {"seed", opt.seed},   {"n", opt.n},     {"dim", opt.dim},
                    {"ts", vec_json(opt.ts)}, {"rho", opt.rho}, {"eps", opt.eps}, {"grid_k", opt.K},
                    {"grid_l", opt.L},       {"restarts", opt.restarts}};
    return res;
}

DriverResult run_moons(const MoonsOptions& opt) {
    DriverResult res;
    Table summary{{"seed", "rho", "outlier_mass", "uniform_share", "outlier_ratio", "total_mass", "converged"}, {}};
    Table marg{{"seed", "rho", "j", "x", "y", "outlier", "pi2"}, {}};
    for (int s = 0; s < opt.seeds; ++s) {
        const std::uint64_t base = derive_seed(opt.seed, static_cast<std::uint64_t>(s));
        ShapeOptions clean;
        clean.outliers = 0;
        ShapeOptions noisy;
        noisy.outliers = opt.outliers;
        const PointCloud px = gen_cloud(ShapeKind::TwoMoonsOutliers, opt.n, derive_seed(base, 1), clean);
        const PointCloud py = gen_cloud(ShapeKind::TwoMoonsOutliers, opt.n, derive_seed(base, 2), noisy);
        const MmSpace x = euclidean_space(px.points, 1.0, "moons");
        const MmSpace y = euclidean_space(py.points, 1.0, "moons+outliers");
        const double share = 1.0 / y.size();
        for (double rho : opt.rhos) {
            UgwConfig cfg;
            cfg.rho1 = rho;
            cfg.rho2 = rho;
            cfg.eps = opt.eps;
            double outlier_mass = NAN, total = NAN;
            bool ok = false;
            try {
                const UgwSolution sol = solve_ugw(x, y, cfg);
                ok = sol.converged;
                const Vec& p2 = sol.pi.col_marginal();
                double acc = 0.0;
                int cnt = 0;
                for (int j = 0; j < y.size(); ++j) {
                    const bool out = py.tags[j] == kOutlierTag;
                    marg.add({double(s), rho, double(j), py.points(j, 0), py.points(j, 1), out ? 1.0 : 0.0, p2(j)});
                    if (out) {
                        acc += p2(j);
                        ++cnt;
                    }
                }
                outlier_mass = cnt ? acc / cnt : 0.0;
                total = sol.pi.mass();
            } catch (const std::exception&) {
                ok = false;
            }
            res.converged = res.converged && ok;
            summary.add({double(s), rho, outlier_mass, share, outlier_mass / share, total, ok ? 1.0 : 0.0});
        }
    }
    res.tables = {{"moons_summary", summary}, {"moons_marginals", marg}};
    res.manifest = {{"driver", "moons"}, {"seed", opt.seed},  {"n", opt.n},         {"outliers", opt.outliers},
                    {"rhos", vec_json(opt.rhos)}, {"eps", opt.eps}, {"seeds", opt.seeds}};
    return res;
}

DriverResult run_graph_match(const GraphMatchOptions& opt) {
    DriverResult res;
    ShapeOptions gx;
    gx.outliers = 0;
    gx.community_split = 0.5;
    ShapeOptions gy;
    gy.outliers = opt.outliers;
    gy.community_split = opt.split_y;
    const WeightedGraph g1 = community_graph(opt.n_x, derive_seed(opt.seed, 1), gx);
    const WeightedGraph g2 = community_graph(opt.n_y, derive_seed(opt.seed, 2), gy);
    const MmSpace x(graph_geodesics(g1), uniform_weights(g1.n), "X");
    const MmSpace y(graph_geodesics(g2), uniform_weights(g2.n), "Y");
    Table plans{{"eps", "rho", "i", "j", "value"}, {}};
    Table blocks{{"eps", "rho", "tag_x", "tag_y", "mass"}, {}};
    Table runs{{"eps", "rho", "cost_biconvex", "cost_primal", "mass", "iterations", "converged", "tightness_gap"}, {}};
    for (double eps : opt.epss)
        for (double rho : opt.rhos) {
            UgwConfig cfg;
            cfg.eps = eps;
            cfg.rho1 = rho;
            cfg.rho2 = rho;
            try {
                const UgwSolution sol = solve_ugw(x, y, cfg);
                res.converged = res.converged && sol.converged;
                const Mat& p = sol.pi.values();
                for (int i = 0; i < x.size(); ++i)
                    for (int j = 0; j < y.size(); ++j) plans.add({eps, rho, double(i), double(j), p(i, j)});
                for (int tx : {0, 1})
                    for (int ty : {0, 1, kOutlierTag}) {
                        double s = 0.0;
                        for (int i = 0; i < x.size(); ++i)
                            for (int j = 0; j < y.size(); ++j)
                                if (g1.tags[i] == tx && g2.tags[j] == ty) s += p(i, j);
                        blocks.add({eps, rho, double(tx), double(ty), s});
                    }
                runs.add({eps, rho, sol.cost_biconvex, sol.cost_primal, sol.pi.mass(), double(sol.outer_iterations),
                          sol.converged ? 1.0 : 0.0, sol.tightness.max_value_gap()});
            } catch (const std::exception&) {
                res.converged = false;
                runs.add({eps, rho, NAN, NAN, NAN, 0.0, 0.0, NAN});
            }
        }
    res.tables = {{"graph_runs", runs}, {"graph_blocks", blocks}, {"graph_plans", plans}};
    res.manifest = {{"driver", "graph-match"}, {"seed", opt.seed},         {"n_x", opt.n_x},
                    {"n_y", opt.n_y},          {"outliers", opt.outliers}, {"split_y", opt.split_y},
                    {"epss", vec_json(opt.epss)}, {"rhos", vec_json(opt.rhos)},
                    {"graph_x", graph_to_json(g1)}, {"graph_y", graph_to_json(g2)}};
    return res;
}

Table scale_table(const MmSpace& x, const MmSpace& y, double rho, const std::vector<double>& kappas) {
    const TransportPlan pi(x.weights * y.weights.transpose());
    Table t{{"kappa", "theta_quadratic", "theta_linear", "residual_quadratic", "residual_linear"}, {}};
    for (const ScalingReport& r : scaling_bias_report(x, y, pi, rho, kappas))
        t.add({r.kappa, r.theta_quadratic, r.theta_linear, r.foc_residual_quadratic, r.foc_residual_linear});
    return t;
}

DriverResult run_scale_bias(const ScaleBiasOptions& opt) {
    DriverResult res;
    Table tab{{"instance", "kappa", "theta_quadratic", "theta_linear", "residual_quadratic", "residual_linear",
               "quadratic_below_linear"},
              {}};
    for (int k = 0; k < opt.instances; ++k) {
        const std::uint64_t s = derive_seed(opt.seed, static_cast<std::uint64_t>(k));
        const MmSpace x = euclidean_space(uniform_box(opt.n, opt.dim, derive_seed(s, 1)).points);
        const MmSpace y = euclidean_space(uniform_box(opt.n, opt.dim, derive_seed(s, 2)).points);
        const Table t = scale_table(x, y, opt.rho, opt.kappas);
        for (const auto& r : t.rows) tab.add({double(k), r[0], r[1], r[2], r[3], r[4], r[1] < r[2] ? 1.0 : 0.0});
    }
    res.tables = {{"scale_bias", tab}};
    res.manifest = {{"driver", "scale-bias"}, {"seed", opt.seed}, {"n", opt.n}, {"dim", opt.dim},
                    {"instances", opt.instances}, {"kappas", vec_json(opt.kappas)}, {"rho", opt.rho}};
    return res;
}

namespace {

struct PuFold {
    MmSpace x;
    MmSpace y;
    std::vector<int> truth;
};

Mat isometric_embedding(int dim, std::uint64_t seed) {
    return random_rotation(dim, seed).leftCols(2);
}

// Positives: elongated gaussian; negatives: round blob at a fixed offset. Both
// domains see the same latent classes through different isometric embeddings.
PuFold make_pu_fold(const PuOptions& opt, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 1));
    auto positive = [&]() { return Eigen::Vector2d(0.8 * rng.normal(), 0.15 * rng.normal()); };
    auto negative = [&]() { return Eigen::Vector2d(3.0 + 0.3 * rng.normal(), 0.3 * rng.normal()); };
    const Mat ex = isometric_embedding(opt.dim_x, derive_seed(seed, 2));
    const Mat ey = isometric_embedding(opt.dim_y, derive_seed(seed, 3));
    Mat px(opt.n, opt.dim_x);
    for (int i = 0; i < opt.n; ++i) px.row(i) = (ex * positive()).transpose();
    const int npos = std::max(1, static_cast<int>(std::ceil(opt.ratio * opt.m - 1e-12)));
    Mat py(opt.m, opt.dim_y);
    std::vector<int> truth(opt.m, -1);
    for (int j = 0; j < opt.m; ++j) {
        const bool pos = j < npos;
        truth[j] = pos ? 1 : -1;
        py.row(j) = (ey * (pos ? positive() : negative())).transpose();
    }
    return {euclidean_space(px, 1.0, "X"), euclidean_space(py, 1.0, "Y"), truth};
}

double pu_accuracy(const PuFold& f, double rho1, double rho2, double eps, double ratio, bool& ok) {
    UgwConfig cfg;
    cfg.rho1 = rho1;
    cfg.rho2 = rho2;
    cfg.eps = eps;
    const TransportPlan init = flb_init(f.x, f.y, std::min(rho1, rho2), eps);
    const UgwSolution sol = solve_ugw(f.x, f.y, cfg, init);
    ok = sol.converged;
    const std::vector<int> pred = pu_predict(sol.pi, ratio);
    int hit = 0;
    for (size_t j = 0; j < pred.size(); ++j) hit += pred[j] == f.truth[j];
    return static_cast<double>(hit) / static_cast<double>(pred.size());
}

}  // namespace

DriverResult run_pu(const PuOptions& opt) {
    if (opt.folds < 2) throw std::invalid_argument("pu needs at least two folds");
    DriverResult res;
    const int nval = opt.folds / 2;
    std::vector<PuFold> folds;
    for (int f = 0; f < opt.folds; ++f) folds.push_back(make_pu_fold(opt, derive_seed(opt.seed, static_cast<std::uint64_t>(f))));
    Table grid{{"rho1", "rho2", "validation_accuracy"}, {}};
    double best_acc = -1.0, best1 = 0.0, best2 = 0.0;
    for (int k1 = opt.k_min; k1 <= opt.k_max; ++k1)
        for (int k2 = opt.k_min; k2 <= opt.k_max; ++k2) {
            const double r1 = std::ldexp(1.0, -k1), r2 = std::ldexp(1.0, -k2);
            double acc = 0.0;
            for (int f = 0; f < nval; ++f) {
                bool ok = false;
                try {
                    acc += pu_accuracy(folds[f], r1, r2, opt.eps, opt.ratio, ok);
                } catch (const std::exception&) {
                    ok = false;
                }
                res.converged = res.converged && ok;
            }
            acc /= nval;
            grid.add({r1, r2, acc});
            if (acc > best_acc) {
                best_acc = acc;
                best1 = r1;
                best2 = r2;
            }
        }
    Table test{{"fold", "rho1", "rho2", "accuracy"}, {}};
    for (int f = nval; f < opt.folds; ++f) {
        bool ok = false;
        double acc = NAN;
        try {
            acc = pu_accuracy(folds[f], best1, best2, opt.eps, opt.ratio, ok);
        } catch (const std::exception&) {
            ok = false;
        }
        res.converged = res.converged && ok;
        test.add({double(f), best1, best2, acc});
    }
    res.tables = {{"pu_validation", grid}, {"pu_test", test}};
    res.manifest = {{"driver", "pu"},      {"seed", opt.seed},   {"n", opt.n},         {"m", opt.m},
                    {"ratio", opt.ratio},  {"folds", opt.folds}, {"k_min", opt.k_min}, {"k_max", opt.k_max},
                    {"eps", opt.eps},      {"dim_x", opt.dim_x}, {"dim_y", opt.dim_y}};
    return res;
}

}  // namespace ugwkit
