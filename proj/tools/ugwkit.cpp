#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "ugwkit/conic.hpp"
#include "ugwkit/experiments.hpp"
#include "ugwkit/flb.hpp"
#include "ugwkit/geometry.hpp"
#include "ugwkit/io.hpp"
#include "ugwkit/scaling.hpp"
#include "ugwkit/sinkhorn.hpp"
#include "ugwkit/ugw.hpp"

using namespace ugwkit;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string format = "csv";
};

struct SpaceArgs {
    std::string json;
    std::string dist;
    std::string weights;

    void add(CLI::App* sub, const std::string& tag) {
        sub->add_option("--" + tag, json, "mm-space JSON for " + tag);
        sub->add_option("--" + tag + "-dist", dist, "distance matrix CSV for " + tag);
        sub->add_option("--" + tag + "-weights", weights, "weights file (one per line) for " + tag);
    }
    MmSpace load(const std::string& tag) const {
        if (!json.empty()) return read_mmspace(json);
        if (!dist.empty() && !weights.empty()) return read_mmspace_csv(dist, weights);
        throw std::invalid_argument("missing input space --" + tag + " (or --" + tag + "-dist and --" + tag + "-weights)");
    }
};

std::vector<double> parse_list(const std::vector<std::string>& v) {
    std::vector<double> out;
    for (const auto& s : v) out.push_back(parse_real(s));
    return out;
}

std::string path_in(const Globals& g, const std::string& name) { return (fs::path(g.out) / name).string(); }

std::string ext(const Globals& g) { return g.format == "json" ? ".json" : ".csv"; }

json num(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

json kept_json(const MmSpace& x) { return x.kept; }

void write_plan(const Globals& g, const std::string& stem, const TransportPlan& p) {
    if (g.format == "json") {
        json rows = json::array();
        for (int i = 0; i < p.rows(); ++i) {
            json r = json::array();
            for (int j = 0; j < p.cols(); ++j) r.push_back(p.values()(i, j));
            rows.push_back(r);
        }
        write_json(path_in(g, stem + ".json"), rows);
    } else {
        write_matrix_csv(path_in(g, stem + ".csv"), p.values());
    }
}

void write_driver(const Globals& g, const std::string& name, const DriverResult& r) {
    json files = json::array();
    for (const auto& [tname, table] : r.tables) {
        const std::string f = tname + ext(g);
        write_table(path_in(g, f), table, g.format);
        files.push_back(f);
    }
    json m = r.manifest;
    m["outputs"] = files;
    m["converged"] = r.converged;
    m["format"] = g.format;
    write_json(path_in(g, name + "_manifest.json"), m);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unbalanced and conic Gromov-Wasserstein solvers"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file");
    Globals g;
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--format", g.format, "table format")->check(CLI::IsMember({"csv", "json"}));

    bool ok = true;
    std::function<void()> action;

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic point cloud or graph");
    std::string gen_kind = "ellipse2d";
    int gen_n = 50;
    double gen_mass = 1.0;
    ShapeOptions gen_opt;
    gen->add_option("--kind", gen_kind, "ellipse2d|ellipse3d|square|sphere|two_moons_outliers|community_graph");
    gen->add_option("--n", gen_n, "number of points (graph: non-outlier nodes)");
    gen->add_option("--mass", gen_mass, "total mass of the emitted mm-space");
    gen->add_option("--outliers", gen_opt.outliers, "outlier count");
    gen->add_option("--radius", gen_opt.radius, "sphere radius");
    gen->add_option("--split", gen_opt.community_split, "fraction of nodes in the first community");
    gen->callback([&] {
        action = [&] {
            const ShapeKind kind = parse_shape_kind(gen_kind);
            const Shape s = gen_shape(kind, gen_n, g.seed, gen_opt);
            json manifest{{"command", "gen"}, {"kind", gen_kind}, {"n", gen_n}, {"seed", g.seed}, {"mass", gen_mass}};
            Mat d;
            std::vector<int> tags;
            if (const auto* pc = std::get_if<PointCloud>(&s)) {
                write_point_cloud_csv(path_in(g, gen_kind + ".csv"), *pc);
                d = pairwise_euclidean(pc->points);
                tags = pc->tags;
            } else {
                const auto& gr = std::get<WeightedGraph>(s);
                write_json(path_in(g, gen_kind + ".json"), graph_to_json(gr));
                d = graph_geodesics(gr);
                tags = gr.tags;
            }
            const MmSpace x(d, uniform_weights(static_cast<int>(d.rows()), gen_mass), gen_kind);
            write_mmspace(path_in(g, gen_kind + "_mmspace.json"), x);
            manifest["tags"] = tags;
            write_json(path_in(g, "gen_manifest.json"), manifest);
        };
    });

    // uot
    auto* uot = app.add_subcommand("uot", "entropic unbalanced OT between two weight vectors");
    std::string uot_cost, uot_mu, uot_nu, rho_s = "1", rho2_s;
    double eps = 1e-2, tol_pot = 1e-6;
    int max_inner = 3000;
    uot->add_option("--cost", uot_cost, "cost matrix CSV")->required();
    uot->add_option("--mu", uot_mu, "source weights")->required();
    uot->add_option("--nu", uot_nu, "target weights")->required();
    auto add_sinkhorn_flags = [&](CLI::App* sub) {
        sub->add_option("--rho", rho_s, "marginal penalty (inf for balanced)");
        sub->add_option("--rho2", rho2_s, "second marginal penalty (defaults to --rho)");
        sub->add_option("--eps", eps, "entropic regularization");
        sub->add_option("--tol-pot", tol_pot, "potential sup-norm tolerance");
        sub->add_option("--max-inner", max_inner, "Sinkhorn iteration cap");
    };
    add_sinkhorn_flags(uot);
    auto rhos = [&]() {
        const double r1 = parse_real(rho_s);
        return std::pair<double, double>{r1, rho2_s.empty() ? r1 : parse_real(rho2_s)};
    };
    auto sinkhorn_summary = [&](const SinkhornResult& r) {
        return json{{"iterations", r.iterations}, {"converged", r.converged}, {"residual", num(r.residual)},
                    {"mass", r.plan.mass()}, {"rho1", num(rhos().first)}, {"rho2", num(rhos().second)}, {"eps", eps}};
    };
    uot->callback([&] {
        action = [&] {
            const auto [r1, r2] = rhos();
            const SinkhornResult r = uot_sinkhorn(read_matrix_csv(uot_cost), read_vector(uot_mu), read_vector(uot_nu),
                                                  r1, r2, eps, std::nullopt, {tol_pot, max_inner});
            write_plan(g, "uot_plan", r.plan);
            write_vector(path_in(g, "uot_f.csv"), r.potentials.f);
            write_vector(path_in(g, "uot_g.csv"), r.potentials.g);
            write_json(path_in(g, "uot.json"), sinkhorn_summary(r));
            ok = r.converged;
        };
    });

    // flb
    auto* flb = app.add_subcommand("flb", "eccentricity-histogram unbalanced OT");
    SpaceArgs sx, sy;
    sx.add(flb, "x");
    sy.add(flb, "y");
    add_sinkhorn_flags(flb);
    flb->callback([&] {
        action = [&] {
            const auto [r1, r2] = rhos();
            const MmSpace x = sx.load("x"), y = sy.load("y");
            const SinkhornResult r = solve_flb(x, y, r1, eps, {tol_pot, max_inner}, r2);
            write_plan(g, "flb_plan", r.plan);
            json s = sinkhorn_summary(r);
            s["transport_cost"] = flb_cost(x, y).cwiseProduct(r.plan.values()).sum();
            write_json(path_in(g, "flb.json"), s);
            ok = r.converged;
        };
    });

    // ugw / gw
    UgwConfig ucfg;
    bool debias = false;
    std::string init = "product";
    auto add_ugw_flags = [&](CLI::App* sub, bool with_rho) {
        sx.add(sub, "x");
        sy.add(sub, "y");
        if (with_rho) {
            sub->add_option("--rho", rho_s, "marginal penalty (inf for balanced)");
            sub->add_option("--rho2", rho2_s, "second marginal penalty (defaults to --rho)");
        }
        sub->add_option("--eps", ucfg.eps, "entropic regularization");
        sub->add_option("--max-outer", ucfg.max_outer, "outer iteration cap");
        sub->add_option("--max-inner", ucfg.max_inner, "Sinkhorn iteration cap");
        sub->add_option("--tol-plan", ucfg.tol_plan, "log-plan sup-norm tolerance");
        sub->add_option("--tol-pot", ucfg.tol_pot, "potential sup-norm tolerance");
        sub->add_flag("--debias", debias, "also report the debiased cost");
        sub->add_option("--init", init, "starting plan")->check(CLI::IsMember({"product", "flb"}));
    };
    auto run_ugw = [&](bool balanced) {
        UgwConfig cfg = ucfg;
        cfg.seed = g.seed;
        if (balanced) {
            cfg.rho1 = cfg.rho2 = kInf;
        } else {
            std::tie(cfg.rho1, cfg.rho2) = rhos();
        }
        const MmSpace x = sx.load("x"), y = sy.load("y");
        std::optional<TransportPlan> start;
        if (init == "flb")
            start = flb_init(x, y, std::min(cfg.rho1, cfg.rho2), cfg.eps, {cfg.tol_pot, cfg.max_inner});
        const UgwSolution sol = solve_ugw(x, y, cfg, start);
        const Tightness& t = sol.tightness;
        json out{{"cost_biconvex", num(sol.cost_biconvex)},
                 {"cost_primal", num(sol.cost_primal)},
                 {"mass_pi", sol.pi.mass()},
                 {"iterations", sol.outer_iterations},
                 {"inner_iterations", sol.inner_iterations},
                 {"converged", sol.converged},
                 {"mass_underflow", sol.mass_underflow},
                 {"tightness",
                  {{"f_pi_gamma", num(t.f_pi_gamma)},
                   {"f_pi_pi", num(t.f_pi_pi)},
                   {"f_gamma_gamma", num(t.f_gamma_gamma)},
                   {"plan_gap", t.plan_gap}}},
                 {"config",
                  {{"eps", cfg.eps}, {"rho1", num(cfg.rho1)}, {"rho2", num(cfg.rho2)}, {"max_outer", cfg.max_outer},
                   {"max_inner", cfg.max_inner}, {"tol_plan", cfg.tol_plan}, {"tol_pot", cfg.tol_pot},
                   {"init", init}, {"seed", g.seed}}},
                 {"kept_x", kept_json(x)},
                 {"kept_y", kept_json(y)}};
        ok = sol.converged;
        if (debias) {
            const DebiasedResult d = debiased_ugw(x, y, cfg);
            out["debiased"] = {{"value", num(d.value)}, {"cross", num(d.cross)}, {"self_x", num(d.self_x)},
                               {"self_y", num(d.self_y)}, {"correction", d.correction}, {"converged", d.converged}};
            ok = ok && d.converged;
        }
        const std::string stem = balanced ? "gw" : "ugw";
        write_plan(g, stem + "_plan", sol.pi);
        write_json(path_in(g, stem + ".json"), out);
    };
    auto* ugw = app.add_subcommand("ugw", "unbalanced Gromov-Wasserstein");
    add_ugw_flags(ugw, true);
    ugw->callback([&] { action = [&] { run_ugw(false); }; });
    auto* gw = app.add_subcommand("gw", "balanced entropic Gromov-Wasserstein");
    add_ugw_flags(gw, false);
    gw->callback([&] { action = [&] { run_ugw(true); }; });

    // cgw
    auto* cgw = app.add_subcommand("cgw", "conic Gromov-Wasserstein on a radial grid");
    CgwOptions copt;
    double cgw_rho = 0.1, cgw_eps = 1e-3;
    int restarts = 20;
    bool with_ugw = false;
    sx.add(cgw, "x");
    sy.add(cgw, "y");
    cgw->add_option("--rho", cgw_rho, "marginal penalty");
    cgw->add_option("--grid-k", copt.K, "radial grid size for X");
    cgw->add_option("--grid-l", copt.L, "radial grid size for Y");
    cgw->add_option("--restarts", restarts, "random + permutation restarts");
    cgw->add_flag("--with-ugw", with_ugw, "also solve UGW and report the ratio");
    cgw->add_option("--eps", cgw_eps, "UGW entropic regularization for --with-ugw");
    cgw->callback([&] {
        action = [&] {
            const MmSpace x = sx.load("x"), y = sy.load("y");
            copt.random_restarts = restarts / 2;
            copt.permutation_restarts = restarts - restarts / 2;
            copt.seed = g.seed;
            const CgwResult r = solve_cgw(x, y, ConeMetricSpec::gh(cgw_rho), copt);
            json costs = json::array();
            for (const auto& rs : r.restarts) costs.push_back(num(rs.cost));
            json out{{"cost", num(r.cost)}, {"restart_costs", costs}, {"grid_k", copt.K}, {"grid_l", copt.L},
                     {"rho", cgw_rho}, {"seed", g.seed}};
            ok = r.ok;
            if (with_ugw) {
                UgwConfig cfg;
                cfg.rho1 = cfg.rho2 = cgw_rho;
                cfg.eps = cgw_eps;
                const UgwSolution sol = solve_ugw(x, y, cfg);
                const double u = rescaled_unregularized(x, y, sol.pi, cfg);
                out["ugw"] = num(u);
                out["ratio_vs_ugw"] = num(cost_ratio(r.cost, u));
                ok = ok && sol.converged;
            }
            Table atoms{{"i", "r", "j", "s", "mass"}, {}};
            for (const ConicAtom& a : r.alpha.atoms()) atoms.add({double(a.i), a.r, double(a.j), a.s, a.w});
            write_table(path_in(g, "cgw_plan" + ext(g)), atoms, g.format);
            write_json(path_in(g, "cgw.json"), out);
        };
    });

    // scale
    auto* scale = app.add_subcommand("scale", "optimal mass scalings of the product plan over a kappa grid");
    double scale_rho = 1.0;
    std::vector<std::string> kappas_s{"0.1", "0.5", "1", "2", "10"};
    sx.add(scale, "x");
    sy.add(scale, "y");
    scale->add_option("--rho", scale_rho, "marginal penalty");
    scale->add_option("--kappas", kappas_s, "mass multipliers");
    scale->callback([&] {
        action = [&] {
            const Table t = scale_table(sx.load("x"), sy.load("y"), scale_rho, parse_list(kappas_s));
            write_table(path_in(g, "scale" + ext(g)), t, g.format);
        };
    });

    // drivers
    auto* rh = app.add_subcommand("ratio-hist", "CGW/UGW ratios on random Euclidean pairs");
    RatioHistOptions rho_opt;
    rh->add_option("--sizes", rho_opt.sizes, "numbers of points");
    rh->add_option("--trials", rho_opt.trials, "trials per size");
    rh->add_option("--dim", rho_opt.dim, "ambient dimension");
    rh->add_option("--rho", rho_opt.rho, "marginal penalty");
    rh->add_option("--eps", rho_opt.eps, "UGW entropic regularization");
    rh->add_option("--grid-k", rho_opt.K, "radial grid size for X");
    rh->add_option("--grid-l", rho_opt.L, "radial grid size for Y");
    rh->add_option("--restarts", rho_opt.restarts, "CGW restarts");
    rh->add_option("--bin-width", rho_opt.bin_width, "histogram bin width");
    rh->callback([&] {
        action = [&] {
            rho_opt.seed = g.seed;
            const DriverResult r = run_ratio_hist(rho_opt);
            write_driver(g, "ratio_hist", r);
            ok = r.converged;
        };
    });

    auto* pt = app.add_subcommand("perturb", "CGW and UGW as a support is perturbed");
    PerturbOptions pt_opt;
    std::vector<std::string> ts_s;
    pt->add_option("--n", pt_opt.n, "number of points");
    pt->add_option("--dim", pt_opt.dim, "ambient dimension");
    pt->add_option("--ts", ts_s, "perturbation sizes");
    pt->add_option("--rho", pt_opt.rho, "marginal penalty");
    pt->add_option("--eps", pt_opt.eps, "UGW entropic regularization");
    pt->add_option("--grid-k", pt_opt.K, "radial grid size for X");
    pt->add_option("--grid-l", pt_opt.L, "radial grid size for Y");
    pt->add_option("--restarts", pt_opt.restarts, "CGW restarts");
    pt->callback([&] {
        action = [&] {
            pt_opt.seed = g.seed;
            if (!ts_s.empty()) pt_opt.ts = parse_list(ts_s);
            const DriverResult r = run_perturb(pt_opt);
            write_driver(g, "perturb", r);
            ok = r.converged;
        };
    });

    auto* mo = app.add_subcommand("moons", "two moons with outliers across a rho grid");
    MoonsOptions mo_opt;
    std::vector<std::string> mo_rhos;
    mo->add_option("--n", mo_opt.n, "moon points");
    mo->add_option("--outliers", mo_opt.outliers, "outlier points in the second space");
    mo->add_option("--rhos", mo_rhos, "marginal penalties");
    mo->add_option("--eps", mo_opt.eps, "entropic regularization");
    mo->add_option("--seeds", mo_opt.seeds, "number of seeded repetitions");
    mo->callback([&] {
        action = [&] {
            mo_opt.seed = g.seed;
            if (!mo_rhos.empty()) mo_opt.rhos = parse_list(mo_rhos);
            const DriverResult r = run_moons(mo_opt);
            write_driver(g, "moons", r);
            ok = r.converged;
        };
    });

    auto* gm = app.add_subcommand("graph-match", "community graphs across an (eps, rho) grid");
    GraphMatchOptions gm_opt;
    std::vector<std::string> gm_eps, gm_rhos;
    gm->add_option("--n-x", gm_opt.n_x, "nodes in X");
    gm->add_option("--n-y", gm_opt.n_y, "non-outlier nodes in Y");
    gm->add_option("--outliers", gm_opt.outliers, "outlier nodes in Y");
    gm->add_option("--split-y", gm_opt.split_y, "community split of Y");
    gm->add_option("--epss", gm_eps, "entropic regularizations");
    gm->add_option("--rhos", gm_rhos, "marginal penalties (inf for balanced)");
    gm->callback([&] {
        action = [&] {
            gm_opt.seed = g.seed;
            if (!gm_eps.empty()) gm_opt.epss = parse_list(gm_eps);
            if (!gm_rhos.empty()) gm_opt.rhos = parse_list(gm_rhos);
            const DriverResult r = run_graph_match(gm_opt);
            write_driver(g, "graph_match", r);
            ok = r.converged;
        };
    });

    auto* sb = app.add_subcommand("scale-bias", "quadratic vs linear optimal scalings on random pairs");
    ScaleBiasOptions sb_opt;
    std::vector<std::string> sb_k;
    sb->add_option("--n", sb_opt.n, "points per space");
    sb->add_option("--dim", sb_opt.dim, "ambient dimension");
    sb->add_option("--instances", sb_opt.instances, "random instances");
    sb->add_option("--kappas", sb_k, "mass multipliers");
    sb->add_option("--rho", sb_opt.rho, "marginal penalty");
    sb->callback([&] {
        action = [&] {
            sb_opt.seed = g.seed;
            if (!sb_k.empty()) sb_opt.kappas = parse_list(sb_k);
            write_driver(g, "scale_bias", run_scale_bias(sb_opt));
        };
    });

    auto* pu = app.add_subcommand("pu", "positive-unlabeled prediction on synthetic folds");
    PuOptions pu_opt;
    pu->add_option("--n", pu_opt.n, "labeled positives per fold");
    pu->add_option("--m", pu_opt.m, "unlabeled points per fold");
    pu->add_option("--ratio", pu_opt.ratio, "proportion of positives among unlabeled points");
    pu->add_option("--folds", pu_opt.folds, "folds (first half validates)");
    pu->add_option("--k-min", pu_opt.k_min, "smallest k in rho = 2^-k");
    pu->add_option("--k-max", pu_opt.k_max, "largest k in rho = 2^-k");
    pu->add_option("--eps", pu_opt.eps, "entropic regularization");
    pu->add_option("--dim-x", pu_opt.dim_x, "feature dimension of X");
    pu->add_option("--dim-y", pu_opt.dim_y, "feature dimension of Y");
    pu->callback([&] {
        action = [&] {
            pu_opt.seed = g.seed;
            const DriverResult r = run_pu(pu_opt);
            write_driver(g, "pu", r);
            ok = r.converged;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    try {
        fs::create_directories(g.out);
        if (action) action();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return ok ? 0 : 1;
}
