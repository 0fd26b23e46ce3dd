// csl: batch front-end for the crystal stability laboratory.
//
// Usage: csl <subcommand> --config cfg.json --out dir [--workers n] [--seed s]
// Exit codes: 0 success, 2 validation failure, 3 numerical abort.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <thread>

#include "csl/bloch.hpp"
#include "csl/dynamics.hpp"
#include "csl/fermion.hpp"
#include "csl/ground_states.hpp"
#include "csl/hessian.hpp"
#include "csl/io.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunContext {
    std::string config_text;
    json cfg;
    std::string out_dir;
    int workers = 1;
    unsigned long long seed = 0;
};

csl::IonDensityModel model_of(const json& cfg) {
    return csl::ion_model_from_json(cfg.at("model").dump());
}

csl::Vec3 vec3_of(const json& j) {
    return csl::Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

std::string out_path(const RunContext& ctx, const std::string& name) {
    return (fs::path(ctx.out_dir) / name).string();
}

std::vector<csl::Vec3> theta_list(const json& cfg) {
    std::vector<csl::Vec3> thetas;
    if (cfg.contains("thetas")) {
        for (const auto& t : cfg.at("thetas")) thetas.push_back(vec3_of(t));
    } else {
        // Interior grid: components 2 pi k / (n+1), k = 1..n.
        int n = cfg.at("grid_n").get<int>();
        for (int a = 1; a <= n; ++a)
            for (int b = 1; b <= n; ++b)
                for (int c = 1; c <= n; ++c)
                    thetas.emplace_back(csl::two_pi * a / (n + 1),
                                        csl::two_pi * b / (n + 1),
                                        csl::two_pi * c / (n + 1));
    }
    return thetas;
}

// Index-partitioned parallel loop with preallocated output slots; result is
// independent of the worker count.
template <typename F>
void parallel_for(std::size_t n, int workers, F&& body) {
    int w = std::max(1, std::min<int>(workers, int(n)));
    if (w == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += w) body(i);
        });
    for (auto& th : pool) th.join();
}

int cmd_jellium_check(const RunContext& ctx) {
    auto model = model_of(ctx.cfg);
    auto rep = csl::check_jellium(model, ctx.cfg.value("tol", 1e-12));
    csl::write_csv(out_path(ctx, "jellium.csv"),
                   {"max_abs", "window", "pass", "worst_m1", "worst_m2", "worst_m3"},
                   {{rep.max_abs, double(rep.window), rep.pass ? 1.0 : 0.0,
                     double(rep.worst_m[0]), double(rep.worst_m[1]),
                     double(rep.worst_m[2])}});
    return 0;
}

int cmd_wiener_scan(const RunContext& ctx) {
    auto model = model_of(ctx.cfg);
    auto thetas = theta_list(ctx.cfg);
    int M_max = ctx.cfg.value("M_max", 8);
    double tol = ctx.cfg.value("tol", 1e-10);
    std::vector<std::vector<double>> rows(thetas.size());
    parallel_for(thetas.size(), ctx.workers, [&](std::size_t i) {
        auto wm = csl::wiener_matrix(model, thetas[i], M_max);
        rows[i] = {thetas[i][0], thetas[i][1], thetas[i][2], wm.sigma0,
                   wm.sigma0 < tol ? 1.0 : 0.0};
    });
    csl::write_csv(out_path(ctx, "wiener.csv"),
                   {"theta1", "theta2", "theta3", "sigma0", "degenerate"}, rows);
    return 0;
}

int cmd_ground_state(const RunContext& ctx) {
    auto model = model_of(ctx.cfg);
    csl::TorusGrid grid{ctx.cfg.at("N").get<int>(), ctx.cfg.at("P").get<int>()};
    auto gs = csl::periodic_ground_state(model, grid, ctx.cfg.value("alpha", 0.0),
                                         ctx.cfg.contains("r") ? vec3_of(ctx.cfg.at("r"))
                                                               : csl::Vec3::Zero(),
                                         ctx.cfg.value("e", 1.0),
                                         ctx.cfg.value("M", 1.0));
    csl::write_text_file(out_path(ctx, "state.json"),
                         csl::crystal_state_to_json(gs.X) + "\n");
    csl::write_csv(out_path(ctx, "ground_state.csv"), {"energy", "jellium"},
                   {{gs.energy_value, gs.jellium ? 1.0 : 0.0}});
    return 0;
}

int cmd_minimize_cell(const RunContext& ctx) {
    auto model = model_of(ctx.cfg);
    csl::TorusGrid grid{ctx.cfg.value("N", 1), ctx.cfg.at("P").get<int>()};
    double e = ctx.cfg.value("e", 1.0);
    double Z = ctx.cfg.value("Z", model.eZ / e);
    csl::Field init(grid, csl::Layout::RealSpace);
    double c0 = std::sqrt(Z / grid.volume());
    std::string init_kind = ctx.cfg.value("init", std::string("constant"));
    std::mt19937_64 rng(ctx.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& z : init.v) {
        z = csl::cd(c0, 0.0);
        if (init_kind == "random") z += 0.1 * c0 * csl::cd(gauss(rng), gauss(rng));
    }
    auto res = csl::minimize_energy_per_cell(model, Z, e, grid, init,
                                             ctx.cfg.value("max_iters", 10000));
    std::vector<std::vector<double>> hist;
    for (const auto& h : res.history) hist.push_back({h[0], h[1], h[2]});
    csl::write_csv(out_path(ctx, "minimize_history.csv"),
                   {"iteration", "energy", "residual"}, hist);
    csl::write_csv(out_path(ctx, "minimize.csv"),
                   {"energy", "omega0", "residual", "iterations", "converged"},
                   {{res.energy_value, res.omega0, res.residual,
                     double(res.iterations), res.converged ? 1.0 : 0.0}});
    return 0;
}

csl::CrystalState initial_state(const RunContext& ctx) {
    if (ctx.cfg.contains("state_file"))
        return csl::crystal_state_from_json(
            csl::read_text_file(ctx.cfg.at("state_file").get<std::string>()));
    auto model = model_of(ctx.cfg);
    csl::TorusGrid grid{ctx.cfg.at("N").get<int>(), ctx.cfg.at("P").get<int>()};
    auto gs = csl::periodic_ground_state(model, grid, ctx.cfg.value("alpha", 0.0),
                                         ctx.cfg.contains("r") ? vec3_of(ctx.cfg.at("r"))
                                                               : csl::Vec3::Zero(),
                                         ctx.cfg.value("e", 1.0),
                                         ctx.cfg.value("M", 1.0));
    return gs.X;
}

int cmd_evolve(const RunContext& ctx) {
    auto X0 = initial_state(ctx);
    csl::IntegratorConfig ic;
    ic.dt = ctx.cfg.value("dt", 1e-3);
    ic.T_end = ctx.cfg.value("T_end", 1.0);
    ic.monitor_every = ctx.cfg.value("monitor_every", 10);
    std::string scheme = ctx.cfg.value("scheme", std::string("strang"));
    if (scheme == "strang") ic.scheme = csl::Scheme::Strang;
    else if (scheme == "picard") ic.scheme = csl::Scheme::Picard;
    else throw std::invalid_argument("scheme must be strang or picard");
    auto res = csl::evolve(X0, ic);
    std::vector<std::vector<double>> rows;
    for (const auto& r : res.rows) rows.push_back({r.t, r.E, r.Q, r.dV});
    csl::write_csv(out_path(ctx, "evolve.csv"), {"t", "E", "Q", "dV"}, rows);
    csl::write_csv(out_path(ctx, "evolve_summary.csv"),
                   {"max_abs_E", "max_rel_E_drift", "max_rel_Q_drift", "max_dV",
                    "aborted"},
                   {{res.max_abs_E, res.max_rel_E_drift, res.max_rel_Q_drift,
                     res.max_dV, res.aborted ? 1.0 : 0.0}});
    return res.aborted ? 3 : 0;
}

int cmd_orbital_stability(const RunContext& ctx) {
    auto model = model_of(ctx.cfg);
    csl::TorusGrid grid{ctx.cfg.at("N").get<int>(), ctx.cfg.at("P").get<int>()};
    auto deltas = ctx.cfg.at("deltas").get<std::vector<double>>();
    std::string mode_s = ctx.cfg.value("mode", std::string("generic"));
    csl::PerturbationMode mode;
    if (mode_s == "generic") mode = csl::PerturbationMode::Generic;
    else if (mode_s == "kernel_momentum") mode = csl::PerturbationMode::KernelMomentum;
    else throw std::invalid_argument("mode must be generic or kernel_momentum");
    auto rows = csl::orbital_stability_experiment(
        model, grid, ctx.cfg.value("e", 1.0), ctx.cfg.value("M", 1.0), deltas,
        ctx.cfg.value("T_end", 10.0), ctx.cfg.value("dt", 1e-3), mode, ctx.seed);
    std::vector<std::vector<double>> out;
    for (const auto& r : rows) out.push_back({r.delta, r.sup_d});
    csl::write_csv(out_path(ctx, "stability.csv"), {"delta", "sup_d"}, out);
    return 0;
}

int cmd_hessian(const RunContext& ctx) {
    auto model = model_of(ctx.cfg);
    csl::TorusGrid grid{ctx.cfg.at("N").get<int>(), ctx.cfg.at("P").get<int>()};
    csl::SolitaryPoint S;
    S.alpha = ctx.cfg.value("alpha", 0.0);
    if (ctx.cfg.contains("r")) S.r = vec3_of(ctx.cfg.at("r"));
    auto H = csl::assemble_hessian(model, grid, ctx.cfg.value("e", 1.0),
                                   ctx.cfg.value("M", 1.0), S);
    auto ns = csl::null_space(H);
    auto cs = csl::constrained_spectrum(H, ctx.cfg.value("fix_r", false));
    int d = csl::kernel_defect_dimension(model, grid.N);
    std::vector<std::vector<double>> eigs;
    for (int i = 0; i < ns.eigenvalues.size(); ++i)
        eigs.push_back({double(i), ns.eigenvalues[i]});
    csl::write_csv(out_path(ctx, "hessian_spectrum.csv"), {"index", "eigenvalue"},
                   eigs);
    csl::write_csv(out_path(ctx, "hessian.csv"),
                   {"dim", "null_dim", "kernel_defect", "constrained_min_eig"},
                   {{double(H.dim()), double(ns.dimension), double(d), cs.min_eig}});
    return 0;
}

int cmd_bloch_spectrum(const RunContext& ctx) {
    auto model = model_of(ctx.cfg);
    auto bm = csl::bloch_energy_matrix(model, vec3_of(ctx.cfg.at("theta")),
                                       ctx.cfg.value("K_cut", 4),
                                       ctx.cfg.value("e", 1.0),
                                       ctx.cfg.value("M", 1.0));
    auto sw = csl::positivity_sandwich(bm, ctx.cfg.value("epsilon", 0.0));
    auto km = csl::k_matrix(bm);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < km.omega.size(); ++i)
        rows.push_back({double(i), km.omega[i]});
    csl::write_csv(out_path(ctx, "bloch_omega.csv"), {"index", "omega"}, rows);
    csl::write_csv(out_path(ctx, "bloch.csv"),
                   {"b0", "sigma0", "lower", "upper", "sandwich_ok", "clip_count"},
                   {{sw.b0, sw.sigma0, sw.lower, sw.upper, sw.ok ? 1.0 : 0.0,
                     double(km.clip_count)}});
    return 0;
}

int cmd_dispersion(const RunContext& ctx) {
    auto model = model_of(ctx.cfg);
    std::vector<csl::Vec3> path;
    if (ctx.cfg.contains("path")) {
        for (const auto& t : ctx.cfg.at("path")) path.push_back(vec3_of(t));
    } else {
        csl::Vec3 a = vec3_of(ctx.cfg.at("from")), b = vec3_of(ctx.cfg.at("to"));
        int n = ctx.cfg.at("n").get<int>();
        for (int i = 0; i < n; ++i)
            path.push_back(a + (b - a) * (double(i) / std::max(1, n - 1)));
    }
    auto table = csl::dispersion_relations(model, path,
                                           ctx.cfg.value("n_eigs", 8),
                                           ctx.cfg.value("K_cut", 4),
                                           ctx.cfg.value("e", 1.0),
                                           ctx.cfg.value("M", 1.0));
    std::vector<std::vector<double>> rows;
    for (const auto& r : table.rows)
        rows.push_back({r.theta[0], r.theta[1], r.theta[2], double(r.branch), r.omega});
    csl::write_csv(out_path(ctx, "dispersion.csv"),
                   {"theta1", "theta2", "theta3", "branch", "omega"}, rows);
    std::vector<std::vector<double>> flat;
    for (int b : table.flat_branches) flat.push_back({double(b)});
    csl::write_csv(out_path(ctx, "flat_branches.csv"), {"branch"}, flat);
    return 0;
}

int cmd_decay(const RunContext& ctx) {
    auto model = model_of(ctx.cfg);
    auto provider = csl::real_fiber_provider(model, ctx.cfg.value("K_cut", 2),
                                             ctx.cfg.value("e", 1.0),
                                             ctx.cfg.value("M", 1.0));
    std::vector<double> times;
    if (ctx.cfg.contains("times")) {
        times = ctx.cfg.at("times").get<std::vector<double>>();
    } else {
        double t_max = ctx.cfg.at("t_max").get<double>();
        int nt = ctx.cfg.value("n_times", 21);
        for (int i = 0; i < nt; ++i) times.push_back(t_max * i / std::max(1, nt - 1));
    }
    auto curve = csl::dispersive_decay_experiment(
        provider, ctx.cfg.value("L", 8), times, ctx.cfg.value("alpha", -2.0),
        ctx.cfg.value("branch_cutoff", 0.5), ctx.seed);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        rows.push_back({curve.times[i], curve.norms[i]});
    csl::write_csv(out_path(ctx, "decay.csv"), {"t", "norm"}, rows);
    csl::write_csv(out_path(ctx, "decay_summary.csv"),
                   {"t_guard", "occupied_branches"},
                   {{curve.t_guard, double(curve.occupied_branches)}});
    return 0;
}

int cmd_fermion_density(const RunContext& ctx) {
    auto state = csl::slater_from_json(ctx.cfg.at("state").dump());
    auto dens = csl::slater_density(state);
    bool apart = csl::check_pair_distance(state);
    double dev = dens.max_deviation_from_constant();
    int samples = ctx.cfg.value("samples_per_axis", 17);
    std::vector<std::vector<double>> rows;
    std::vector<int> idx(state.d, 0);
    while (true) {
        std::vector<double> x(state.d);
        for (int i = 0; i < state.d; ++i)
            x[i] = state.Nside * double(idx[i]) / samples;
        std::vector<double> row = x;
        row.push_back(dens.eval(x));
        rows.push_back(row);
        int i = 0;
        for (; i < state.d; ++i) {
            if (++idx[i] < samples) break;
            idx[i] = 0;
        }
        if (i == state.d) break;
    }
    std::vector<std::string> header;
    for (int i = 0; i < state.d; ++i) header.push_back("x" + std::to_string(i + 1));
    header.push_back("density");
    csl::write_csv(out_path(ctx, "fermion_density.csv"), header, rows);
    csl::write_csv(out_path(ctx, "fermion.csv"),
                   {"pair_distance_ok", "constant_term", "max_deviation"},
                   {{apart ? 1.0 : 0.0, dens.constant_term(), dev}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"crystal stability laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir = ".";
    int workers = int(std::max(1u, std::thread::hardware_concurrency()));
    unsigned long long seed = 0;
    bool seed_given = false;
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "parallel sweep width");
    app.add_option("--seed", seed, "RNG seed override")
        ->each([&](const std::string&) { seed_given = true; });

    const std::vector<std::pair<std::string, int (*)(const RunContext&)>> cmds = {
        {"jellium-check", cmd_jellium_check},
        {"wiener-scan", cmd_wiener_scan},
        {"ground-state", cmd_ground_state},
        {"minimize-cell", cmd_minimize_cell},
        {"evolve", cmd_evolve},
        {"orbital-stability", cmd_orbital_stability},
        {"hessian", cmd_hessian},
        {"bloch-spectrum", cmd_bloch_spectrum},
        {"dispersion", cmd_dispersion},
        {"decay", cmd_decay},
        {"fermion-density", cmd_fermion_density},
    };
    for (const auto& [name, fn] : cmds) app.add_subcommand(name, name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    RunContext ctx;
    ctx.out_dir = out_dir;
    int exit_code = 0;
    auto start = std::chrono::steady_clock::now();
    try {
        ctx.config_text = csl::read_text_file(config_path);
        ctx.cfg = json::parse(ctx.config_text);
        if (const char* env = std::getenv("CSL_WORKERS")) workers = std::atoi(env);
        ctx.workers = std::max(1, workers);
        ctx.seed = seed_given ? seed : ctx.cfg.value("seed", 0ull);
        fs::create_directories(ctx.out_dir);
        std::string name = app.get_subcommands().at(0)->get_name();
        for (const auto& [cname, fn] : cmds)
            if (cname == name) {
                exit_code = fn(ctx);
                break;
            }
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 3;
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                start).count();
    try {
        csl::write_run_manifest(out_path(ctx, "run.json"), ctx.config_text, ctx.seed,
                                wall);
    } catch (const std::exception& e) {
        std::cerr << "manifest error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}
