// Batch front-end. Reads a key=value run configuration (file, then
// POWERMFG_* environment overrides, then flags), dispatches one subcommand
// into the library, and leaves CSV artifacts plus a manifest.json in the
// output directory. Artifacts are deterministic: the same configuration and
// seed produce byte-identical files; the manifest carries the wall time and
// is the one file that varies between identical runs.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "powermfg/check.hpp"
#include "powermfg/config.hpp"
#include "powermfg/csv.hpp"
#include "powermfg/dynamics.hpp"
#include "powermfg/efficiency.hpp"
#include "powermfg/grid.hpp"
#include "powermfg/hjb.hpp"
#include "powermfg/kplayer.hpp"
#include "powermfg/mfg.hpp"
#include "powermfg/rng.hpp"
#include "powermfg/static_game.hpp"

namespace {

using namespace powermfg;
namespace fs = std::filesystem;

struct RunContext {
    RunConfig cfg;
    int threads = 1;
    fs::path out;
    std::vector<std::string> artifacts;
    nlohmann::ordered_json details;

    std::string artifact(const std::string& name) {
        artifacts.push_back(name);
        return (out / name).string();
    }
};

void run_static_ne(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    auto eff = make_efficiency(cfg);
    double margin = 1.0 - (cfg.game.k - 1) * eff.beta_star();
    if (margin <= 0.0)
        throw ConfigError(
            "static-ne: (game.k - 1) * beta* = " +
            std::to_string((cfg.game.k - 1) * eff.beta_star()) +
            " >= 1, so no interior equilibrium exists; lower game.k or pick an "
            "efficiency with a smaller operating point");
    std::vector<double> gains = cfg.static_gains;
    if (gains.empty()) gains.assign(cfg.game.k, 1.0);
    auto ne = static_ne(gains, cfg.game.sigma2, eff, cfg.game.p_max);
    StaticProfile prof{ne.powers, gains, cfg.game.sigma2, cfg.game.rate};

    CsvWriter csv(ctx.artifact("static_ne.csv"),
                  {"player", "gain", "power", "sinr", "utility"});
    for (int i = 0; i < cfg.game.k; ++i)
        csv.row({static_cast<double>(i), gains[i], ne.powers[i], sinr(prof, i),
                 utility(prof, i, eff)});
    ctx.details["exceeds_p_max"] = ne.exceeds_p_max;
    std::cout << "static-ne: " << cfg.game.k << " players at SINR "
              << eff.beta_star() << (ne.exceeds_p_max ? " (power cap exceeded)" : "")
              << "\n";
}

void run_simulate_channel(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    double horizon = cfg.game.t1 - cfg.game.t0;
    int n_steps = std::max(1, static_cast<int>(std::llround(horizon / cfg.sim_dt)));
    double dt = horizon / n_steps;
    OUParams ou{cfg.game.mu, cfg.game.eta};

    // Rows are built per path (streams are keyed by path id, so any thread
    // count produces the same numbers) and written in path order.
    std::vector<std::vector<std::vector<double>>> rows(cfg.sim_n_paths);
    auto fill_path = [&](int pid) {
        CounterRng rng(cfg.sim_seed, static_cast<uint64_t>(pid));
        GenericState s{cfg.sim_e0, cfg.game.mu};
        auto& out = rows[pid];
        out.push_back({cfg.game.t0, static_cast<double>(pid), s.energy, s.h.x, s.h.y});
        for (int n = 1; n <= n_steps; ++n) {
            auto [zx, zy] = rng.next_normal_pair();
            s = cfg.sim_exact
                    ? step_state_exact(s, cfg.sim_power, dt, ou, {zx, zy})
                    : step_state(s, cfg.sim_power, dt, ou, {zx, zy});
            if (n % cfg.sim_record_stride == 0 || n == n_steps)
                out.push_back(
                    {cfg.game.t0 + n * dt, static_cast<double>(pid), s.energy, s.h.x, s.h.y});
        }
    };
    int workers = std::max(1, std::min(ctx.threads, cfg.sim_n_paths));
    if (workers == 1) {
        for (int pid = 0; pid < cfg.sim_n_paths; ++pid) fill_path(pid);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int pid = next.fetch_add(1); pid < cfg.sim_n_paths;
                     pid = next.fetch_add(1))
                    fill_path(pid);
            });
        for (auto& t : pool) t.join();
    }

    CsvWriter csv(ctx.artifact("channel_paths.csv"), {"t", "path_id", "E", "h_x", "h_y"});
    for (const auto& path : rows)
        for (const auto& r : path) csv.row(r);
    std::cout << "simulate-channel: " << cfg.sim_n_paths << " paths, " << n_steps
              << " steps\n";
}

void run_solve_single(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    auto eff = make_efficiency(cfg);
    auto grid = make_grid(cfg);
    InterferencePath quiet = [](double) { return 0.0; };
    auto v = solve_value(cfg.game, eff, quiet, grid);
    auto powers = extract_policy(v, cfg.game, eff, quiet).power_grid();

    CsvWriter csv(ctx.artifact("value_policy.csv"), {"t", "E", "h_x", "h_y", "v", "p"});
    for (int it = 0; it < grid.t.n; ++it)
        for (int ie = 0; ie < grid.e.n; ++ie)
            for (int ix = 0; ix < grid.x.n; ++ix)
                for (int iy = 0; iy < grid.y.n; ++iy)
                    csv.row({grid.t.coord(it), grid.e.coord(ie), grid.x.coord(ix),
                             grid.y.coord(iy), v.at(it, ie, ix, iy),
                             powers.at(it, ie, ix, iy)});
    std::cout << "solve-single: value and policy on " << grid.node_count()
              << " nodes\n";
}

void run_off_probability(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    auto eff = make_efficiency(cfg);
    std::vector<double> v_grid(cfg.sweep_points);
    for (int i = 0; i < cfg.sweep_points; ++i)
        v_grid[i] = cfg.sweep_v_e_max * i / (cfg.sweep_points - 1);
    auto rows = off_probability(eff, cfg.game, v_grid, cfg.sweep_samples, cfg.sim_seed);

    CsvWriter csv(ctx.artifact("off_probability.csv"),
                  {"v_E", "lower_bound", "mc_estimate", "stderr"});
    for (const auto& r : rows)
        csv.row({r.v_e, r.lower_bound, r.mc_estimate, r.std_error});
    std::cout << "off-probability: " << cfg.sweep_points << " sweep points, "
              << cfg.sweep_samples << " draws each\n";
}

void run_simulate_k(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    auto eff = make_efficiency(cfg);
    OUParams ou{cfg.game.mu, cfg.game.eta};

    PolicyFn policy;
    InterferencePath reference;
    if (cfg.sim_policy == "constant") {
        double p0 = cfg.sim_power;
        policy = [p0](double, const GenericState&, double) { return p0; };
        double level = p0 * (cfg.game.mu.norm2() + 2.0 * cfg.game.eta * cfg.game.eta);
        reference = [level](double) { return level; };
    } else {
        // Mean-field feedback rule, evaluated against the interference each
        // player actually measures; the reference path is the equilibrium one.
        auto grid = make_grid(cfg);
        auto m0 = initial_density(grid, ou, cfg.sim_e0);
        auto sol = solve_mfg(cfg.game, eff, grid, m0, cfg.solver);
        if (!sol.converged)
            std::cerr << "simulate-k: warning: equilibrium solve stopped at residual "
                      << sol.residual << " without converging\n";
        ctx.details["mfg_converged"] = sol.converged;
        ctx.details["mfg_iterations"] = sol.iterations;
        auto pol = std::make_shared<FeedbackPolicy>(std::move(sol.policy));
        policy = [pol](double t, const GenericState& s, double inter) {
            return pol->power(t, s.energy, s.h, inter);
        };
        reference = pol->base_path();
    }

    int k0 = cfg.sim_k_list.empty() ? std::max(2, cfg.game.k) : cfg.sim_k_list.front();
    GameParams gp = cfg.game;
    gp.k = k0;
    auto init = stationary_population(k0, cfg.sim_e0, ou, cfg.sim_seed);
    auto traj = simulate(policy, gp, eff, init, cfg.sim_dt, cfg.sim_seed,
                         cfg.sim_record_stride);
    CsvWriter tcsv(ctx.artifact("trajectory.csv"),
                   {"t", "player", "E", "h_x", "h_y", "p", "I", "u_running"});
    for (const auto& sl : traj.slices)
        for (int i = 0; i < traj.k; ++i)
            tcsv.row({sl.t, static_cast<double>(i), sl.energy[i], sl.hx[i], sl.hy[i],
                      sl.power[i], sl.interference[i], sl.utility[i]});

    std::vector<double> probes = cfg.sim_probe_times;
    if (probes.empty())
        probes = {0.5 * (cfg.game.t0 + cfg.game.t1), cfg.game.t1};
    auto report = convergence_report(policy, cfg.game, eff, cfg.sim_k_list,
                                     cfg.sim_replications, probes, reference,
                                     cfg.sim_e0, cfg.sim_dt, cfg.sim_seed);
    CsvWriter ccsv(ctx.artifact("convergence.csv"),
                   {"K", "probe_t", "mean_dev", "std_dev"});
    for (const auto& r : report)
        ccsv.row({static_cast<double>(r.k), r.probe_t, r.mean_dev, r.std_dev});
    std::cout << "simulate-k: trajectory at K = " << k0 << ", report over "
              << cfg.sim_k_list.size() << " population sizes\n";
}

void run_solve_mfg(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    auto eff = make_efficiency(cfg);
    auto grid = make_grid(cfg);
    OUParams ou{cfg.game.mu, cfg.game.eta};
    auto m0 = initial_density(grid, ou, cfg.sim_e0);
    auto sol = solve_mfg(cfg.game, eff, grid, m0, cfg.solver);
    if (!sol.converged)
        std::cerr << "solve-mfg: warning: stopped at residual " << sol.residual
                  << " after " << sol.iterations << " iterations without converging\n";

    CsvWriter icsv(ctx.artifact("i_hat.csv"), {"t", "I_hat"});
    for (int n = 0; n < grid.t.n; ++n) icsv.row({grid.t.coord(n), sol.i_hat[n]});

    CsvWriter ccsv(ctx.artifact("convergence.csv"), {"iter", "residual"});
    for (size_t i = 0; i < sol.residual_history.size(); ++i)
        ccsv.row({static_cast<double>(i + 1), sol.residual_history[i]});

    const int snaps[3] = {0, grid.t.n / 2, grid.t.n - 1};
    CsvWriter pcsv(ctx.artifact("policy_snapshots.csv"), {"t", "E", "h_x", "h_y", "p"});
    CsvWriter dcsv(ctx.artifact("density_snapshots.csv"), {"t", "E", "h_x", "h_y", "m"});
    for (int sn : snaps)
        for (int ie = 0; ie < grid.e.n; ++ie)
            for (int ix = 0; ix < grid.x.n; ++ix)
                for (int iy = 0; iy < grid.y.n; ++iy) {
                    double t = grid.t.coord(sn);
                    double e = grid.e.coord(ie);
                    double x = grid.x.coord(ix);
                    double y = grid.y.coord(iy);
                    pcsv.row({t, e, x, y, sol.powers.at(sn, ie, ix, iy)});
                    dcsv.row({t, e, x, y, sol.density.at(sn, ie, ix, iy)});
                }

    auto rep = consistency_check(sol, m0);
    ctx.details["converged"] = sol.converged;
    ctx.details["iterations"] = sol.iterations;
    ctx.details["residual"] = sol.residual;
    ctx.details["consistency_sup_dev"] = rep.sup_interference_dev;
    std::cout << "solve-mfg: " << (sol.converged ? "converged" : "NOT converged")
              << " in " << sol.iterations << " iterations, residual "
              << sol.residual << ", re-solve deviation "
              << rep.sup_interference_dev << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"energy-efficient power-control games toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path, out_dir;
    uint64_t seed = 0;
    int threads = 1;
    app.add_option("--config", config_path, "run configuration file (key = value lines)");
    app.add_option("--out", out_dir, "output directory (overrides out.dir)");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides sim.seed)");
    app.add_option("--threads", threads, "worker threads for path simulation")
        ->check(CLI::PositiveNumber);

    const std::pair<const char*, const char*> subs[] = {
        {"static-ne", "one-shot equilibrium powers for the configured gains"},
        {"simulate-channel", "Monte Carlo battery/channel paths"},
        {"solve-single", "single-player value function and feedback policy"},
        {"off-probability", "silence probability sweep over the energy price"},
        {"simulate-k", "finite-population game trajectory and concentration report"},
        {"solve-mfg", "coupled equilibrium of the population game"},
        {"check", "run the library invariant suite"},
    };
    for (const auto& [name, desc] : subs) app.add_subcommand(name, desc)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        RunContext ctx;
        if (!config_path.empty()) ctx.cfg = load_config(config_path);
        apply_env_overrides(ctx.cfg);
        if (!out_dir.empty()) ctx.cfg.out_dir = out_dir;
        if (seed_opt->count() > 0) ctx.cfg.sim_seed = seed;
        validate(ctx.cfg);
        ctx.threads = threads;
        ctx.out = ctx.cfg.out_dir;
        fs::create_directories(ctx.out);

        auto t0 = std::chrono::steady_clock::now();
        int check_failures = 0;
        if (sub == "static-ne") run_static_ne(ctx);
        else if (sub == "simulate-channel") run_simulate_channel(ctx);
        else if (sub == "solve-single") run_solve_single(ctx);
        else if (sub == "off-probability") run_off_probability(ctx);
        else if (sub == "simulate-k") run_simulate_k(ctx);
        else if (sub == "solve-mfg") run_solve_mfg(ctx);
        else check_failures = run_check_suite(ctx.cfg, std::cout);
        double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        {
            std::ofstream rc(ctx.out / "resolved_config.txt", std::ios::binary);
            rc << serialize(ctx.cfg);
            ctx.artifacts.push_back("resolved_config.txt");
        }
        char hash[20];
        std::snprintf(hash, sizeof hash, "%016llx",
                      static_cast<unsigned long long>(config_hash(ctx.cfg)));
        nlohmann::ordered_json man;
        man["subcommand"] = sub;
        man["scenario"] = ctx.cfg.name;
        man["version"] = kVersion;
        man["config_hash"] = hash;
        man["seed"] = ctx.cfg.sim_seed;
        man["threads"] = ctx.threads;
        man["wall_time_s"] = wall;
        man["artifacts"] = ctx.artifacts;
        if (sub == "check") man["check_failures"] = check_failures;
        for (auto& [k, v] : ctx.details.items()) man[k] = v;
        std::ofstream(ctx.out / "manifest.json", std::ios::binary) << man.dump(2) << "\n";

        return check_failures > 0 ? 4 : 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error (" << sub << "): " << e.what() << "\n";
        return 3;
    }
}
