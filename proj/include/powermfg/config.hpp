#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "powermfg/common.hpp"
#include "powermfg/efficiency.hpp"
#include "powermfg/grid.hpp"
#include "powermfg/mfg.hpp"

namespace powermfg {

// Flat key=value run configuration ('#' comments, dotted keys). Unknown and
// duplicate keys are rejected so typos fail loudly. serialize() emits every
// key at full precision and parse(serialize(c)) reproduces c exactly.
struct RunConfig {
    std::string name = "default";  // scenario label, stamped into manifests

    GameParams game;

    std::string efficiency_family = "exponential";  // or "cumulative"
    double efficiency_a = 1.0;
    int efficiency_m = 2;

    double grid_e_max = 4.0;
    int grid_n_e = 20;
    int grid_n_x = 16;
    int grid_n_y = 16;
    int grid_n_t = 50;
    double grid_width = 4.0;

    MfgConfig solver;

    double sim_dt = 1e-2;
    uint64_t sim_seed = 1;
    int sim_n_paths = 1000;
    int sim_replications = 100;
    double sim_e0 = 4.0;
    double sim_power = 0.5;            // constant-policy drain
    std::string sim_policy = "constant";  // or "hjb"
    bool sim_exact = false;            // closed-form channel transition
    int sim_record_stride = 1;
    std::vector<int> sim_k_list{16, 64, 256};
    std::vector<double> sim_probe_times;  // empty -> midpoint and endpoint

    double sweep_v_e_max = 2.0;
    int sweep_points = 20;
    int sweep_samples = 100000;

    std::vector<double> static_gains;  // empty -> all ones

    std::string out_dir = "out";
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize(const RunConfig& cfg);

// POWERMFG_<SECTION>_<KEY>=value beats the file; the first underscore after
// the prefix separates the section (POWERMFG_GAME_MU_X -> game.mu_x).
void apply_env_overrides(RunConfig& cfg);

// Range checks shared by every subcommand. Throws ConfigError naming the key.
void validate(const RunConfig& cfg);

Efficiency make_efficiency(const RunConfig& cfg);
GridSpec make_grid(const RunConfig& cfg);

// FNV-1a over the canonical serialization; stamped into run manifests.
uint64_t config_hash(const RunConfig& cfg);

}  // namespace powermfg
