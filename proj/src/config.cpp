#include "powermfg/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

extern char** environ;

namespace powermfg {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for " + key + ": '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("config: trailing junk in " + key + ": '" + v + "'");
    return out;
}

long long parse_int(const std::string& key, const std::string& v) {
    size_t pos = 0;
    long long out;
    try {
        out = std::stoll(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("config: trailing junk in " + key + ": '" + v + "'");
    return out;
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
    size_t pos = 0;
    uint64_t out;
    try {
        out = std::stoull(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: bad unsigned integer for " + key + ": '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("config: trailing junk in " + key + ": '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: bad boolean for " + key + ": '" + v + "'");
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& key, const std::string& v, F item) {
    std::vector<T> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(item(key, trim(cell)));
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
std::string fmt_list(const std::vector<T>& v, std::string (*one)(T)) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += one(v[i]);
    }
    return out;
}

// One table drives parsing, env overrides, and serialization.
struct Key {
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, Key>& key_table() {
    static const std::map<std::string, Key> table = {
        {"scenario.name",
         {[](RunConfig& c, const std::string&, const std::string& v) { c.name = v; },
          [](const RunConfig& c) { return c.name; }}},
        {"game.k",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.game.k = static_cast<int>(parse_int(k, v));
          },
          [](const RunConfig& c) { return std::to_string(c.game.k); }}},
        {"game.rate",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.game.rate = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.game.rate); }}},
        {"game.sigma2",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.game.sigma2 = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.game.sigma2); }}},
        {"game.mu_x",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.game.mu.x = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.game.mu.x); }}},
        {"game.mu_y",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.game.mu.y = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.game.mu.y); }}},
        {"game.eta",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.game.eta = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.game.eta); }}},
        {"game.p_max",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.game.p_max = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.game.p_max); }}},
        {"game.t0",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.game.t0 = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.game.t0); }}},
        {"game.t1",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.game.t1 = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.game.t1); }}},
        {"game.terminal_weight",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.game.terminal_weight = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.game.terminal_weight); }}},
        {"efficiency.family",
         {[](RunConfig& c, const std::string&, const std::string& v) {
              c.efficiency_family = v;
          },
          [](const RunConfig& c) { return c.efficiency_family; }}},
        {"efficiency.a",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.efficiency_a = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.efficiency_a); }}},
        {"efficiency.m",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.efficiency_m = static_cast<int>(parse_int(k, v));
          },
          [](const RunConfig& c) { return std::to_string(c.efficiency_m); }}},
        {"grid.e_max",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.grid_e_max = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.grid_e_max); }}},
        {"grid.n_e",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.grid_n_e = static_cast<int>(parse_int(k, v));
          },
          [](const RunConfig& c) { return std::to_string(c.grid_n_e); }}},
        {"grid.n_x",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.grid_n_x = static_cast<int>(parse_int(k, v));
          },
          [](const RunConfig& c) { return std::to_string(c.grid_n_x); }}},
        {"grid.n_y",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.grid_n_y = static_cast<int>(parse_int(k, v));
          },
          [](const RunConfig& c) { return std::to_string(c.grid_n_y); }}},
        {"grid.n_t",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.grid_n_t = static_cast<int>(parse_int(k, v));
          },
          [](const RunConfig& c) { return std::to_string(c.grid_n_t); }}},
        {"grid.width",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.grid_width = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.grid_width); }}},
        {"solver.damping",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.solver.damping = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.solver.damping); }}},
        {"solver.tol",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.solver.tol = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.solver.tol); }}},
        {"solver.max_iter",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.solver.max_iter = static_cast<int>(parse_int(k, v));
          },
          [](const RunConfig& c) { return std::to_string(c.solver.max_iter); }}},
        {"sim.dt",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.sim_dt = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.sim_dt); }}},
        {"sim.seed",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.sim_seed = parse_u64(k, v);
          },
          [](const RunConfig& c) { return std::to_string(c.sim_seed); }}},
        {"sim.n_paths",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.sim_n_paths = static_cast<int>(parse_int(k, v));
          },
          [](const RunConfig& c) { return std::to_string(c.sim_n_paths); }}},
        {"sim.replications",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.sim_replications = static_cast<int>(parse_int(k, v));
          },
          [](const RunConfig& c) { return std::to_string(c.sim_replications); }}},
        {"sim.e0",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.sim_e0 = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.sim_e0); }}},
        {"sim.power",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.sim_power = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.sim_power); }}},
        {"sim.policy",
         {[](RunConfig& c, const std::string&, const std::string& v) {
              c.sim_policy = v;
          },
          [](const RunConfig& c) { return c.sim_policy; }}},
        {"sim.exact",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.sim_exact = parse_bool(k, v);
          },
          [](const RunConfig& c) { return std::string(c.sim_exact ? "true" : "false"); }}},
        {"sim.record_stride",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.sim_record_stride = static_cast<int>(parse_int(k, v));
          },
          [](const RunConfig& c) { return std::to_string(c.sim_record_stride); }}},
        {"sim.k_list",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.sim_k_list = parse_list<int>(k, v, [](const std::string& kk, const std::string& vv) {
                  return static_cast<int>(parse_int(kk, vv));
              });
          },
          [](const RunConfig& c) {
              return fmt_list<int>(c.sim_k_list, +[](int v) { return std::to_string(v); });
          }}},
        {"sim.probe_times",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.sim_probe_times = parse_list<double>(k, v, parse_double);
          },
          [](const RunConfig& c) {
              return fmt_list<double>(c.sim_probe_times, +[](double v) { return fmt(v); });
          }}},
        {"sweep.v_e_max",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.sweep_v_e_max = parse_double(k, v);
          },
          [](const RunConfig& c) { return fmt(c.sweep_v_e_max); }}},
        {"sweep.points",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.sweep_points = static_cast<int>(parse_int(k, v));
          },
          [](const RunConfig& c) { return std::to_string(c.sweep_points); }}},
        {"sweep.samples",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.sweep_samples = static_cast<int>(parse_int(k, v));
          },
          [](const RunConfig& c) { return std::to_string(c.sweep_samples); }}},
        {"static.gains",
         {[](RunConfig& c, const std::string& k, const std::string& v) {
              c.static_gains = parse_list<double>(k, v, parse_double);
          },
          [](const RunConfig& c) {
              return fmt_list<double>(c.static_gains, +[](double v) { return fmt(v); });
          }}},
        {"out.dir",
         {[](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; },
          [](const RunConfig& c) { return c.out_dir; }}},
    };
    return table;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> seen;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto it = key_table().find(key);
        if (it == key_table().end())
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        seen.push_back(key);
        it->second.set(cfg, key, value);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize(const RunConfig& cfg) {
    std::string out;
    for (const auto& [key, entry] : key_table()) {
        out += key;
        out += " = ";
        out += entry.get(cfg);
        out += "\n";
    }
    return out;
}

void apply_env_overrides(RunConfig& cfg) {
    constexpr const char* prefix = "POWERMFG_";
    for (char** e = environ; *e; ++e) {
        std::string entry(*e);
        if (entry.rfind(prefix, 0) != 0) continue;
        size_t eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string name = entry.substr(strlen(prefix), eq - strlen(prefix));
        std::string value = entry.substr(eq + 1);
        size_t us = name.find('_');
        if (us == std::string::npos)
            throw ConfigError("environment: cannot map " + entry.substr(0, eq));
        std::string key = name.substr(0, us) + "." + name.substr(us + 1);
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char ch) { return std::tolower(ch); });
        auto it = key_table().find(key);
        if (it == key_table().end())
            throw ConfigError("environment: " + entry.substr(0, eq) +
                              " does not name a config key");
        it->second.set(cfg, key, value);
    }
}

void validate(const RunConfig& cfg) {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError("config: " + msg);
    };
    require(cfg.game.k >= 1, "game.k must be >= 1");
    require(cfg.game.rate > 0.0, "game.rate must be positive");
    require(cfg.game.sigma2 > 0.0, "game.sigma2 must be positive");
    require(cfg.game.eta >= 0.0, "game.eta must be >= 0");
    require(cfg.game.p_max > 0.0, "game.p_max must be positive");
    require(cfg.game.t1 > cfg.game.t0, "game.t1 must exceed game.t0");
    require(cfg.efficiency_family == "exponential" || cfg.efficiency_family == "cumulative",
            "efficiency.family must be 'exponential' or 'cumulative'");
    if (cfg.efficiency_family == "exponential")
        require(cfg.efficiency_a > 0.0, "efficiency.a must be positive");
    else
        require(cfg.efficiency_m >= 2, "efficiency.m must be an integer >= 2");
    require(cfg.grid_e_max > 0.0, "grid.e_max must be positive");
    require(cfg.grid_n_e >= 8 && cfg.grid_n_x >= 8 && cfg.grid_n_y >= 8,
            "grid axes need at least 8 nodes");
    require(cfg.grid_n_t >= 2, "grid.n_t must be >= 2");
    require(cfg.grid_width > 0.0, "grid.width must be positive");
    require(cfg.solver.damping > 0.0 && cfg.solver.damping <= 1.0,
            "solver.damping must lie in (0, 1]");
    require(cfg.solver.tol > 0.0, "solver.tol must be positive");
    require(cfg.solver.max_iter >= 1, "solver.max_iter must be >= 1");
    require(cfg.sim_dt > 0.0, "sim.dt must be positive");
    require(cfg.sim_n_paths >= 1, "sim.n_paths must be >= 1");
    require(cfg.sim_replications >= 2, "sim.replications must be >= 2");
    require(cfg.sim_e0 >= 0.0 && cfg.sim_e0 <= cfg.grid_e_max,
            "sim.e0 must lie inside [0, grid.e_max]");
    require(cfg.sim_power >= 0.0, "sim.power must be >= 0");
    require(cfg.sim_policy == "constant" || cfg.sim_policy == "hjb",
            "sim.policy must be 'constant' or 'hjb'");
    require(cfg.sim_record_stride >= 1, "sim.record_stride must be >= 1");
    for (int k : cfg.sim_k_list) require(k >= 2, "sim.k_list entries must be >= 2");
    require(cfg.sweep_v_e_max >= 0.0, "sweep.v_e_max must be >= 0");
    require(cfg.sweep_points >= 2, "sweep.points must be >= 2");
    require(cfg.sweep_samples >= 10000, "sweep.samples must be >= 10000");
    for (double g : cfg.static_gains) require(g > 0.0, "static.gains must be positive");
    require(cfg.static_gains.empty() ||
                cfg.static_gains.size() == static_cast<size_t>(cfg.game.k),
            "static.gains must be empty or list game.k entries");
    require(!cfg.out_dir.empty(), "out.dir must not be empty");
}

Efficiency make_efficiency(const RunConfig& cfg) {
    if (cfg.efficiency_family == "exponential")
        return Efficiency::exponential_ratio(cfg.efficiency_a);
    if (cfg.efficiency_family == "cumulative")
        return Efficiency::cumulative_sigmoid(cfg.efficiency_m);
    throw ConfigError("config: efficiency.family must be 'exponential' or 'cumulative'");
}

GridSpec make_grid(const RunConfig& cfg) {
    return GridSpec::centered(cfg.game, cfg.grid_e_max, cfg.grid_n_e, cfg.grid_n_x,
                              cfg.grid_n_y, cfg.grid_n_t, cfg.grid_width);
}

uint64_t config_hash(const RunConfig& cfg) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : serialize(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace powermfg
