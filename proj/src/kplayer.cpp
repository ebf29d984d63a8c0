#include "powermfg/kplayer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "powermfg/rng.hpp"

namespace powermfg {

Population common_population(int k, double e0, Vec2 h0) {
    if (k < 1) throw std::invalid_argument("population: k must be >= 1");
    Population pop;
    pop.states.assign(k, GenericState{e0, h0});
    pop.streams.resize(k);
    std::iota(pop.streams.begin(), pop.streams.end(), uint64_t{0});
    return pop;
}

Population stationary_population(int k, double e0, const OUParams& ou, uint64_t seed) {
    Population pop = common_population(k, e0, ou.mu);
    for (int i = 0; i < k; ++i) {
        // A dedicated draw stream per player, separate from the path stream.
        CounterRng rng(seed ^ 0x5151e5eed5ULL, pop.streams[i]);
        pop.states[i].h = stationary_sample(ou, rng);
    }
    return pop;
}

Trajectory simulate(const PolicyFn& policy, const GameParams& gp,
                    const Efficiency& eff, const Population& init, double dt,
                    uint64_t seed, int record_stride) {
    int k = static_cast<int>(init.states.size());
    if (k < 1) throw std::invalid_argument("simulate: empty population");
    if (init.streams.size() != init.states.size())
        throw std::invalid_argument("simulate: states/streams size mismatch");
    if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
    if (record_stride < 1) record_stride = 1;

    double horizon = gp.t1 - gp.t0;
    int n_steps = std::max(1, static_cast<int>(std::llround(horizon / dt)));
    double dt_eff = horizon / n_steps;  // land exactly on t1

    // Interference sums run in stream-id order so that relabeling the player
    // array cannot change the floating-point result.
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return init.streams[a] < init.streams[b];
    });

    std::vector<CounterRng> rng;
    rng.reserve(k);
    for (int i = 0; i < k; ++i) rng.emplace_back(seed, init.streams[i]);

    std::vector<GenericState> states = init.states;
    std::vector<double> contrib(k, 0.0);  // previous step's p_j |h_j|^2
    std::vector<double> powers(k, 0.0), inter(k, 0.0), running(k, 0.0);

    Trajectory traj;
    traj.k = k;
    traj.dt = dt_eff;
    OUParams ou{gp.mu, gp.eta};

    for (int n = 0; n <= n_steps; ++n) {
        double t = gp.t0 + n * dt_eff;
        double total = 0.0;
        for (int j : order) total += contrib[j];
        for (int i = 0; i < k; ++i) {
            inter[i] = (total - contrib[i]) / k;
            double p = 0.0;
            if (states[i].energy > 0.0) {
                p = policy(t, states[i], inter[i]);
                if (!(p >= 0.0)) p = 0.0;
                p = std::min(p, gp.p_max);
            }
            powers[i] = p;
        }
        if (n < n_steps) {
            for (int i = 0; i < k; ++i) {
                if (powers[i] > 0.0) {
                    double gamma = powers[i] * states[i].h.norm2() / (gp.sigma2 + inter[i]);
                    running[i] += dt_eff * gp.rate * eff.f(gamma) / powers[i];
                }
            }
        }
        if (n % record_stride == 0 || n == n_steps) {
            TrajectorySlice s;
            s.t = t;
            s.energy.resize(k);
            s.hx.resize(k);
            s.hy.resize(k);
            s.power = powers;
            s.interference = inter;
            s.utility = running;
            for (int i = 0; i < k; ++i) {
                s.energy[i] = states[i].energy;
                s.hx[i] = states[i].h.x;
                s.hy[i] = states[i].h.y;
            }
            traj.slices.push_back(std::move(s));
        }
        if (n == n_steps) break;
        for (int i = 0; i < k; ++i) {
            contrib[i] = powers[i] * states[i].h.norm2();
            auto [zx, zy] = rng[i].next_normal_pair();
            states[i] = step_state(states[i], powers[i], dt_eff, ou, {zx, zy});
        }
    }

    traj.final_utility = running;
    for (int i = 0; i < k; ++i)
        traj.final_utility[i] += gp.terminal_weight * states[i].energy;
    return traj;
}

EmpiricalMeasure empirical_measure(const std::vector<GenericState>& states,
                                   const GridSpec& grid) {
    grid.validate();
    if (states.empty()) throw std::invalid_argument("empirical_measure: no states");
    EmpiricalMeasure em;
    em.grid = grid;
    em.density.assign(grid.slice_size(), 0.0);

    auto bin = [](const Axis& ax, double v, bool& clamped) {
        int i = static_cast<int>(std::lround((v - ax.lo) / ax.step()));
        if (i < 0) {
            clamped = true;
            return 0;
        }
        if (i >= ax.n) {
            clamped = true;
            return ax.n - 1;
        }
        return i;
    };

    for (const auto& s : states) {
        bool clamped = false;
        int ie = bin(grid.e, s.energy, clamped);
        int ix = bin(grid.x, s.h.x, clamped);
        int iy = bin(grid.y, s.h.y, clamped);
        em.density[grid.idx(ie, ix, iy)] += 1.0;
        if (clamped) ++em.clamped;
    }
    double w = 1.0 / (static_cast<double>(states.size()) * grid.cell_volume());
    for (double& d : em.density) d *= w;
    return em;
}

std::vector<ConvergenceRow> convergence_report(
    const PolicyFn& policy, const GameParams& gp, const Efficiency& eff,
    const std::vector<int>& k_list, int replications,
    const std::vector<double>& probe_times, const InterferencePath& i_hat,
    double e0, double dt, uint64_t seed) {
    if (replications < 2)
        throw std::invalid_argument("convergence_report: need >= 2 replications");

    std::vector<ConvergenceRow> rows;
    OUParams ou{gp.mu, gp.eta};
    for (int k : k_list) {
        // One deviation sample per (player, replication, probe).
        std::vector<std::vector<double>> devs(probe_times.size());
        for (int r = 0; r < replications; ++r) {
            uint64_t rep_seed =
                CounterRng(seed, (static_cast<uint64_t>(k) << 32) | static_cast<uint64_t>(r))
                    .next_u64();
            Population pop = stationary_population(k, e0, ou, rep_seed);
            Trajectory traj = simulate(policy, gp, eff, pop, dt, rep_seed);
            for (size_t q = 0; q < probe_times.size(); ++q) {
                // Nearest recorded slice at or after the probe.
                size_t best = 0;
                double best_gap = std::abs(traj.slices[0].t - probe_times[q]);
                for (size_t s = 1; s < traj.slices.size(); ++s) {
                    double gap = std::abs(traj.slices[s].t - probe_times[q]);
                    if (gap < best_gap) {
                        best_gap = gap;
                        best = s;
                    }
                }
                double ref = i_hat(traj.slices[best].t);
                for (double ii : traj.slices[best].interference)
                    devs[q].push_back(std::abs(ii - ref));
            }
        }
        for (size_t q = 0; q < probe_times.size(); ++q) {
            double mean = 0.0;
            for (double d : devs[q]) mean += d;
            mean /= devs[q].size();
            double var = 0.0;
            for (double d : devs[q]) var += (d - mean) * (d - mean);
            var /= (devs[q].size() - 1);
            rows.push_back({k, probe_times[q], mean, std::sqrt(var)});
        }
    }
    return rows;
}

}  // namespace powermfg
