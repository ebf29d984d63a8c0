#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "powermfg/common.hpp"
#include "powermfg/dynamics.hpp"
#include "powermfg/efficiency.hpp"
#include "powermfg/grid.hpp"

namespace powermfg {

// Feedback rule as the simulator sees it: (t, own state, measured
// interference) -> requested power. The simulator clamps to [0, p_max] and
// forces silence on an empty battery.
using PolicyFn = std::function<double(double, const GenericState&, double)>;

// Player initial conditions plus the RNG stream each player owns. Streams
// travel with the player, so relabeling players permutes trajectories
// bit-for-bit.
struct Population {
    std::vector<GenericState> states;
    std::vector<uint64_t> streams;
};

Population common_population(int k, double e0, Vec2 h0);
Population stationary_population(int k, double e0, const OUParams& ou, uint64_t seed);

struct TrajectorySlice {
    double t = 0.0;
    std::vector<double> energy, hx, hy, power, interference, utility;
};

struct Trajectory {
    int k = 0;
    double dt = 0.0;
    std::vector<TrajectorySlice> slices;  // every record_stride steps plus the endpoint
    std::vector<double> final_utility;    // running integral plus terminal payoff
};

// Euler simulation of the k-player game. Interference is the 1/k-normalized
// sum of the other players' received powers, evaluated with the previous
// step's powers (zero before the first step); utilities accumulate by
// left-endpoint quadrature.
Trajectory simulate(const PolicyFn& policy, const GameParams& gp,
                    const Efficiency& eff, const Population& init, double dt,
                    uint64_t seed, int record_stride = 1);

struct EmpiricalMeasure {
    GridSpec grid;
    std::vector<double> density;  // slice-sized, integrates to 1
    int clamped = 0;              // states that fell outside the box
};

EmpiricalMeasure empirical_measure(const std::vector<GenericState>& states,
                                   const GridSpec& grid);

struct ConvergenceRow {
    int k = 0;
    double probe_t = 0.0;
    double mean_dev = 0.0;  // mean of |I_i(t*) - i_hat(t*)|
    double std_dev = 0.0;   // spread across players and replications
};

// How fast the measured interference approaches a reference path i_hat as the
// population grows: repeated simulations from stationary initial channels.
std::vector<ConvergenceRow> convergence_report(
    const PolicyFn& policy, const GameParams& gp, const Efficiency& eff,
    const std::vector<int>& k_list, int replications,
    const std::vector<double>& probe_times, const InterferencePath& i_hat,
    double e0, double dt, uint64_t seed);

}  // namespace powermfg
