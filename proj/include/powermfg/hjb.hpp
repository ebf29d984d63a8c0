#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "powermfg/common.hpp"
#include "powermfg/efficiency.hpp"
#include "powermfg/grid.hpp"

namespace powermfg {

// Backward sweep of the value function on the (t, E, x, y) lattice:
//   dv/dt + H(E, h, dv/dE) + 0.5*<mu - h, grad_h v> + (eta^2/2) lap_h v = 0
// from the terminal condition v(T1) = terminal_weight * E. Explicit Euler in
// time, one-sided differences toward lower E for the battery advection (the
// state only drains), drift-sign upwinding and centered diffusion in h.
// Throws ConfigError when the time step violates the stability budget and
// NumericalError when a slice turns non-finite.
GridField solve_value(const GameParams& gp, const Efficiency& eff,
                      const InterferencePath& interference, const GridSpec& grid);

// Feedback rule recovered from a value field. Stores the clamped battery
// derivative dv/dE on the lattice; a query plugs the interpolated derivative
// and the caller-supplied interference level into the pointwise power
// optimization. Always 0 at an empty battery.
class FeedbackPolicy {
public:
    FeedbackPolicy(GridField v_e, GameParams gp, Efficiency eff,
                   InterferencePath base);

    double power(double t, double e, Vec2 h, double interference) const;
    double power_at_node(int it, int ie, int ix, int iy, double interference) const;

    // Node-wise powers under the stored interference path (or a custom one).
    GridField power_grid() const;
    GridField power_grid(const InterferencePath& interference) const;

    const GridField& v_e() const { return v_e_; }
    const GridSpec& grid() const { return v_e_.grid; }
    const GameParams& params() const { return gp_; }
    const Efficiency& efficiency() const { return eff_; }
    const InterferencePath& base_path() const { return base_; }

private:
    GridField v_e_;
    GameParams gp_;
    Efficiency eff_;
    InterferencePath base_;
};

FeedbackPolicy extract_policy(const GridField& value, const GameParams& gp,
                              const Efficiency& eff,
                              const InterferencePath& interference);

struct OffProbabilityRow {
    double v_e = 0.0;
    double lower_bound = 0.0;  // Pr[|h|^4 <= 2 v_e sigma^4 / (rate * sup f'')]
    double mc_estimate = 0.0;  // Pr[the feedback rule turns the radio off]
    double std_error = 0.0;    // binomial standard error of mc_estimate
};

// Probability that a transmitter with battery value slope v_e stays silent
// under the stationary channel law, swept over v_e_grid.
std::vector<OffProbabilityRow> off_probability(const Efficiency& eff,
                                               const GameParams& gp,
                                               const std::vector<double>& v_e_grid,
                                               int n_samples, uint64_t seed);

}  // namespace powermfg
