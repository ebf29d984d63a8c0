#pragma once

#include <vector>

#include "powermfg/common.hpp"
#include "powermfg/efficiency.hpp"
#include "powermfg/grid.hpp"
#include "powermfg/hjb.hpp"

namespace powermfg {

// Initial population density: stationary channel law times a narrow
// triangular battery profile (half-width one cell) centered at e0,
// normalized to unit mass on the grid. Returns one slice.
std::vector<double> initial_density(const GridSpec& grid, const OUParams& ou, double e0);

// Forward transport of the population density under the node-wise powers
// alpha:
//   dm/dt = d/dE(alpha m) - div_h(m * 0.5*(mu - h)) + (eta^2/2) lap_h m
// Conservative finite volume: battery advection upwinds toward lower E,
// channel drift+diffusion use Scharfetter-Gummel exponential fluxes (plain
// upwind smears the stationary law noticeably on coarse grids; the
// exponential flux keeps the sampled Gaussian exactly stationary), no-flux
// walls everywhere. Mass is checked to 1e-6 per slice; negative undershoots
// beyond -1e-12 abort, smaller ones are clipped and renormalized.
GridField solve_fpk(const GridField& alpha, const std::vector<double>& m0,
                    const OUParams& ou);

// Convenience overload: powers from the policy under its stored path.
GridField solve_fpk(const FeedbackPolicy& policy, const std::vector<double>& m0);

// i_hat(t_n) = sum over cells of |h|^2 * alpha * m * cell_volume.
std::vector<double> mean_interference(const GridField& m, const GridField& alpha);

struct MfgConfig {
    double damping = 0.5;  // Picard relaxation weight on the new interference
    double tol = 1e-3;
    int max_iter = 50;
};

struct MfgSolution {
    GridField value;
    GridField density;
    GridField powers;           // node-wise policy under i_hat
    std::vector<double> i_hat;  // interference path the last iterate ran under
    std::vector<double> residual_history;  // undamped residual per iterate
    FeedbackPolicy policy;
    int iterations = 0;
    double residual = 0.0;  // sup_t |i_hat_new - i_hat| of the last iterate
    bool converged = false;
};

// Damped Picard iteration on the interference path: value sweep backward,
// policy extraction, density transport forward, interference update. A run
// that exhausts max_iter reports converged = false rather than throwing.
MfgSolution solve_mfg(const GameParams& gp, const Efficiency& eff,
                      const GridSpec& grid, const std::vector<double>& m0,
                      const MfgConfig& cfg = {});

struct ConsistencyReport {
    double sup_interference_dev = 0.0;   // re-solved i_hat vs the stored one
    double max_mass_error = 0.0;         // worst |mass - 1| across slices
    double max_value_residual = 0.0;     // backward stencil residual, per unit time
    double max_density_residual = 0.0;   // forward stencil residual, per unit time
};

// Re-runs the forward solve under the returned policy and measures how far
// the induced interference drifts from the one the solution reports.
ConsistencyReport consistency_check(const MfgSolution& sol,
                                    const std::vector<double>& m0);

}  // namespace powermfg
