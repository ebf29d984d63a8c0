#pragma once

#include <vector>

#include "powermfg/common.hpp"
#include "powermfg/efficiency.hpp"

namespace powermfg {

// One-shot power allocation across k transmitters sharing a receiver.
// gains[i] = |h_i|^2; interference is the plain (unnormalized) sum of the
// other players' received powers.
struct StaticProfile {
    std::vector<double> powers;
    std::vector<double> gains;
    double sigma2 = 1.0;
    double rate = 1.0;
};

double sinr(const StaticProfile& prof, int i);

// rate * f(sinr_i) / p_i, and 0 for a silent player.
double utility(const StaticProfile& prof, int i, const Efficiency& eff);

struct NeResult {
    std::vector<double> powers;
    bool exceeds_p_max = false;  // some equilibrium power sits above the cap
};

// Unique interior Nash equilibrium p_i = (sigma2/gains_i) * b / (1 - (k-1) b)
// with b = beta_star. Every player's SINR equals beta_star there. Throws
// std::domain_error when (k-1)*beta_star >= 1 (no interior equilibrium).
// Powers above p_max are reported via the flag, not projected.
NeResult static_ne(const std::vector<double>& gains, double sigma2,
                   const Efficiency& eff,
                   double p_max = std::numeric_limits<double>::infinity());

// Best reply of player i with the others' powers held fixed: argmax of the
// utility over [0, p_max] on a grid of grid_size points followed by a
// golden-section polish of the winning cell.
double best_response(const StaticProfile& prof, int i, const Efficiency& eff,
                     double p_max, int grid_size = 2000);

}  // namespace powermfg
