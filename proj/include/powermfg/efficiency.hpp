#pragma once

#include <vector>

#include "powermfg/common.hpp"

namespace powermfg {

enum class EfficiencyFamily {
    ExponentialRatio,   // f(x) = exp(-a/x), a > 0
    CumulativeSigmoid,  // f(x) = (1 - exp(-x))^m, integer m >= 2
};

struct HamiltonianResult {
    double value = 0.0;  // optimized running reward minus energy cost
    double p_star = 0.0; // maximizing transmit power
};

struct ExistenceReport {
    std::vector<double> thetas;
    std::vector<double> margins;  // |2*theta - f''(gamma_star(theta))|
    double min_margin = 0.0;
    bool degenerate = false;      // true when some margin < 1e-8
};

// Packet success probability as a function of SINR. Both families are
// sigmoidal (convex then concave) with f(0) = 0 and f'(0) = 0, which is what
// makes the energy-efficiency ratio f(x)/x well behaved: it has a unique
// interior maximizer beta_star solving x f'(x) = f(x).
//
// Construction precomputes the quantities the solvers query per grid node:
//   beta_star      root of x f'(x) - f(x), the power-control operating point
//   theta_max      sup of g(x) = (x f'(x) - f(x)) / x^2, the shutdown
//                  threshold for the energy price theta
//   max_ddf        sup of f'', used by the analytic off-probability bound
// Parameters that break the sigmoid shape (a <= 0, or m < 2, which gives
// f'(0) > 0) are rejected with std::invalid_argument.
class Efficiency {
public:
    static Efficiency exponential_ratio(double a);
    static Efficiency cumulative_sigmoid(int m);

    double f(double x) const;    // throws std::domain_error for x < 0
    double df(double x) const;
    double ddf(double x) const;

    // g(x) = (x f'(x) - f(x)) / x^2, the marginal the shutdown rule tests.
    double g(double x) const;

    double inflection() const { return inflection_; }
    double beta_star() const { return beta_star_; }
    double theta_max() const { return theta_max_; }
    double theta_max_arg() const { return theta_max_arg_; }
    double max_ddf() const { return max_ddf_; }
    double max_ddf_arg() const { return max_ddf_arg_; }

    EfficiencyFamily family() const { return family_; }
    double param_a() const { return a_; }
    int param_m() const { return m_; }

    // Largest root of g(x) = theta for theta in [0, theta_max); 0 at or above
    // the threshold. gamma_star(0) == beta_star.
    double gamma_star(double theta) const;

    // Pointwise optimization sup_{p in [0, p_max]} rate*f(c*p)/p - p*max(v_e, 0)
    // with c the instantaneous SINR-per-watt. Returns 0 power (value 0) when
    // transmitting cannot beat staying silent.
    HamiltonianResult hamiltonian(double c, double v_e, double rate, double p_max) const;

    // Margin |2*theta - f''(gamma_star(theta))| over a theta grid in
    // [0, theta_max). A vanishing margin means the feedback-optimal power is
    // about to lose local uniqueness; callers treat `degenerate` as a warning.
    ExistenceReport existence_check(const std::vector<double>& theta_grid) const;

private:
    Efficiency() = default;
    void finalize();  // computes the cached roots and suprema

    EfficiencyFamily family_ = EfficiencyFamily::ExponentialRatio;
    double a_ = 1.0;
    int m_ = 2;
    double inflection_ = 0.0;
    double beta_star_ = 0.0;
    double theta_max_ = 0.0;
    double theta_max_arg_ = 0.0;
    double max_ddf_ = 0.0;
    double max_ddf_arg_ = 0.0;
};

}  // namespace powermfg
