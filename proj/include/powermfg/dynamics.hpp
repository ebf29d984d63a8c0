#pragma once

#include <cstdint>
#include <vector>

#include "powermfg/common.hpp"
#include "powermfg/rng.hpp"

namespace powermfg {

// Channel relaxation parameters: dh = 0.5*(mu - h) dt + eta dW per component,
// a 2-d mean-reverting diffusion whose stationary law is N(mu, eta^2 I).
struct OUParams {
    Vec2 mu{1.0, 0.0};
    double eta = 0.5;
};

// Euler-Maruyama step of the joint state. The battery drains at the transmit
// power and is absorbed at zero; z is a standard normal pair.
inline GenericState step_state(const GenericState& s, double p, double dt,
                               const OUParams& ou, Vec2 z) {
    GenericState out;
    out.energy = s.energy - p * dt;
    if (out.energy < 0.0) out.energy = 0.0;
    double sd = ou.eta * std::sqrt(dt);
    out.h.x = s.h.x + 0.5 * (ou.mu.x - s.h.x) * dt + sd * z.x;
    out.h.y = s.h.y + 0.5 * (ou.mu.y - s.h.y) * dt + sd * z.y;
    return out;
}

// Exact conditional sampling of the channel over dt (the linear drift admits a
// closed-form transition: mean decays like exp(-dt/2), variance is
// eta^2*(1-exp(-dt))). Battery handled as above.
inline GenericState step_state_exact(const GenericState& s, double p, double dt,
                                     const OUParams& ou, Vec2 z) {
    GenericState out;
    out.energy = s.energy - p * dt;
    if (out.energy < 0.0) out.energy = 0.0;
    double decay = std::exp(-0.5 * dt);
    double sd = ou.eta * std::sqrt(-std::expm1(-dt));
    out.h.x = ou.mu.x + (s.h.x - ou.mu.x) * decay + sd * z.x;
    out.h.y = ou.mu.y + (s.h.y - ou.mu.y) * decay + sd * z.y;
    return out;
}

struct ChannelMoments {
    Vec2 mean;        // E[h](t)
    double ex2 = 0.0; // E[h_x^2](t)
    double ey2 = 0.0; // E[h_y^2](t)

    double second() const { return ex2 + ey2; }                    // E[|h|^2]
    double variance() const;                                       // E[|h|^2] - |E[h]|^2
};

// Closed-form transient moments started from the deterministic point h0.
ChannelMoments transient_moments(Vec2 h0, const OUParams& ou, double t);

// Stationary density N(mu, eta^2 I), evaluated at h. Throws for eta == 0
// (the stationary law degenerates to a point mass at mu).
double stationary_density(Vec2 h, const OUParams& ou);

// Draw from the stationary law.
inline Vec2 stationary_sample(const OUParams& ou, CounterRng& rng) {
    auto [zx, zy] = rng.next_normal_pair();
    return {ou.mu.x + ou.eta * zx, ou.mu.y + ou.eta * zy};
}

// Monte Carlo sweep used by the simulate-channel command and the moment
// tests: n_paths independent paths from a common start, constant drain power,
// Euler stepping. Returns per-path final states; streams are keyed by path
// index so results are independent of batching.
struct ChannelPathSpec {
    int n_paths = 1000;
    int n_steps = 1000;
    double dt = 1e-3;
    double power = 0.0;
    double e0 = 1.0;
    Vec2 h0{1.0, 0.0};
    bool exact = false;  // use the closed-form transition instead of Euler
};

std::vector<GenericState> simulate_channel_paths(const ChannelPathSpec& spec,
                                                 const OUParams& ou,
                                                 uint64_t seed, int n_threads = 1);

}  // namespace powermfg
