#include "powermfg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace powermfg {

double ChannelMoments::variance() const {
    return second() - mean.norm2();
}

ChannelMoments transient_moments(Vec2 h0, const OUParams& ou, double t) {
    if (t < 0.0) throw std::domain_error("transient_moments: t must be >= 0");
    double d1 = std::exp(-0.5 * t);  // mean decay
    double d2 = std::exp(-t);        // second-moment decay
    ChannelMoments m;
    m.mean.x = ou.mu.x + (h0.x - ou.mu.x) * d1;
    m.mean.y = ou.mu.y + (h0.y - ou.mu.y) * d1;
    // Per component: dE[x^2]/dt = -E[x^2] + mu_x E[x] + eta^2, solved exactly.
    double eta2 = ou.eta * ou.eta;
    auto second = [&](double x0, double mu) {
        return x0 * x0 * d2 + (mu * mu + eta2) * (1.0 - d2) +
               2.0 * mu * (x0 - mu) * (d1 - d2);
    };
    m.ex2 = second(h0.x, ou.mu.x);
    m.ey2 = second(h0.y, ou.mu.y);
    return m;
}

double stationary_density(Vec2 h, const OUParams& ou) {
    if (!(ou.eta > 0.0))
        throw std::domain_error("stationary_density: eta must be positive");
    constexpr double two_pi = 6.283185307179586476925286766559;
    double eta2 = ou.eta * ou.eta;
    double q = (h - ou.mu).norm2() / (2.0 * eta2);
    return std::exp(-q) / (two_pi * eta2);
}

std::vector<GenericState> simulate_channel_paths(const ChannelPathSpec& spec,
                                                 const OUParams& ou,
                                                 uint64_t seed, int n_threads) {
    if (spec.n_paths < 1 || spec.n_steps < 1 || !(spec.dt > 0.0))
        throw std::invalid_argument("simulate_channel_paths: bad path spec");

    std::vector<GenericState> out(spec.n_paths);
    auto run_range = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            CounterRng rng(seed, static_cast<uint64_t>(i));
            GenericState s{spec.e0, spec.h0};
            if (spec.exact) {
                for (int n = 0; n < spec.n_steps; ++n) {
                    auto [zx, zy] = rng.next_normal_pair();
                    s = step_state_exact(s, spec.power, spec.dt, ou, {zx, zy});
                }
            } else {
                for (int n = 0; n < spec.n_steps; ++n) {
                    auto [zx, zy] = rng.next_normal_pair();
                    s = step_state(s, spec.power, spec.dt, ou, {zx, zy});
                }
            }
            out[i] = s;
        }
    };

    int workers = std::max(1, n_threads);
    if (workers == 1) {
        run_range(0, spec.n_paths);
        return out;
    }
    // Each path owns its RNG stream, so splitting the index range is safe and
    // the result does not depend on the worker count.
    std::vector<std::thread> pool;
    int chunk = (spec.n_paths + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        int begin = w * chunk;
        int end = std::min(spec.n_paths, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(run_range, begin, end);
    }
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace powermfg
