// Channel dynamics: stepping, closed-form moments, and the stationary law.
// The closed-form second moment at (mu_x=1, eta=0.5, x0=0, t=2) was pinned
// with a 40-digit evaluation of the moment ODE solution; Monte Carlo checks
// run at reduced scale here (the full-size runs live in the acceptance suite).

#include <doctest.h>

#include <cmath>
#include <vector>

#include "powermfg/dynamics.hpp"

using namespace powermfg;

TEST_SUITE("dynamics") {

TEST_CASE("drift fixed point: no noise, channel at mu, no drain") {
    OUParams ou{{1.0, 0.0}, 0.0};
    GenericState s{2.0, {1.0, 0.0}};
    for (int i = 0; i < 50; ++i) s = step_state(s, 0.0, 0.01, ou, {0.0, 0.0});
    CHECK(s.energy == 2.0);
    CHECK(s.h.x == 1.0);
    CHECK(s.h.y == 0.0);
}

TEST_CASE("battery drains linearly and absorbs at zero") {
    OUParams ou{{1.0, 0.0}, 0.0};
    GenericState s{1.0, {1.0, 0.0}};
    double p = 0.4, dt = 0.5;
    s = step_state(s, p, dt, ou, {0.0, 0.0});
    CHECK(s.energy == doctest::Approx(0.8).epsilon(1e-15));
    for (int i = 0; i < 10; ++i) {
        s = step_state(s, p, dt, ou, {0.0, 0.0});
        CHECK(s.energy >= 0.0);
    }
    CHECK(s.energy == 0.0);
}

TEST_CASE("transient moments honor the endpoints") {
    OUParams ou{{1.0, 0.0}, 0.5};
    Vec2 h0{0.3, -0.2};
    auto at0 = transient_moments(h0, ou, 0.0);
    CHECK(at0.mean.x == doctest::Approx(h0.x).epsilon(1e-14));
    CHECK(at0.mean.y == doctest::Approx(h0.y).epsilon(1e-14));
    CHECK(at0.ex2 == doctest::Approx(h0.x * h0.x).epsilon(1e-14));
    CHECK(at0.ey2 == doctest::Approx(h0.y * h0.y).epsilon(1e-14));

    auto late = transient_moments(h0, ou, 80.0);
    CHECK(late.mean.x == doctest::Approx(ou.mu.x).epsilon(1e-12));
    CHECK(late.mean.y == doctest::Approx(ou.mu.y).scale(1.0).epsilon(1e-12));
    CHECK(late.ex2 == doctest::Approx(ou.mu.x * ou.mu.x + 0.25).epsilon(1e-12));
    CHECK(late.ey2 == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(late.variance() == doctest::Approx(2.0 * 0.25).epsilon(1e-12));
}

TEST_CASE("transient moments match the frozen t=2 reference") {
    OUParams ou{{1.0, 0.0}, 0.5};
    auto m = transient_moments({0.0, 0.0}, ou, 2.0);
    // mean_x = 1 - e^{-1}; E[x^2] = (mu^2 + eta^2)(1 - e^{-2}) - 2(e^{-1} - e^{-2}).
    CHECK(m.mean.x == doctest::Approx(0.63212055882855768).epsilon(1e-14));
    CHECK(m.ex2 == doctest::Approx(0.61574258008457488).epsilon(1e-13));
    CHECK(m.ey2 == doctest::Approx(0.25 * (1.0 - std::exp(-2.0))).epsilon(1e-13));
}

TEST_CASE("euler paths reproduce the closed-form moments") {
    OUParams ou{{1.0, 0.0}, 0.5};
    ChannelPathSpec spec;
    spec.n_paths = 20000;
    spec.n_steps = 2000;
    spec.dt = 1e-3;
    spec.h0 = {0.0, 0.0};
    auto states = simulate_channel_paths(spec, ou, 42);
    REQUIRE(states.size() == static_cast<size_t>(spec.n_paths));

    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
    for (const auto& s : states) {
        sx += s.h.x;
        sy += s.h.y;
        sxx += s.h.x * s.h.x;
        syy += s.h.y * s.h.y;
    }
    double n = spec.n_paths;
    auto exact = transient_moments(spec.h0, ou, spec.n_steps * spec.dt);
    // Per-component standard error of the mean is about eta/sqrt(n) here.
    double se = ou.eta / std::sqrt(n);
    CHECK(std::abs(sx / n - exact.mean.x) < 4.0 * se);
    CHECK(std::abs(sy / n - exact.mean.y) < 4.0 * se);
    CHECK(sxx / n == doctest::Approx(exact.ex2).epsilon(0.02));
    CHECK(syy / n == doctest::Approx(exact.ey2).epsilon(0.05));
}

TEST_CASE("exact stepper lands on the transition law in one big step") {
    OUParams ou{{1.0, 0.0}, 0.5};
    double t = 3.0;
    int n = 200000;
    CounterRng rng(7, 0);
    double sx = 0.0, sxx = 0.0;
    for (int i = 0; i < n; ++i) {
        auto [zx, zy] = rng.next_normal_pair();
        auto s = step_state_exact({1.0, {0.0, 0.0}}, 0.0, t, ou, {zx, zy});
        sx += s.h.x;
        sxx += s.h.x * s.h.x;
    }
    auto exact = transient_moments({0.0, 0.0}, ou, t);
    CHECK(std::abs(sx / n - exact.mean.x) < 4.0 * ou.eta / std::sqrt(double(n)));
    CHECK(sxx / n == doctest::Approx(exact.ex2).epsilon(0.01));
}

TEST_CASE("stationary density is the product Gaussian") {
    OUParams ou{{1.0, 0.0}, 0.5};
    double peak = 1.0 / (2.0 * 3.14159265358979323846 * 0.25);
    CHECK(stationary_density({1.0, 0.0}, ou) == doctest::Approx(peak).epsilon(1e-12));
    // Radial symmetry around mu.
    CHECK(stationary_density({1.3, 0.4}, ou) ==
          doctest::Approx(stationary_density({0.7, -0.4}, ou)).epsilon(1e-12));

    OUParams unit{{0.0, 0.0}, 1.0};
    CHECK(stationary_density({1.0, 0.0}, unit) ==
          doctest::Approx(std::exp(-0.5) / (2.0 * 3.14159265358979323846)).epsilon(1e-12));

    OUParams degenerate{{1.0, 0.0}, 0.0};
    CHECK_THROWS_AS(stationary_density({1.0, 0.0}, degenerate), std::domain_error);
}

TEST_CASE("stationary density integrates to one on a wide grid") {
    OUParams ou{{1.0, 0.0}, 0.5};
    double lo = -3.0, hi = 5.0;
    int n = 400;
    double step = (hi - lo) / n, total = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            total += stationary_density({lo + (i + 0.5) * step, lo + (j + 0.5) * step}, ou);
    CHECK(total * step * step == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("the Gaussian annihilates the stationary transport operator") {
    // Plug rho = N(mu, eta^2 I) into 0 = -div(b rho) + (eta^2/2) Lap rho with
    // b = (mu - h)/2, using closed-form derivatives on a 10x10 point cloud.
    OUParams ou{{1.0, 0.0}, 0.5};
    double eta2 = ou.eta * ou.eta;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            Vec2 h{ou.mu.x + (i - 4.5) * 0.35, ou.mu.y + (j - 4.5) * 0.35};
            double rho = stationary_density(h, ou);
            double gx = (ou.mu.x - h.x) / eta2;  // d/dx log rho
            double gy = (ou.mu.y - h.y) / eta2;
            double rho_x = rho * gx, rho_y = rho * gy;
            double rho_xx = rho * (gx * gx - 1.0 / eta2);
            double rho_yy = rho * (gy * gy - 1.0 / eta2);
            double div_brho = 0.5 * ((ou.mu.x - h.x) * rho_x - rho) +
                              0.5 * ((ou.mu.y - h.y) * rho_y - rho);
            double residual = -div_brho + 0.5 * eta2 * (rho_xx + rho_yy);
            CHECK(std::abs(residual) < 1e-8);
        }
    }
}

TEST_CASE("stationary start stays stationary") {
    OUParams ou{{1.0, 0.0}, 0.5};
    int n = 20000, steps = 500;
    double dt = 1e-2;
    CounterRng init(3, 0);
    double sx = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        GenericState s{1.0, stationary_sample(ou, init)};
        CounterRng rng(11, static_cast<uint64_t>(i));
        for (int k = 0; k < steps; ++k) {
            auto [zx, zy] = rng.next_normal_pair();
            s = step_state(s, 0.0, dt, ou, {zx, zy});
        }
        sx += s.h.x;
        sxx += s.h.x * s.h.x;
        syy += s.h.y * s.h.y;
    }
    double mean_x = sx / n;
    CHECK(std::abs(mean_x - ou.mu.x) < 4.0 * ou.eta / std::sqrt(double(n)));
    double var = sxx / n - mean_x * mean_x + syy / n;
    CHECK(var == doctest::Approx(2.0 * ou.eta * ou.eta).epsilon(0.05));
}

TEST_CASE("path sweep is deterministic and batching-independent") {
    OUParams ou{{1.0, 0.0}, 0.5};
    ChannelPathSpec spec;
    spec.n_paths = 64;
    spec.n_steps = 100;
    auto a = simulate_channel_paths(spec, ou, 5, 1);
    auto b = simulate_channel_paths(spec, ou, 5, 3);
    auto c = simulate_channel_paths(spec, ou, 6, 1);
    REQUIRE(a.size() == b.size());
    bool same = true, differs = false;
    for (size_t i = 0; i < a.size(); ++i) {
        same = same && a[i].h.x == b[i].h.x && a[i].h.y == b[i].h.y;
        differs = differs || a[i].h.x != c[i].h.x;
    }
    CHECK(same);
    CHECK(differs);
}

}  // TEST_SUITE
