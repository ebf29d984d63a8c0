#include "powermfg/mfg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "powermfg/dynamics.hpp"

namespace powermfg {

namespace {

// B(z) = z / (exp(z) - 1), the exponential-flux weight.
double bernoulli(double z) {
    if (std::abs(z) < 1e-12) return 1.0 - 0.5 * z;
    if (z > 700.0) return 0.0;
    if (z < -700.0) return -z;
    return z / std::expm1(z);
}

// Face coefficients for one channel axis: flux across face i|i+1 is
// cl[i]*m[i] - cr[i]*m[i+1]. With eta = 0 this degenerates to plain upwind.
void face_coeffs(const Axis& ax, double mu, double eta2,
                 std::vector<double>& cl, std::vector<double>& cr) {
    cl.resize(ax.n - 1);
    cr.resize(ax.n - 1);
    double d = 0.5 * eta2;
    double dx = ax.step();
    for (int i = 0; i + 1 < ax.n; ++i) {
        double b = 0.5 * (mu - (ax.coord(i) + 0.5 * dx));
        if (d > 0.0) {
            double xi = b * dx / d;
            cl[i] = d / dx * bernoulli(-xi);
            cr[i] = d / dx * bernoulli(xi);
        } else {
            cl[i] = std::max(b, 0.0);
            cr[i] = std::max(-b, 0.0);
        }
    }
}

double slice_mass(const double* m, const GridSpec& g) {
    double total = 0.0;
    for (size_t i = 0; i < g.slice_size(); ++i) total += m[i];
    return total * g.cell_volume();
}

}  // namespace

std::vector<double> initial_density(const GridSpec& grid, const OUParams& ou, double e0) {
    grid.validate();
    if (e0 < grid.e.lo || e0 > grid.e.hi)
        throw ConfigError("initial_density: e0 outside the energy axis");
    std::vector<double> m(grid.slice_size(), 0.0);
    double de = grid.e.step();
    for (int ie = 0; ie < grid.e.n; ++ie) {
        double w = 1.0 - std::abs(grid.e.coord(ie) - e0) / de;
        if (w <= 0.0) continue;
        for (int ix = 0; ix < grid.x.n; ++ix)
            for (int iy = 0; iy < grid.y.n; ++iy)
                m[grid.idx(ie, ix, iy)] =
                    w * stationary_density({grid.x.coord(ix), grid.y.coord(iy)}, ou);
    }
    double mass = 0.0;
    for (double v : m) mass += v;
    mass *= grid.cell_volume();
    if (!(mass > 0.0)) throw NumericalError("initial_density: zero mass profile");
    for (double& v : m) v /= mass;
    return m;
}

GridField solve_fpk(const GridField& alpha, const std::vector<double>& m0,
                    const OUParams& ou) {
    const GridSpec& grid = alpha.grid;
    grid.validate();
    if (m0.size() != grid.slice_size())
        throw std::invalid_argument("solve_fpk: initial slice has the wrong size");

    double p_peak = 0.0;
    for (double p : alpha.data) p_peak = std::max(p_peak, p);
    double dt = grid.t.step();
    double bound = grid.max_stable_dt(ou, std::max(p_peak, 1e-300));
    if (dt > bound)
        throw ConfigError("density solve: dt = " + std::to_string(dt) +
                          " exceeds the stability budget " + std::to_string(bound));

    double eta2 = ou.eta * ou.eta;
    std::vector<double> clx, crx, cly, cry;
    face_coeffs(grid.x, ou.mu.x, eta2, clx, crx);
    face_coeffs(grid.y, ou.mu.y, eta2, cly, cry);

    GridField m(grid);
    std::copy(m0.begin(), m0.end(), m.slice(0));
    double de = grid.e.step(), dx = grid.x.step(), dy = grid.y.step();
    size_t sx = static_cast<size_t>(grid.y.n);
    size_t se = static_cast<size_t>(grid.x.n) * grid.y.n;

    for (int it = 0; it + 1 < grid.t.n; ++it) {
        const double* cur = m.slice(it);
        const double* a = alpha.slice(it);
        double* next = m.slice(it + 1);

        for (int ie = 0; ie < grid.e.n; ++ie) {
            for (int ix = 0; ix < grid.x.n; ++ix) {
                for (int iy = 0; iy < grid.y.n; ++iy) {
                    size_t i = grid.idx(ie, ix, iy);
                    double div = 0.0;
                    // Battery drain: mass flows toward lower E, faces carry
                    // the donor cell's power. Outer faces are walls.
                    if (ie + 1 < grid.e.n) div += a[i + se] * cur[i + se] / de;
                    if (ie > 0) div -= a[i] * cur[i] / de;
                    // Channel drift + diffusion, exponential fluxes.
                    double fx_hi = ix + 1 < grid.x.n
                                       ? clx[ix] * cur[i] - crx[ix] * cur[i + sx]
                                       : 0.0;
                    double fx_lo = ix > 0
                                       ? clx[ix - 1] * cur[i - sx] - crx[ix - 1] * cur[i]
                                       : 0.0;
                    double fy_hi = iy + 1 < grid.y.n
                                       ? cly[iy] * cur[i] - cry[iy] * cur[i + 1]
                                       : 0.0;
                    double fy_lo = iy > 0
                                       ? cly[iy - 1] * cur[i - 1] - cry[iy - 1] * cur[i]
                                       : 0.0;
                    div -= (fx_hi - fx_lo) / dx + (fy_hi - fy_lo) / dy;
                    next[i] = cur[i] + dt * div;
                }
            }
        }

        double clipped = 0.0;
        for (size_t i = 0; i < grid.slice_size(); ++i) {
            if (next[i] < 0.0) {
                if (next[i] < -1e-12)
                    throw NumericalError(
                        "density solve: negative density " + std::to_string(next[i]) +
                        " at t index " + std::to_string(it + 1));
                clipped -= next[i];
                next[i] = 0.0;
            }
        }
        double mass = slice_mass(next, grid);
        if (std::abs(mass - 1.0) > 1e-6)
            throw NumericalError("density solve: mass drifted to " + std::to_string(mass) +
                                 " at t index " + std::to_string(it + 1));
        if (clipped > 0.0)
            for (size_t i = 0; i < grid.slice_size(); ++i) next[i] /= mass;
    }
    return m;
}

GridField solve_fpk(const FeedbackPolicy& policy, const std::vector<double>& m0) {
    OUParams ou{policy.params().mu, policy.params().eta};
    return solve_fpk(policy.power_grid(), m0, ou);
}

std::vector<double> mean_interference(const GridField& m, const GridField& alpha) {
    const GridSpec& grid = m.grid;
    double vol = grid.cell_volume();
    std::vector<double> i_hat(grid.t.n, 0.0);
    for (int it = 0; it < grid.t.n; ++it) {
        const double* ms = m.slice(it);
        const double* as = alpha.slice(it);
        double acc = 0.0;
        for (int ie = 0; ie < grid.e.n; ++ie)
            for (int ix = 0; ix < grid.x.n; ++ix) {
                double hx = grid.x.coord(ix);
                for (int iy = 0; iy < grid.y.n; ++iy) {
                    double hy = grid.y.coord(iy);
                    size_t i = grid.idx(ie, ix, iy);
                    acc += (hx * hx + hy * hy) * as[i] * ms[i];
                }
            }
        i_hat[it] = acc * vol;
    }
    return i_hat;
}

namespace {

InterferencePath path_from_nodes(const GridSpec& grid, std::vector<double> nodes) {
    Axis t = grid.t;
    return [t, nodes = std::move(nodes)](double tv) {
        double u = (tv - t.lo) / t.step();
        if (u <= 0.0) return nodes.front();
        if (u >= t.n - 1) return nodes.back();
        int i = static_cast<int>(u);
        double w = u - i;
        return (1.0 - w) * nodes[i] + w * nodes[i + 1];
    };
}

}  // namespace

MfgSolution solve_mfg(const GameParams& gp, const Efficiency& eff,
                      const GridSpec& grid, const std::vector<double>& m0,
                      const MfgConfig& cfg) {
    grid.validate();
    if (!(cfg.damping > 0.0) || cfg.damping > 1.0)
        throw ConfigError("solve_mfg: damping must lie in (0, 1]");
    if (!(cfg.tol > 0.0) || cfg.max_iter < 1)
        throw ConfigError("solve_mfg: bad tolerance or iteration cap");

    OUParams ou{gp.mu, gp.eta};
    double mean_gain = gp.mu.norm2() + 2.0 * gp.eta * gp.eta;
    double cap = gp.p_max * mean_gain;  // everyone at full power
    double beta = eff.beta_star();
    // Symmetric large-population equilibrium interference under the mean
    // channel; has no finite value once beta_star >= 1, so fall back to the
    // full-power cap. With no reward nobody transmits and zero is already
    // the fixed point.
    double guess = beta < 1.0 ? std::min(gp.sigma2 * beta / (1.0 - beta), cap) : cap;
    if (gp.rate <= 0.0) guess = 0.0;
    std::vector<double> i_hat(grid.t.n, guess);

    GridField value(grid), density(grid), powers(grid);
    FeedbackPolicy policy(GridField(grid), gp, eff, nullptr);
    double residual = 0.0;
    int iter = 0;
    bool converged = false;
    std::vector<double> history;

    while (iter < cfg.max_iter) {
        ++iter;
        InterferencePath path = path_from_nodes(grid, i_hat);
        value = solve_value(gp, eff, path, grid);
        policy = extract_policy(value, gp, eff, path);
        powers = policy.power_grid(path);
        density = solve_fpk(powers, m0, ou);
        std::vector<double> i_new = mean_interference(density, powers);

        residual = 0.0;
        for (int n = 0; n < grid.t.n; ++n)
            residual = std::max(residual, std::abs(i_new[n] - i_hat[n]));
        history.push_back(residual);
        if (residual < cfg.tol) {
            converged = true;
            break;
        }
        if (iter == cfg.max_iter) break;  // keep the fields paired with i_hat
        for (int n = 0; n < grid.t.n; ++n)
            i_hat[n] = (1.0 - cfg.damping) * i_hat[n] + cfg.damping * i_new[n];
    }

    MfgSolution sol{std::move(value),  std::move(density),  std::move(powers),
                    std::move(i_hat),  std::move(history),  std::move(policy),
                    iter,              residual,            converged};
    return sol;
}

ConsistencyReport consistency_check(const MfgSolution& sol,
                                    const std::vector<double>& m0) {
    const GameParams& gp = sol.policy.params();
    OUParams ou{gp.mu, gp.eta};
    GridField density = solve_fpk(sol.powers, m0, ou);
    std::vector<double> i_new = mean_interference(density, sol.powers);

    ConsistencyReport rep;
    for (size_t n = 0; n < i_new.size(); ++n)
        rep.sup_interference_dev =
            std::max(rep.sup_interference_dev, std::abs(i_new[n] - sol.i_hat[n]));
    const GridSpec& grid = density.grid;
    for (int it = 0; it < grid.t.n; ++it) {
        double mass = 0.0;
        const double* ms = density.slice(it);
        for (size_t i = 0; i < grid.slice_size(); ++i) mass += ms[i];
        mass *= grid.cell_volume();
        rep.max_mass_error = std::max(rep.max_mass_error, std::abs(mass - 1.0));
    }

    // Discrete-operator residuals: re-apply both sweeps under the stored
    // interference path and measure how far the stored fields sit from being
    // exact fixed points of the update stencils, in per-unit-time units.
    GridField value = solve_value(gp, sol.policy.efficiency(),
                                  path_from_nodes(grid, sol.i_hat), grid);
    double dt = grid.t.step();
    double dv = 0.0, dm = 0.0;
    for (size_t i = 0; i < value.data.size(); ++i) {
        dv = std::max(dv, std::abs(value.data[i] - sol.value.data[i]));
        dm = std::max(dm, std::abs(density.data[i] - sol.density.data[i]));
    }
    rep.max_value_residual = dv / dt;
    rep.max_density_residual = dm / dt;
    return rep;
}

}  // namespace powermfg
