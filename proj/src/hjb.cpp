#include "powermfg/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "powermfg/dynamics.hpp"
#include "powermfg/rng.hpp"

namespace powermfg {

namespace {

void check_slice_finite(const double* slice, const GridSpec& g, int it) {
    for (int ie = 0; ie < g.e.n; ++ie)
        for (int ix = 0; ix < g.x.n; ++ix)
            for (int iy = 0; iy < g.y.n; ++iy)
                if (!std::isfinite(slice[g.idx(ie, ix, iy)]))
                    throw NumericalError(
                        "value solve produced a non-finite entry at t index " +
                        std::to_string(it) + ", node (" + std::to_string(ie) + "," +
                        std::to_string(ix) + "," + std::to_string(iy) + ")");
}

// One-sided drift derivative in the drift direction; falls back to the
// interior side at a wall the drift points out of.
inline double upwind(const double* v, size_t i, size_t stride, int pos, int n, double b) {
    if (b >= 0.0)
        return pos + 1 < n ? v[i + stride] - v[i] : v[i] - v[i - stride];
    return pos > 0 ? v[i] - v[i - stride] : v[i + stride] - v[i];
}

}  // namespace

GridField solve_value(const GameParams& gp, const Efficiency& eff,
                      const InterferencePath& interference, const GridSpec& grid) {
    grid.validate();
    OUParams ou{gp.mu, gp.eta};
    double dt = grid.t.step();
    double bound = grid.max_stable_dt(ou, gp.p_max);
    if (dt > bound)
        throw ConfigError("value solve: dt = " + std::to_string(dt) +
                          " exceeds the stability budget " + std::to_string(bound) +
                          "; refine the time axis or coarsen space");

    GridField v(grid);
    double de = grid.e.step(), dx = grid.x.step(), dy = grid.y.step();
    double eta2 = gp.eta * gp.eta;

    for (int ie = 0; ie < grid.e.n; ++ie) {
        double q = gp.terminal_weight * grid.e.coord(ie);
        for (int ix = 0; ix < grid.x.n; ++ix)
            for (int iy = 0; iy < grid.y.n; ++iy)
                v.at(grid.t.n - 1, ie, ix, iy) = q;
    }
    check_slice_finite(v.slice(grid.t.n - 1), grid, grid.t.n - 1);

    size_t sx = static_cast<size_t>(grid.y.n);          // x-neighbor stride
    size_t se = static_cast<size_t>(grid.x.n) * grid.y.n;  // E-neighbor stride

    for (int it = grid.t.n - 2; it >= 0; --it) {
        const double* prev = v.slice(it + 1);  // later-time slice being read
        double* cur = v.slice(it);
        double inter = interference(grid.t.coord(it + 1));
        double denom = gp.sigma2 + inter;
        if (!(denom > 0.0) || !std::isfinite(denom))
            throw NumericalError("value solve: sigma2 + interference must be positive");

        for (int ie = 0; ie < grid.e.n; ++ie) {
            for (int ix = 0; ix < grid.x.n; ++ix) {
                double hx = grid.x.coord(ix);
                double bx = 0.5 * (gp.mu.x - hx);
                for (int iy = 0; iy < grid.y.n; ++iy) {
                    double hy = grid.y.coord(iy);
                    double by = 0.5 * (gp.mu.y - hy);
                    size_t i = grid.idx(ie, ix, iy);

                    double rhs = 0.0;
                    rhs += bx * upwind(prev, i, sx, ix, grid.x.n, bx) / dx;
                    rhs += by * upwind(prev, i, 1, iy, grid.y.n, by) / dy;
                    if (eta2 > 0.0) {
                        // Zero second derivative at the channel-box walls.
                        if (ix > 0 && ix + 1 < grid.x.n)
                            rhs += 0.5 * eta2 *
                                   (prev[i + sx] - 2.0 * prev[i] + prev[i - sx]) / (dx * dx);
                        if (iy > 0 && iy + 1 < grid.y.n)
                            rhs += 0.5 * eta2 *
                                   (prev[i + 1] - 2.0 * prev[i] + prev[i - 1]) / (dy * dy);
                    }
                    if (ie > 0 && gp.rate > 0.0) {
                        // An empty battery cannot transmit, so no reward term
                        // at ie == 0; elsewhere the battery derivative is the
                        // one-sided difference toward lower E. A zero rate
                        // means transmission only drains the battery: H = 0.
                        double v_e = (prev[i] - prev[i - se]) / de;
                        double c = (hx * hx + hy * hy) / denom;
                        rhs += eff.hamiltonian(c, v_e, gp.rate, gp.p_max).value;
                    }
                    cur[i] = prev[i] + dt * rhs;
                }
            }
        }
        check_slice_finite(cur, grid, it);
    }
    return v;
}

FeedbackPolicy extract_policy(const GridField& value, const GameParams& gp,
                              const Efficiency& eff,
                              const InterferencePath& interference) {
    const GridSpec& grid = value.grid;
    GridField v_e(grid);
    double de = grid.e.step();
    for (int it = 0; it < grid.t.n; ++it) {
        for (int ie = 1; ie < grid.e.n; ++ie)
            for (int ix = 0; ix < grid.x.n; ++ix)
                for (int iy = 0; iy < grid.y.n; ++iy)
                    v_e.at(it, ie, ix, iy) = std::max(
                        (value.at(it, ie, ix, iy) - value.at(it, ie - 1, ix, iy)) / de, 0.0);
        // ie == 0 stays 0: the empty-battery row never transmits.
    }
    return FeedbackPolicy(std::move(v_e), gp, eff, interference);
}

FeedbackPolicy::FeedbackPolicy(GridField v_e, GameParams gp, Efficiency eff,
                               InterferencePath base)
    : v_e_(std::move(v_e)), gp_(gp), eff_(std::move(eff)), base_(std::move(base)) {
    if (!base_) base_ = [](double) { return 0.0; };
}

double FeedbackPolicy::power(double t, double e, Vec2 h, double interference) const {
    if (e <= 0.0 || gp_.rate <= 0.0) return 0.0;
    double slope = v_e_.interp(t, e, h);
    double c = h.norm2() / (gp_.sigma2 + interference);
    return eff_.hamiltonian(c, slope, gp_.rate, gp_.p_max).p_star;
}

double FeedbackPolicy::power_at_node(int it, int ie, int ix, int iy,
                                     double interference) const {
    if (ie == 0 || gp_.rate <= 0.0) return 0.0;
    double hx = v_e_.grid.x.coord(ix);
    double hy = v_e_.grid.y.coord(iy);
    double c = (hx * hx + hy * hy) / (gp_.sigma2 + interference);
    return eff_.hamiltonian(c, v_e_.at(it, ie, ix, iy), gp_.rate, gp_.p_max).p_star;
}

GridField FeedbackPolicy::power_grid() const { return power_grid(base_); }

GridField FeedbackPolicy::power_grid(const InterferencePath& interference) const {
    GridField p(v_e_.grid);
    for (int it = 0; it < v_e_.grid.t.n; ++it) {
        double inter = interference(v_e_.grid.t.coord(it));
        for (int ie = 1; ie < v_e_.grid.e.n; ++ie)
            for (int ix = 0; ix < v_e_.grid.x.n; ++ix)
                for (int iy = 0; iy < v_e_.grid.y.n; ++iy)
                    p.at(it, ie, ix, iy) = power_at_node(it, ie, ix, iy, inter);
    }
    return p;
}

std::vector<OffProbabilityRow> off_probability(const Efficiency& eff,
                                               const GameParams& gp,
                                               const std::vector<double>& v_e_grid,
                                               int n_samples, uint64_t seed) {
    if (n_samples < 10000)
        throw std::invalid_argument(
            "off_probability: n_samples must be >= 10^4 for a usable estimate");
    if (!(gp.rate > 0.0))
        throw std::invalid_argument("off_probability: rate must be positive");
    for (double v : v_e_grid)
        if (v < 0.0) throw std::invalid_argument("off_probability: v_e must be >= 0");

    OUParams ou{gp.mu, gp.eta};
    std::vector<double> h4(n_samples);
    CounterRng rng(seed, 0);
    for (int s = 0; s < n_samples; ++s)
        h4[s] = stationary_sample(ou, rng).norm2();
    for (double& v : h4) v *= v;

    double sigma4 = gp.sigma2 * gp.sigma2;
    std::vector<OffProbabilityRow> rows;
    rows.reserve(v_e_grid.size());
    for (double v_e : v_e_grid) {
        OffProbabilityRow row;
        row.v_e = v_e;
        double bound_thr = 2.0 * v_e * sigma4 / (gp.rate * eff.max_ddf());
        int below = 0, off = 0;
        for (double h4s : h4) {
            if (h4s <= bound_thr) ++below;
            double theta = v_e * sigma4 / (gp.rate * h4s);
            if (eff.gamma_star(theta) == 0.0) ++off;
        }
        row.lower_bound = static_cast<double>(below) / n_samples;
        row.mc_estimate = static_cast<double>(off) / n_samples;
        row.std_error =
            std::sqrt(row.mc_estimate * (1.0 - row.mc_estimate) / n_samples);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace powermfg
