#include "powermfg/grid.hpp"

#include <algorithm>
#include <cmath>

namespace powermfg {

GridSpec GridSpec::centered(const GameParams& gp, double e_max, int n_e,
                            int n_x, int n_y, int n_t, double width) {
    if (!(gp.eta > 0.0))
        throw ConfigError("grid: centered() needs eta > 0; pass explicit axes otherwise");
    if (!(width > 0.0)) throw ConfigError("grid: width must be positive");
    GridSpec g;
    g.t = {gp.t0, gp.t1, n_t};
    g.e = {0.0, e_max, n_e};
    g.x = {gp.mu.x - width * gp.eta, gp.mu.x + width * gp.eta, n_x};
    g.y = {gp.mu.y - width * gp.eta, gp.mu.y + width * gp.eta, n_y};
    g.validate();
    return g;
}

void GridSpec::validate() const {
    if (t.n < 2) throw ConfigError("grid: need at least 2 time nodes");
    if (e.n < 8 || x.n < 8 || y.n < 8)
        throw ConfigError("grid: need at least 8 nodes per space axis");
    if (!(t.hi > t.lo)) throw ConfigError("grid: empty time horizon");
    if (e.lo != 0.0) throw ConfigError("grid: energy axis must start at 0");
    if (!(e.hi > 0.0)) throw ConfigError("grid: e_max must be positive");
    if (!(x.hi > x.lo) || !(y.hi > y.lo))
        throw ConfigError("grid: channel box must have positive extent");
}

double GridSpec::max_stable_dt(const OUParams& ou, double p_max) const {
    // Sums the worst-case outflow rates of the explicit stencils: battery
    // advection at p_max, channel drift at the box edges, and the diffusion
    // stencil. One budget covers both the value and the density sweep.
    double drift_x = 0.5 * std::max(std::abs(ou.mu.x - x.lo), std::abs(ou.mu.x - x.hi));
    double drift_y = 0.5 * std::max(std::abs(ou.mu.y - y.lo), std::abs(ou.mu.y - y.hi));
    double eta2 = ou.eta * ou.eta;
    double rate = p_max / e.step() + drift_x / x.step() + drift_y / y.step() +
                  eta2 * (1.0 / (x.step() * x.step()) + 1.0 / (y.step() * y.step()));
    return 0.9 / rate;
}

namespace {

// Clamped linear interpolation weights along one axis.
struct AxisWeight {
    int i0;
    double w1;  // weight of node i0+1
};

AxisWeight locate(const Axis& ax, double v) {
    double u = (v - ax.lo) / ax.step();
    if (u <= 0.0) return {0, 0.0};
    if (u >= ax.n - 1) return {ax.n - 2, 1.0};
    int i = static_cast<int>(u);
    return {i, u - i};
}

}  // namespace

double GridField::interp_slice(int it, double e_val, Vec2 h) const {
    AxisWeight we = locate(grid.e, e_val);
    AxisWeight wx = locate(grid.x, h.x);
    AxisWeight wy = locate(grid.y, h.y);
    double acc = 0.0;
    for (int de = 0; de < 2; ++de) {
        double fe = de ? we.w1 : 1.0 - we.w1;
        if (fe == 0.0) continue;
        for (int dx = 0; dx < 2; ++dx) {
            double fx = dx ? wx.w1 : 1.0 - wx.w1;
            if (fx == 0.0) continue;
            for (int dy = 0; dy < 2; ++dy) {
                double fy = dy ? wy.w1 : 1.0 - wy.w1;
                if (fy == 0.0) continue;
                acc += fe * fx * fy * at(it, we.i0 + de, wx.i0 + dx, wy.i0 + dy);
            }
        }
    }
    return acc;
}

double GridField::interp(double t_val, double e_val, Vec2 h) const {
    AxisWeight wt = locate(grid.t, t_val);
    double v0 = interp_slice(wt.i0, e_val, h);
    if (wt.w1 == 0.0) return v0;
    double v1 = interp_slice(wt.i0 + 1, e_val, h);
    return (1.0 - wt.w1) * v0 + wt.w1 * v1;
}

}  // namespace powermfg
