#pragma once

#include <cstddef>
#include <vector>

#include "powermfg/common.hpp"
#include "powermfg/dynamics.hpp"

namespace powermfg {

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    int n = 2;

    double step() const { return (hi - lo) / (n - 1); }
    double coord(int i) const { return lo + i * step(); }
};

// Tensor lattice over (t, E, h_x, h_y). Space axes double as finite-volume
// cell centers for the density solver, with cell width equal to the node
// spacing and no-flux walls half a cell outside the first/last node.
struct GridSpec {
    Axis t;  // t.n >= 2
    Axis e;  // e.lo = 0
    Axis x;
    Axis y;

    // Space box centered on the channel's stationary law: mu +- width*eta.
    static GridSpec centered(const GameParams& gp, double e_max, int n_e,
                             int n_x, int n_y, int n_t, double width = 4.0);

    void validate() const;  // throws ConfigError

    size_t slice_size() const { return static_cast<size_t>(e.n) * x.n * y.n; }
    size_t node_count() const { return slice_size() * t.n; }
    size_t idx(int ie, int ix, int iy) const {
        return (static_cast<size_t>(ie) * x.n + ix) * y.n + iy;
    }
    double cell_volume() const { return e.step() * x.step() * y.step(); }

    // Largest explicit time step the advection/diffusion stencils tolerate
    // (0.9 safety factor already applied). p_max bounds the battery drain.
    double max_stable_dt(const OUParams& ou, double p_max) const;
};

// Scalar field on the full (t, E, x, y) lattice.
struct GridField {
    GridSpec grid;
    std::vector<double> data;

    explicit GridField(const GridSpec& g)
        : grid(g), data(g.node_count(), 0.0) {}

    double& at(int it, int ie, int ix, int iy) {
        return data[static_cast<size_t>(it) * grid.slice_size() + grid.idx(ie, ix, iy)];
    }
    double at(int it, int ie, int ix, int iy) const {
        return data[static_cast<size_t>(it) * grid.slice_size() + grid.idx(ie, ix, iy)];
    }
    double* slice(int it) { return data.data() + static_cast<size_t>(it) * grid.slice_size(); }
    const double* slice(int it) const {
        return data.data() + static_cast<size_t>(it) * grid.slice_size();
    }

    // Multilinear interpolation in (E, x, y) at a fixed time index, with
    // queries clamped to the box.
    double interp_slice(int it, double e_val, Vec2 h) const;

    // Linear in t between the two neighboring slices.
    double interp(double t_val, double e_val, Vec2 h) const;
};

}  // namespace powermfg
