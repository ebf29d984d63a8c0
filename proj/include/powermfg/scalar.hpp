#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace powermfg {

// Root of fn on [lo, hi] with fn(lo), fn(hi) of opposite sign. Bisection with
// Newton steps whenever the derivative is available and the step stays inside
// the bracket.
inline double bracketed_root(const std::function<double(double)>& fn,
                             const std::function<double(double)>& dfn,
                             double lo, double hi, double tol = 1e-14) {
    double flo = fn(lo);
    double fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("bracketed_root: endpoints do not bracket a sign change");

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double fx = fn(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        double next = 0.5 * (lo + hi);
        if (dfn) {
            double d = dfn(x);
            if (d != 0.0) {
                double newton = x - fx / d;
                if (newton > lo && newton < hi) next = newton;
            }
        }
        if (std::abs(next - x) <= tol * (1.0 + std::abs(x))) return next;
        x = next;
    }
    return x;
}

// Maximizer of fn on [lo, hi] by golden-section search. Assumes fn is
// unimodal on the interval; callers bracket with a coarse scan first.
inline double golden_max(const std::function<double(double)>& fn,
                         double lo, double hi, double tol = 1e-12) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = fn(c), fd = fn(d);
    while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = fn(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace powermfg
