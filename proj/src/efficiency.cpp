#include "powermfg/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "powermfg/scalar.hpp"

namespace powermfg {

namespace {

void check_domain(double x) {
    if (x < 0.0 || !std::isfinite(x))
        throw std::domain_error("efficiency: SINR argument must be finite and >= 0");
}

}  // namespace

Efficiency Efficiency::exponential_ratio(double a) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::invalid_argument("exponential_ratio: parameter a must be positive");
    Efficiency e;
    e.family_ = EfficiencyFamily::ExponentialRatio;
    e.a_ = a;
    e.inflection_ = 0.5 * a;  // f'' changes sign where a/x = 2
    e.finalize();
    return e;
}

Efficiency Efficiency::cumulative_sigmoid(int m) {
    // m = 1 gives f'(0) = 1 and a globally concave f, so the ratio f(x)/x has
    // no interior maximizer; reject it along with nonsense values.
    if (m < 2)
        throw std::invalid_argument("cumulative_sigmoid: m must be an integer >= 2");
    Efficiency e;
    e.family_ = EfficiencyFamily::CumulativeSigmoid;
    e.m_ = m;
    e.inflection_ = std::log(static_cast<double>(m));  // m*exp(-x) = 1
    e.finalize();
    return e;
}

double Efficiency::f(double x) const {
    check_domain(x);
    if (x == 0.0) return 0.0;
    if (family_ == EfficiencyFamily::ExponentialRatio)
        return std::exp(-a_ / x);
    double s = -std::expm1(-x);  // 1 - exp(-x), accurate near 0
    return std::pow(s, m_);
}

double Efficiency::df(double x) const {
    check_domain(x);
    if (x == 0.0) return 0.0;
    if (family_ == EfficiencyFamily::ExponentialRatio)
        return a_ / (x * x) * std::exp(-a_ / x);
    double s = -std::expm1(-x);
    return m_ * std::pow(s, m_ - 1) * std::exp(-x);
}

double Efficiency::ddf(double x) const {
    check_domain(x);
    if (family_ == EfficiencyFamily::ExponentialRatio) {
        if (x == 0.0) return 0.0;
        double r = a_ / x;
        return r / (x * x) * (r - 2.0) * std::exp(-r);
    }
    if (x == 0.0) return m_ == 2 ? 2.0 : 0.0;
    double s = -std::expm1(-x);
    double ex = std::exp(-x);
    return m_ * ex * std::pow(s, m_ - 2) * ((m_ - 1) * ex - s);
}

double Efficiency::g(double x) const {
    check_domain(x);
    if (x == 0.0) return 0.0;
    return (x * df(x) - f(x)) / (x * x);
}

void Efficiency::finalize() {
    // beta_star: x f'(x) - f(x) is positive just above the inflection point
    // (f(x)/x still rising) and eventually negative; bracket by doubling.
    auto excess = [this](double x) { return x * df(x) - f(x); };
    auto dexcess = [this](double x) { return x * ddf(x); };
    double lo = inflection_ > 0.0 ? inflection_ : 0.5;
    int guard = 0;
    while (excess(lo) <= 0.0) {
        // Walk right until the excess turns positive; gives up on shapes where
        // the ratio f(x)/x never rises, which the factories already exclude.
        lo *= 1.5;
        if (++guard > 80)
            throw std::invalid_argument("efficiency: f(x)/x has no interior maximizer");
    }
    double hi = 2.0 * lo;
    while (excess(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 80)
            throw std::invalid_argument("efficiency: f(x)/x has no interior maximizer");
    }
    beta_star_ = bracketed_root([&](double x) { return excess(x); },
                                [&](double x) { return dexcess(x); }, lo, hi);

    // theta_max = sup g on (0, beta_star): coarse scan to localize, then
    // golden-section refinement.
    int best = 1;
    double best_val = -1.0;
    constexpr int kScan = 512;
    for (int i = 1; i < kScan; ++i) {
        double x = beta_star_ * i / kScan;
        double v = g(x);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    double a = beta_star_ * std::max(best - 1, 1) / kScan;
    double b = beta_star_ * std::min(best + 1, kScan) / kScan;
    theta_max_arg_ = golden_max([&](double x) { return g(x); }, a, b);
    theta_max_ = g(theta_max_arg_);

    // When f''(0) > 0 (cumulative m = 2) g decreases from its limit f''(0)/2
    // at the origin, so the supremum sits on the boundary, not at a scan point.
    double origin_limit = 0.5 * ddf(0.0);
    if (origin_limit > theta_max_) {
        theta_max_ = origin_limit;
        theta_max_arg_ = 0.0;
    }

    // sup f'': for the exponential family f'' > 0 only below the inflection
    // point and vanishes at 0; for the cumulative family the supremum can sit
    // at x = 0 (m = 2), so scan the closed interval.
    best = 0;
    best_val = ddf(0.0);
    for (int i = 1; i <= kScan; ++i) {
        double x = inflection_ * i / kScan;
        double v = ddf(x);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    if (best == 0) {
        max_ddf_arg_ = 0.0;
        max_ddf_ = best_val;
    } else {
        a = inflection_ * std::max(best - 1, 0) / kScan;
        b = inflection_ * std::min(best + 1, kScan) / kScan;
        max_ddf_arg_ = golden_max([&](double x) { return ddf(x); }, a, b);
        max_ddf_ = ddf(max_ddf_arg_);
    }
}

double Efficiency::gamma_star(double theta) const {
    if (theta < 0.0 || !std::isfinite(theta))
        throw std::domain_error("gamma_star: theta must be finite and >= 0");
    if (theta >= theta_max_) return 0.0;
    if (theta == 0.0) return beta_star_;
    // The decreasing branch of g lives on [argmax g, beta_star]:
    // g(argmax) = theta_max > theta and g(beta_star) = 0 < theta.
    auto fn = [&](double x) { return g(x) - theta; };
    auto dfn = [&](double x) {
        return (x * x * ddf(x) - 2.0 * x * df(x) + 2.0 * f(x)) / (x * x * x);
    };
    double lo = theta_max_arg_;
    if (lo <= 0.0) {
        // Supremum at the origin: walk the left endpoint down until g clears
        // theta. Terminates because g(x) -> theta_max > theta as x -> 0.
        lo = 0.5 * beta_star_;
        int guard = 0;
        while (g(lo) <= theta) {
            lo *= 0.5;
            if (++guard > 200) return lo;
        }
    }
    return bracketed_root(fn, dfn, lo, beta_star_);
}

HamiltonianResult Efficiency::hamiltonian(double c, double v_e, double rate,
                                          double p_max) const {
    if (!(c >= 0.0) || !std::isfinite(c))
        throw std::domain_error("hamiltonian: c must be finite and >= 0");
    if (!(rate > 0.0) || !(p_max > 0.0))
        throw std::domain_error("hamiltonian: rate and p_max must be positive");
    double v = std::max(v_e, 0.0);  // battery value is never improved by charging
    if (c == 0.0) return {};        // dead channel: transmitting is pure loss

    double theta = v / (rate * c * c);
    if (theta >= theta_max_) return {};
    double p = std::min(gamma_star(theta) / c, p_max);
    double value = rate * f(c * p) / p - p * v;
    // The cap can land below the unprofitable low-power branch; silence wins.
    if (!(value > 0.0)) return {};
    return {value, p};
}

ExistenceReport Efficiency::existence_check(const std::vector<double>& theta_grid) const {
    ExistenceReport rep;
    rep.thetas.reserve(theta_grid.size());
    rep.margins.reserve(theta_grid.size());
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (double theta : theta_grid) {
        if (theta < 0.0 || theta >= theta_max_)
            throw std::domain_error("existence_check: theta grid must lie in [0, theta_max)");
        double gamma0 = gamma_star(theta);
        double margin = std::abs(2.0 * theta - ddf(gamma0));
        rep.thetas.push_back(theta);
        rep.margins.push_back(margin);
        rep.min_margin = std::min(rep.min_margin, margin);
    }
    rep.degenerate = rep.min_margin < 1e-8;
    return rep;
}

}  // namespace powermfg
