#include <stdexcept>
#include "powermfg/static_game.hpp"

#include <cmath>
#include <limits>

#include "powermfg/scalar.hpp"

namespace powermfg {

namespace {

void check_profile(const StaticProfile& prof, int i) {
    if (prof.powers.size() != prof.gains.size())
        throw std::invalid_argument("static game: powers/gains size mismatch");
    if (i < 0 || static_cast<size_t>(i) >= prof.powers.size())
        throw std::out_of_range("static game: player index out of range");
    if (!(prof.sigma2 > 0.0))
        throw std::invalid_argument("static game: sigma2 must be positive");
}

}  // namespace

double sinr(const StaticProfile& prof, int i) {
    check_profile(prof, i);
    double interference = 0.0;
    for (size_t j = 0; j < prof.powers.size(); ++j)
        if (static_cast<int>(j) != i) interference += prof.powers[j] * prof.gains[j];
    return prof.powers[i] * prof.gains[i] / (prof.sigma2 + interference);
}

double utility(const StaticProfile& prof, int i, const Efficiency& eff) {
    check_profile(prof, i);
    if (prof.powers[i] == 0.0) return 0.0;
    return prof.rate * eff.f(sinr(prof, i)) / prof.powers[i];
}

NeResult static_ne(const std::vector<double>& gains, double sigma2,
                   const Efficiency& eff, double p_max) {
    if (gains.empty())
        throw std::invalid_argument("static_ne: need at least one player");
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("static_ne: sigma2 must be positive");
    for (double gi : gains)
        if (!(gi > 0.0))
            throw std::invalid_argument("static_ne: channel gains must be positive");

    int k = static_cast<int>(gains.size());
    double b = eff.beta_star();
    double load = (k - 1) * b;
    if (load >= 1.0)
        throw std::domain_error("static_ne: (k-1)*beta_star >= 1, no interior equilibrium");

    NeResult res;
    res.powers.resize(gains.size());
    double scale = sigma2 * b / (1.0 - load);
    for (size_t i = 0; i < gains.size(); ++i) {
        res.powers[i] = scale / gains[i];
        if (res.powers[i] > p_max) res.exceeds_p_max = true;
    }
    return res;
}

double best_response(const StaticProfile& prof, int i, const Efficiency& eff,
                     double p_max, int grid_size) {
    check_profile(prof, i);
    if (grid_size < 3)
        throw std::invalid_argument("best_response: grid_size too small");
    if (!(p_max > 0.0))
        throw std::invalid_argument("best_response: p_max must be positive");

    double other = 0.0;
    for (size_t j = 0; j < prof.powers.size(); ++j)
        if (static_cast<int>(j) != i) other += prof.powers[j] * prof.gains[j];
    double denom = prof.sigma2 + other;
    auto value = [&](double p) {
        return p > 0.0 ? prof.rate * eff.f(p * prof.gains[i] / denom) / p : 0.0;
    };

    int best = 0;
    double best_val = 0.0;
    for (int n = 1; n <= grid_size; ++n) {
        double p = p_max * n / grid_size;
        double v = value(p);
        if (v > best_val) {
            best_val = v;
            best = n;
        }
    }
    if (best == 0) return 0.0;
    double lo = p_max * std::max(best - 1, 0) / grid_size;
    double hi = p_max * std::min(best + 1, grid_size) / grid_size;
    return golden_max(value, lo, hi);
}

}  // namespace powermfg
