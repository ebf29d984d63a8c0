#pragma once

#include <cstdint>
#include <cmath>
#include <utility>

namespace powermfg {

// Counter-based generator: draw n of stream s under seed q is a fixed mixing
// of (q, s, n), so streams are independent, any draw is O(1) addressable, and
// identical seeds reproduce identical bytes regardless of threading. The
// mixer is the splitmix64 finalizer.
class CounterRng {
public:
    CounterRng(uint64_t seed, uint64_t stream)
        : key_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(stream + 0xbf58476d1ce4e5b9ULL))) {}

    uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    // Uniform on (0, 1]; never 0, so log() below is safe.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal pair via Box-Muller.
    std::pair<double, double> next_normal_pair() {
        double u1 = next_unit();
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double phi = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        auto [z0, z1] = next_normal_pair();
        spare_ = z1;
        have_spare_ = true;
        return z0;
    }

private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t key_;
    uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace powermfg
