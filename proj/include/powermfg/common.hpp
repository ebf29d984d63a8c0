#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace powermfg {

inline constexpr const char* kVersion = "0.1.0";

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    double norm2() const { return x * x + y * y; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

// Transmitter state: remaining battery energy (J) and complex channel gain
// stored as (re, im).
struct GenericState {
    double energy = 0.0;
    Vec2 h;
};

// Scenario constants shared across the modules.
struct GameParams {
    int k = 8;                     // number of transmitters
    double rate = 1.0;             // R, throughput scale of the efficiency term
    double sigma2 = 1.0;           // receiver noise power
    Vec2 mu{1.0, 0.0};             // channel relaxation target
    double eta = 0.5;              // channel volatility
    double p_max = 2.0;            // transmit power cap (W)
    double t0 = 0.0;               // horizon start (s)
    double t1 = 1.0;               // horizon end (s)
    double terminal_weight = 0.0;  // terminal payoff q(X) = terminal_weight * E
};

// Interference seen at the receiver as a function of time. The single-player
// problem passes t -> 0; the mean-field solver passes its current guess.
using InterferencePath = std::function<double(double)>;

// Bad or inconsistent run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Solver blew up or produced non-finite values (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace powermfg
