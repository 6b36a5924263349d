#pragma once

// Noise intensity g(t, xi, theta), time-homogeneous in both families:
//
//   constant:             g = g0
//   smooth_bounded_below: g = g0 + c theta^2 / (1 + theta^2)
//
// Both have inf g = g0; the second has Lipschitz constant 9c / (8 sqrt 3).

#include <string>

namespace acldp {

enum class NoiseKind
{
    constant,
    smooth_bounded_below,
};

struct NoiseModel
{
    NoiseKind kind = NoiseKind::constant;
    double g0 = 1.0;
    double c = 0.0;

    static NoiseModel constant(double g0);
    static NoiseModel smooth_bounded_below(double g0, double c);

    double value(double t, double xi, double theta) const;
    // d g / d theta
    double slope(double t, double xi, double theta) const;
    double lipschitz() const;
    // sup |g(t, xi, 0)|
    double value_at_zero() const { return g0; }

    // Throws ConfigError unless g0 > 0 and c >= 0.
    void validate() const;
};

NoiseKind parse_noise_kind(std::string const& name);
std::string noise_kind_name(NoiseKind kind);

}  // namespace acldp
