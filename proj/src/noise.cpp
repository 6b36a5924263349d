#include "acldp/noise.hpp"

#include <cmath>

#include "acldp/errors.hpp"

namespace acldp {

NoiseModel NoiseModel::constant(double g0)
{
    NoiseModel m;
    m.kind = NoiseKind::constant;
    m.g0 = g0;
    m.validate();
    return m;
}

NoiseModel NoiseModel::smooth_bounded_below(double g0, double c)
{
    NoiseModel m;
    m.kind = NoiseKind::smooth_bounded_below;
    m.g0 = g0;
    m.c = c;
    m.validate();
    return m;
}

double NoiseModel::value(double, double, double theta) const
{
    if (kind == NoiseKind::constant)
        return g0;
    double const t2 = theta * theta;
    return g0 + c * t2 / (1.0 + t2);
}

double NoiseModel::slope(double, double, double theta) const
{
    if (kind == NoiseKind::constant)
        return 0.0;
    double const q = 1.0 + theta * theta;
    return 2.0 * c * theta / (q * q);
}

double NoiseModel::lipschitz() const
{
    if (kind == NoiseKind::constant)
        return 0.0;
    return 9.0 * c / (8.0 * std::sqrt(3.0));
}

void NoiseModel::validate() const
{
    if (!(g0 > 0.0) || !std::isfinite(g0))
        throw ConfigError("noise.g0 must be positive (the intensity needs a floor g0 > 0)");
    if (!(c >= 0.0) || !std::isfinite(c))
        throw ConfigError("noise.c must be nonnegative");
    if (kind == NoiseKind::constant && c != 0.0)
        throw ConfigError("noise.c is only meaningful for noise.kind = smooth_bounded_below");
}

NoiseKind parse_noise_kind(std::string const& name)
{
    if (name == "constant")
        return NoiseKind::constant;
    if (name == "smooth_bounded_below")
        return NoiseKind::smooth_bounded_below;
    throw ConfigError("noise.kind must be 'constant' or 'smooth_bounded_below', got '" + name + "'");
}

std::string noise_kind_name(NoiseKind kind)
{
    return kind == NoiseKind::constant ? "constant" : "smooth_bounded_below";
}

}  // namespace acldp
