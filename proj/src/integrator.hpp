#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "acldp/spectral.hpp"

namespace acldp::detail {

// (1 - exp(-a dt)) / a, continuous at a = 0.
inline double phi1(double a, double dt)
{
    double const x = a * dt;
    return std::abs(x) < 1e-8 ? dt * (1.0 - 0.5 * x) : -std::expm1(-x) / a;
}

// Standard deviation of int_0^dt exp(-a s) dW(s): sqrt((1 - exp(-2 a dt)) / (2 a)).
inline double ou_factor(double a, double dt) { return std::sqrt(phi1(2.0 * a, dt)); }

struct ExpEuler
{
    std::vector<double> decay;
    std::vector<double> weight;

    ExpEuler(Domain const& d, double dt, double damping = 0.0)
    {
        int const m = d.modes();
        decay.resize(m);
        weight.resize(m);
        for (int k = 0; k < m; ++k)
        {
            double const a = d.eigenvalues()[k] + damping;
            decay[k] = std::exp(-a * dt);
            weight[k] = phi1(a, dt);
        }
    }

    void step(std::span<double> c, std::span<const double> forcing) const
    {
        for (std::size_t k = 0; k < c.size(); ++k)
            c[k] = decay[k] * c[k] + weight[k] * forcing[k];
    }
};

inline double sup_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

}  // namespace acldp::detail
