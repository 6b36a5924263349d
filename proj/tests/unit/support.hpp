#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "acldp/spectral.hpp"

namespace testing_support {

// Field with independent N(0, scale / k^decay) coefficients on modes 1..top.
inline acldp::Field random_band_limited(acldp::Domain const& d, std::mt19937_64& rng, int top,
                                        double scale = 1.0, double decay = 1.0)
{
    std::normal_distribution<double> normal;
    std::vector<double> c(d.modes(), 0.0);
    for (int k = 1; k <= top && k <= d.modes(); ++k)
        c[k - 1] = scale * normal(rng) / std::pow(k, decay);
    return acldp::Field{d.to_grid(c), acldp::Boundary::zero_dirichlet};
}

inline double max_abs_diff(std::vector<double> const& a, std::vector<double> const& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(std::vector<double> const& a)
{
    double m = 0.0;
    for (double v : a)
        m = std::max(m, std::abs(v));
    return m;
}

// Composite Simpson on [a, b] with an even number of panels.
template <class F>
double simpson(F f, double a, double b, int panels)
{
    if (panels % 2)
        ++panels;
    double const h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i)
        s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace testing_support
