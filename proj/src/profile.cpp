#include "acldp/profile.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "acldp/energy.hpp"
#include "acldp/errors.hpp"

namespace acldp {

namespace {

using boost::math::quadrature::gauss_kronrod;

// int_0^1 du / sqrt((1-u^2)^2/2 + e) after w = 1 - u = a sinh(s),
// a = sqrt(e/2), which flattens the near-singular peak at u = 1.
double half_transit(double e, double tol)
{
    double const a = std::sqrt(0.5 * e);
    double const s_max = std::asinh(1.0 / a);
    auto integrand = [a, e](double s) {
        double const w = a * std::sinh(s);
        double const q = w * (2.0 - w);
        return a * std::cosh(s) / std::sqrt(0.5 * q * q + e);
    };
    double err = 0.0;
    double const v = gauss_kronrod<double, 31>::integrate(integrand, 0.0, s_max, 25, tol, &err);
    if (!std::isfinite(v) || err > 1e3 * tol * std::abs(v))
    {
        std::ostringstream os;
        os << "transit integral did not converge: e=" << e << " value=" << v
           << " error estimate=" << err;
        throw NumericalError(os.str());
    }
    return v;
}

}  // namespace

double transit_integral(double e, double tol)
{
    if (!(e > 0.0))
        throw ConfigError("transit_integral: e must be positive");
    return 2.0 * half_transit(e, tol);
}

double solve_e_L(double half_length, double tol)
{
    if (!(half_length > 0.0))
        throw ConfigError("solve_e_L: L must be positive");
    double const target = 2.0 * half_length;
    double const quad_tol = std::min(1e-13, 0.01 * tol);
    auto T = [&](double e) { return transit_integral(e, quad_tol); };

    // Bracket in log(e); T decreases monotonically in e.
    double hi = 0.5;
    while (T(hi) > target)
    {
        hi *= 4.0;
        if (hi > 1e12)
            throw NumericalError("solve_e_L: could not bracket e_L from above");
    }
    double lo = std::min(1e-16, 0.5 * hi);
    while (T(lo) < target)
    {
        lo *= 1e-8;
        if (lo < 1e-300)
            throw NumericalError("solve_e_L: e_L below double precision range for L="
                                 + std::to_string(half_length));
    }

    double const abs_tol = tol * std::max(1.0, target);
    double log_lo = std::log(lo), log_hi = std::log(hi);
    double mid = std::sqrt(lo * hi);
    for (int it = 0; it < 400; ++it)
    {
        mid = std::exp(0.5 * (log_lo + log_hi));
        double const t = T(mid);
        if (std::abs(t - target) <= abs_tol)
            return mid;
        if (t > target)
            log_lo = std::log(mid);
        else
            log_hi = std::log(mid);
        if (log_hi - log_lo < 1e-15)
            break;
    }
    return mid;
}

Profile solve_profile(Domain const& d, double e_L, double tol)
{
    if (!(e_L > 0.0))
        throw ConfigError("solve_profile: e_L must be positive");
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<double>;

    double const L = d.half_length();
    int const n = d.size();
    auto const grid = d.grid();

    // Observation points: 0, the positive grid points, L.
    std::vector<double> times{0.0};
    std::vector<int> index;
    for (int j = 0; j < n; ++j)
        if (grid[j] > 0.0)
        {
            times.push_back(grid[j]);
            index.push_back(j);
        }
    times.push_back(L);

    auto rhs = [e_L](State const& m, State& dm, double) {
        double const q = m[0] * m[0] - 1.0;
        dm[0] = std::sqrt(0.5 * q * q + e_L);
    };
    std::vector<double> observed;
    observed.reserve(times.size());
    auto observer = [&](State const& m, double) { observed.push_back(m[0]); };

    State m0{0.0};
    auto stepper = odeint::make_dense_output(1e-14, 1e-14, odeint::runge_kutta_dopri5<State>());
    odeint::integrate_times(stepper, rhs, m0, times.begin(), times.end(), 1e-3, observer);

    double const m_end = observed.back();
    if (std::abs(m_end - 1.0) > tol)
    {
        std::ostringstream os;
        os << "solve_profile: inconsistent e_L, integrated m(L) = " << m_end
           << " (|m(L)-1| = " << std::abs(m_end - 1.0) << " > " << tol << ")";
        throw NumericalError(os.str());
    }

    Profile p;
    p.e_L = e_L;
    p.half_length = L;
    p.m = Field{std::vector<double>(n, 0.0), Boundary::ramp_dirichlet};
    for (std::size_t i = 0; i < index.size(); ++i)
    {
        int const j = index[i];
        p.m.values[j] = observed[i + 1];
        p.m.values[n - 1 - j] = -observed[i + 1];  // odd symmetry of the grid
    }
    p.energy_value = profile_energy_formula(e_L, L);
    return p;
}

Profile compute_profile(Domain const& d)
{
    return solve_profile(d, solve_e_L(d.half_length()));
}

double profile_energy_formula(double e_L, double half_length)
{
    auto integrand = [e_L](double u) {
        double const q = u * u - 1.0;
        return std::sqrt(0.5 * q * q + e_L);
    };
    double err = 0.0;
    double const half = gauss_kronrod<double, 31>::integrate(integrand, 0.0, 1.0, 20, 1e-14, &err);
    return 2.0 * half - half_length * e_L;
}

ProfileEnergy profile_energy(Domain const& d, Profile const& p, double rel_tol)
{
    if (std::abs(p.half_length - d.half_length()) > 1e-12 * d.half_length())
        throw ConfigError("profile_energy: profile and domain disagree on L");
    ProfileEnergy out;
    out.formula = profile_energy_formula(p.e_L, p.half_length);
    out.direct = energy(d, p.m);
    out.relative_gap = std::abs(out.formula - out.direct) / std::abs(out.formula);
    if (out.relative_gap > rel_tol)
    {
        std::ostringstream os;
        os << "profile_energy: closed form " << out.formula << " and grid quadrature "
           << out.direct << " disagree (relative gap " << out.relative_gap << ")";
        throw NumericalError(os.str());
    }
    return out;
}

namespace {

// m on the closed grid, boundary values included.
std::vector<double> closed_values(Field const& m)
{
    std::vector<double> v;
    v.reserve(m.values.size() + 2);
    v.push_back(left_value(m.bc));
    v.insert(v.end(), m.values.begin(), m.values.end());
    v.push_back(right_value(m.bc));
    return v;
}

}  // namespace

double first_integral_defect(Domain const& d, Profile const& p)
{
    auto const v = closed_values(p.m);
    double const h = d.spacing();
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < v.size(); ++j)
    {
        double const dm = (v[j + 1] - v[j - 1]) / (2.0 * h);
        double const q = v[j] * v[j] - 1.0;
        worst = std::max(worst, std::abs(dm * dm - 0.5 * q * q - p.e_L));
    }
    return worst;
}

double second_order_residual(Domain const& d, Profile const& p)
{
    auto const v = closed_values(p.m);
    double const h = d.spacing();
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < v.size(); ++j)
    {
        double const d2 = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h * h);
        worst = std::max(worst, std::abs(d2 - (v[j] * v[j] * v[j] - v[j])));
    }
    return worst;
}

}  // namespace acldp
