#include "acldp/energy.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "acldp/errors.hpp"

namespace acldp {

namespace {

void require(Field const& f, Boundary bc, char const* what)
{
    if (f.bc != bc)
        throw ConfigError(std::string(what)
                          + (bc == Boundary::zero_dirichlet
                                 ? ": expected a zero-Dirichlet field (subtract the ramp psi first)"
                                 : ": expected a ramp-Dirichlet field with u(-L)=-1, u(L)=1"));
}

void require_same_length(Domain const& d, Profile const& p, char const* what)
{
    if (std::abs(p.half_length - d.half_length()) > 1e-12 * d.half_length())
        throw ConfigError(std::string(what) + ": profile was computed for a different L");
}

}  // namespace

Field reaction(Domain const& d, Field const& ubar)
{
    require(ubar, Boundary::zero_dirichlet, "reaction");
    Field out = zero_field(d);
    auto const psi = d.ramp();
    for (int j = 0; j < d.size(); ++j)
    {
        double const u = ubar.values[j] + psi[j];
        out.values[j] = u - u * u * u;
    }
    return out;
}

std::vector<double> reaction_derivative(Domain const& d, Field const& ubar)
{
    require(ubar, Boundary::zero_dirichlet, "reaction_derivative");
    std::vector<double> out(d.size());
    auto const psi = d.ramp();
    for (int j = 0; j < d.size(); ++j)
    {
        double const u = ubar.values[j] + psi[j];
        out[j] = 1.0 - 3.0 * u * u;
    }
    return out;
}

double dirichlet_energy(Domain const& d, Field const& u)
{
    require(u, Boundary::ramp_dirichlet, "energy");
    Field const ubar = remove_ramp(d, u);
    auto const c = d.to_modes(ubar.values);
    double s = 0.0;
    for (int k = 0; k < d.modes(); ++k)
        s += d.eigenvalues()[k] * c[k] * c[k];
    return 0.5 * s + 1.0 / d.half_length();
}

double energy(Domain const& d, Field const& u)
{
    double const grad = dirichlet_energy(d, u);
    std::vector<double> pot(d.size());
    for (int j = 0; j < d.size(); ++j)
    {
        double const q = u.values[j] * u.values[j] - 1.0;
        pot[j] = 0.25 * q * q;
    }
    return grad + d.integrate(pot);  // V(+-1) = 0 at the ends
}

double energy_star(Domain const& d, Field const& ubar, Profile const& p)
{
    require(ubar, Boundary::zero_dirichlet, "energy_star");
    require_same_length(d, p, "energy_star");
    return energy(d, add_ramp(d, ubar)) - p.energy_value;
}

Field energy_gradient(Domain const& d, Field const& ubar)
{
    Field lap = laplacian_apply(d, ubar);
    Field const f = reaction(d, ubar);
    for (int j = 0; j < d.size(); ++j)
        lap.values[j] = -(lap.values[j] + f.values[j]);
    return lap;
}

double resolved_gradient_norm(Domain const& d, Field const& ubar)
{
    auto const c = d.to_modes(ubar.values);
    auto const fc = d.to_modes(reaction(d, ubar).values);
    double s = 0.0;
    for (int k = 0; k < d.modes(); ++k)
    {
        double const r = fc[k] - d.eigenvalues()[k] * c[k];
        s += r * r;
    }
    return std::sqrt(s);
}

double potential_lipschitz(double e_L)
{
    int const samples = 40001;
    double best = 0.0;
    for (int i = 0; i < samples; ++i)
    {
        double const u = -2.0 + 4.0 * i / (samples - 1);
        double const q = u * u - 1.0;
        best = std::max(best, std::abs(u * q) / std::sqrt(0.5 * q * q + e_L));
    }
    return best;
}

double proximity_threshold(double e_L)
{
    auto integrand = [e_L](double u) {
        double const q = u * u - 1.0;
        return std::sqrt(0.5 * q * q + e_L);
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 1.0, 2.0, 15,
                                                                         1e-12);
}

std::optional<double> proximity_check(Domain const& d, Field const& ubar, Profile const& p,
                                      double eta)
{
    if (!(eta >= 0.0))
        throw ConfigError("proximity_check: eta must be nonnegative");
    if (eta > proximity_threshold(p.e_L))
        return std::nullopt;
    double const excess = energy_star(d, ubar, p);
    if (excess > eta)
    {
        std::ostringstream os;
        os << "proximity_check: E_L*(ubar) = " << excess << " exceeds eta = " << eta;
        throw ConfigError(os.str());
    }
    double const L = d.half_length();
    double const bound = 2.0 * std::sqrt(L * eta) * std::exp(2.0 * L * potential_lipschitz(p.e_L));

    double dist = 0.0;
    auto const psi = d.ramp();
    for (int j = 0; j < d.size(); ++j)
        dist = std::max(dist, std::abs(ubar.values[j] - (p.m.values[j] - psi[j])));
    // The discrete minimizer sits O(h^2) away from the sampled profile.
    double const h = d.spacing();
    if (dist > bound + h * h)
    {
        std::ostringstream os;
        os << "proximity_check: sup-distance " << dist << " exceeds the bound " << bound;
        throw NumericalError(os.str());
    }
    return bound;
}

EnergyReport energy_report(Domain const& d, Field const& ubar, Profile const& p)
{
    EnergyReport r;
    r.value = energy_star(d, ubar, p);
    r.gradient_norm = resolved_gradient_norm(d, ubar);
    r.proximity = proximity_check(d, ubar, p, std::max(r.value, 0.0));
    return r;
}

}  // namespace acldp
