#pragma once

// The stationary profile m_L: the minimizer of the Ginzburg-Landau energy
// with m(-L) = -1, m(L) = 1. It satisfies the first integral
//
//   m'(xi)^2 = (m^2 - 1)^2 / 2 + e_L,
//
// so e_L is fixed by the transit length
//
//   T(e) = int_{-1}^{1} du / sqrt((u^2 - 1)^2 / 2 + e) = 2L.

#include "acldp/spectral.hpp"

namespace acldp {

struct Profile
{
    Field m;                    // ramp-Dirichlet, sampled on the domain grid
    double e_L = 0.0;           // first-integral constant
    double energy_value = 0.0;  // E_L(m_L)
    double half_length = 0.0;
};

// Transit integral T(e); strictly decreasing in e > 0.
double transit_integral(double e, double tol = 1e-14);

// Root of T(e) = 2L by bisection in log(e). Returns e with
// |T(e) - 2L| <= tol * max(1, 2L).
double solve_e_L(double half_length, double tol = 1e-12);

// Integrates m' = sqrt((m^2-1)^2/2 + e_L) outward from the symmetry point
// m(0) = 0 and samples it on the grid. Throws NumericalError if the
// integrated profile misses m(L) = 1 by more than `tol`.
Profile solve_profile(Domain const& d, double e_L, double tol = 1e-6);

// Convenience: solve_e_L followed by solve_profile.
Profile compute_profile(Domain const& d);

// E_L(m_L) = int_{-1}^{1} sqrt((u^2-1)^2/2 + e_L) du - L e_L.
double profile_energy_formula(double e_L, double half_length);

struct ProfileEnergy
{
    double formula = 0.0;  // closed form above
    double direct = 0.0;   // grid quadrature of the energy functional
    double relative_gap = 0.0;
};

// Evaluates both routes; throws NumericalError if they disagree by more
// than `rel_tol`.
ProfileEnergy profile_energy(Domain const& d, Profile const& p, double rel_tol = 1e-4);

// max over interior points of |(m')^2 - (m^2-1)^2/2 - e_L|, with m' from
// second-order central differences (boundary values included).
double first_integral_defect(Domain const& d, Profile const& p);

// max over interior points of |D2 m - (m^3 - m)| with D2 the three-point
// second difference.
double second_order_residual(Domain const& d, Profile const& p);

}  // namespace acldp
