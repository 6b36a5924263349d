#pragma once

// Ginzburg-Landau energy
//
//   E_L(u) = int_{-L}^{L} |u'|^2 / 2 + (u^2 - 1)^2 / 4 dxi,   u(+-L) = +-1,
//
// its shift E_L*(ubar) = E_L(ubar + psi) - E_L(m_L) and the gradient
// D E_L*(ubar) = -[Delta ubar + F(ubar)], F(z) = (z + psi) - (z + psi)^3.

#include <optional>

#include "acldp/profile.hpp"
#include "acldp/spectral.hpp"

namespace acldp {

struct EnergyReport
{
    double value = 0.0;          // E_L*(ubar)
    double gradient_norm = 0.0;  // L2 norm of the resolved gradient
    std::optional<double> proximity;
};

// F(ubar) pointwise on the grid.
Field reaction(Domain const& d, Field const& ubar);
// F'(ubar) = 1 - 3 (ubar + psi)^2 pointwise.
std::vector<double> reaction_derivative(Domain const& d, Field const& ubar);

// The gradient term uses the spectral derivative of ubar on the resolved
// modes, which by orthogonality equals sum_k lambda_k c_k^2 / 2 + 1/L; the
// potential term is the trapezoid rule with the boundary values.
double energy(Domain const& d, Field const& u);

// int |u'|^2 / 2, the gradient part of energy().
double dirichlet_energy(Domain const& d, Field const& u);

double energy_star(Domain const& d, Field const& ubar, Profile const& p);

// Exact grid gradient of energy_star with respect to the trapezoid inner
// product: -[P Delta ubar + F(ubar)].
Field energy_gradient(Domain const& d, Field const& ubar);

// Norm of the gradient restricted to the resolved modes, the quantity that
// vanishes at the discrete equilibrium.
double resolved_gradient_norm(Domain const& d, Field const& ubar);

// max |V'| on [-2, 2] for V(u) = sqrt((u^2 - 1)^2 / 2 + e_L).
double potential_lipschitz(double e_L);

// Energy excess needed to push a state to |u| = 2: int_1^2 V(u) du.
double proximity_threshold(double e_L);

// Returns 2 sqrt(L eta) exp(2 L C_V), or nothing if eta exceeds
// proximity_threshold. Throws ConfigError if energy_star(ubar) > eta and
// NumericalError if the actual sup-distance to m_L - psi exceeds the bound
// plus a grid allowance h^2.
std::optional<double> proximity_check(Domain const& d, Field const& ubar, Profile const& p,
                                      double eta);

EnergyReport energy_report(Domain const& d, Field const& ubar, Profile const& p);

}  // namespace acldp
