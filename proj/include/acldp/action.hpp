#pragma once

// Discrete action of a path z_0..z_N on a uniform time grid,
//
//   A = 1/2 sum_n dt || r_n / g(z_mid + psi) ||^2,
//   r_n = (z_{n+1} - z_n) / dt - P Delta z_mid - F(z_mid),  z_mid = (z_n + z_{n+1}) / 2,
//
// with the L2 norm taken by the trapezoid rule on the grid.

#include <string>
#include <vector>

#include "acldp/flow.hpp"
#include "acldp/noise.hpp"
#include "acldp/profile.hpp"
#include "acldp/spectral.hpp"

namespace acldp {

struct ActionResult
{
    double value = 0.0;
    std::vector<double> residual_series;  // ||r_n||_{L2} per step
    Path path;
    int iterations = 0;
    bool converged = true;
    std::string message;
};

ActionResult action(Domain const& d, Path const& path, NoiseModel const& noise);

// dA/dz_m for every node (the endpoint entries are computed but usually pinned),
// as grid vectors in the Euclidean sense.
std::vector<std::vector<double>> action_gradient(Domain const& d, Path const& path,
                                                 NoiseModel const& noise);

// Linear interpolation from a to b over unit time.
Path interpolation_path(Field const& a, Field const& b, int steps);

// Time reversal of a stored path.
Path reversed_path(Path const& p);

// Runs the flow from zeta for t_star and reverses it: the reversed path starts
// at z(t_star) and ends at zeta.
Path reversed_flow_path(Domain const& d, Field const& zeta, double t_star, double dt);

// Concatenates two paths sharing an endpoint and a time step.
Path concatenate(Path const& first, Path const& second);

// Interpolation from m_L - psi to z(t_star) over unit time, then the reversed
// flow to zeta. Horizon t_star + 1.
Path quasipotential_path(Domain const& d, Profile const& p, Field const& zeta, double t_star,
                         double dt);
ActionResult quasipotential_upper(Domain const& d, Profile const& p, Field const& zeta,
                                  NoiseModel const& noise, double t_star, double dt);

struct MamOptions
{
    int max_iterations = 200;
    double function_tolerance = 1e-12;
    double gradient_tolerance = 1e-12;
};

// Minimizes over interior nodes with the endpoints pinned, starting from
// `init`. Never returns more than action(init).
ActionResult mam_minimize(Domain const& d, NoiseModel const& noise, Path const& init,
                          MamOptions const& opts = {});

struct LadderResult
{
    ActionResult best;
    std::vector<double> horizons;
    std::vector<double> values;  // minimized action per horizon
    std::vector<double> initial_values;
};

// Horizons T0 * 2^i, i < rungs, each initialized by quasipotential_path with
// t_star = T - 1; reports the smallest minimized action.
LadderResult mam_ladder(Domain const& d, Profile const& p, Field const& zeta, NoiseModel const& noise,
                        double T0, int rungs, double dt, MamOptions const& opts = {});

// Constant of the lower sandwich E*(zeta) - E*(z(0)) <= C A(z):
// C = K^2 (1 + sup_t ||z(t)||_sup^2), K = sup|g(., 0)| + Lipschitz constant.
double lower_sandwich_constant(Path const& path, NoiseModel const& noise);

}  // namespace acldp
