#pragma once

// Deterministic dynamics dz/dt = Delta z + F(z) (+ G(t, z) f) in the shifted
// variable z = u - psi, advanced by exponential Euler on the resolved modes:
//
//   c_k <- exp(-lambda_k dt) c_k + (1 - exp(-lambda_k dt)) / lambda_k * N_k,
//
// with N the projection of the pointwise forcing.

#include <vector>

#include "acldp/noise.hpp"
#include "acldp/spectral.hpp"

namespace acldp {

struct Path
{
    std::vector<Field> fields;  // zero-Dirichlet, uniform time grid
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<Field> control;  // empty, or one field per step

    int steps() const { return static_cast<int>(fields.size()) - 1; }
    double horizon() const { return dt * steps(); }
    double time(int i) const { return t0 + dt * i; }
};

// Throws ConfigError unless the path has >= 2 zero-Dirichlet fields of the
// domain size, dt > 0, and a control of matching length if present.
void validate_path(Domain const& d, Path const& p);

struct FlowOptions
{
    double dt = 2e-3;
    double T = 10.0;
    double stop_tol = 1e-8;  // on the resolved L2 norm of Delta z + F(z); 0 disables
    int save_every = 1;
    double blowup = 10.0;
};

struct FlowResult
{
    Path path;                        // states every save_every steps
    Field final_state;                // state at t_final
    double t_final = 0.0;
    bool converged = false;           // stop_tol reached
    std::vector<double> grad_norms;   // resolved gradient norm at each saved state
};

// Projection onto the resolved modes.
Field project(Domain const& d, Field const& f);

// The initial state is projected onto the resolved modes first. Throws
// NumericalError if sup |z| exceeds opts.blowup.
FlowResult gradient_flow(Domain const& d, Field const& x, FlowOptions const& opts);

// One field per step in `control`; returns every state. With a zero control
// the result is bitwise identical to gradient_flow with stop_tol = 0.
Path skeleton_solve(Domain const& d, Field const& x, std::vector<Field> const& control,
                    NoiseModel const& noise, double dt, double blowup = 10.0);

// Slowest e-folding time of the noiseless flow near its equilibrium z_inf,
// from the late decay of a small kick to z_inf. z_inf is reached from 0 within
// T; throws NumericalError if the kick has not decayed by e^-6 after another T.
double relaxation_time(Domain const& d, double dt = 2e-3, double T = 200.0);

}  // namespace acldp
