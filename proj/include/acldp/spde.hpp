#pragma once

// Shifted stochastic Allen-Cahn equation
//
//   d ubar = [Delta ubar + F(ubar)] dt + sqrt(eps) g(t, xi, ubar + psi) dW,
//
// W = sum_{k <= N_W} e_k beta_k, advanced by exponential Euler-Maruyama on the
// resolved modes:
//
//   c_k <- exp(-lambda_k dt) c_k + phi_k F_k + sqrt(eps) s_k Z_k,
//
// F_k the projected reaction, Z_k the k-th coefficient of g * sum_j e_j xi_j
// with xi_j iid N(0, 1), and s_k = sqrt((1 - exp(-2 lambda_k dt)) / (2 lambda_k))
// the exact standard deviation of the semigroup-weighted increment. For
// constant g each noise mode is then an exact Ornstein-Uhlenbeck sample.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acldp/flow.hpp"
#include "acldp/noise.hpp"
#include "acldp/profile.hpp"
#include "acldp/spectral.hpp"

namespace acldp {

struct SdeParams
{
    double eps = 0.05;
    double dt = 2e-3;
    int modes_noise = 0;     // N_W; 0 means modes / 2
    double lambda = 0.0;     // damping of the convolution diagnostics
    std::uint64_t seed = 1;
    std::uint32_t chain = 0;
    double blowup = 50.0;
    bool drop_reaction = false;  // test hook: F = 0, leaving a linear equation
    int record_every = 1;
    double kstar = 0.2;
    int pstar = 8;

    // Throws ConfigError naming the first violated constraint.
    void validate(Domain const& d) const;
    int noise_modes(Domain const& d) const;
};

struct Observation
{
    double t = 0.0;
    double sup_norm = 0.0;          // ||ubar||_sup
    double dist_to_profile = 0.0;   // ||ubar - (m_L - psi)||_sup, NaN without a profile
    double energy_star = 0.0;       // NaN without a profile
    double sobolev_norm = 0.0;      // W^{kstar, pstar} norm of ubar
};

struct Trajectory
{
    Path path;
    std::uint64_t seed = 0;
    std::uint32_t chain = 0;
    std::vector<Observation> observables;  // one per path node
    Field final_state;
    double min_intensity = 0.0;  // min over grid and time of g
};

Observation observe(Domain const& d, Field const& ubar, double t, Profile const* profile,
                    double kstar, int pstar);

// eps = 0 reproduces gradient_flow (stop_tol = 0) bitwise. Throws
// NumericalError (with eps, dt and t) if sup |ubar| exceeds p.blowup.
Trajectory sde_run(Domain const& d, Field const& x, NoiseModel const& noise, SdeParams const& p,
                   double T, Profile const* profile = nullptr);

struct ConvolutionResult
{
    Trajectory trajectory;
    Path gamma;  // gamma_lambda, same increments as the trajectory
    Path y;      // Y_lambda from dY = (Delta - lambda) Y + F(ubar) + lambda ubar
};

ConvolutionResult stochastic_convolution(Domain const& d, Field const& x, NoiseModel const& noise,
                                         SdeParams const& p, double T,
                                         Profile const* profile = nullptr);

// Factorization with C_alpha = sin(pi alpha) / pi.
double factorization_constant(double alpha);
// Left side of the exponent condition (alpha - 1 - k*/2) p*/(p* - 1) > -1.
double factorization_exponent(double alpha, double kstar, int pstar);
// Throws ConfigError naming the violated inequality.
void check_factorization_feasible(double alpha, double kstar, int pstar);
// int_0^1 (1 - r)^(alpha - 1) r^(-alpha) dr by tanh-sinh quadrature.
double beta_integral(double alpha);

// out_m = int_0^{m dt} tau^beta exp(-mu tau) v(m dt - tau) dtau for v
// piecewise linear through `values` (product integration, exact moments).
std::vector<double> kernel_convolve_linear(std::vector<double> const& values, double dt, double beta,
                                           double mu);
// out_m = sum_{n < m} inc_n / dt int_{n dt}^{(n+1) dt} (m dt - r)^beta exp(-mu (m dt - r)) dr.
std::vector<double> kernel_convolve_increments(std::vector<double> const& increments, double dt,
                                               double beta, double mu);

struct FactorizationCheck
{
    double factorized = 0.0;
    double direct = 0.0;  // closed form of int_0^T exp(-mu (T - s)) sin(omega s) ds
    double relative_error = 0.0;
};

// Deterministic integrand h(s) = sin(omega s) in place of dW.
FactorizationCheck factorization_deterministic_check(double alpha, double mu, double omega, double T,
                                                     int steps);

struct FactorizationResult
{
    Path gamma_direct;       // damped convolution of the same increments
    Path gamma_factorized;   // through Gamma^alpha and the fractional integral
    std::vector<double> gamma_alpha_norm;  // ||Gamma^alpha(t)||_{L^pstar} per node
    double sup_gamma_alpha_norm = 0.0;
};

FactorizationResult factorized_convolution(Domain const& d, Field const& x, NoiseModel const& noise,
                                           SdeParams const& p, double T, double alpha);

struct SamplingPlan
{
    double burn_in = 10.0;     // time
    double stride = 0.5;       // time between samples
    int samples_per_chain = 100;
    int n_chains = 8;
    int threads = 1;
    double relaxation = 0.0;   // deterministic relaxation time, 0 if unknown
};

struct Sample
{
    int chain = 0;
    Observation obs;
};

struct EmpiricalMeasure
{
    std::vector<Sample> samples;  // chain-major order
    double eps = 0.0;
    int n_chains = 0;
    double burn_in = 0.0;
    double stride = 0.0;
    double dt = 0.0;
    double kstar = 0.0;
    int pstar = 0;
    double min_intensity = 0.0;
    std::vector<std::string> warnings;
};

// Chains start at ubar = 0 with streams (seed, chain); results do not
// depend on the thread count.
EmpiricalMeasure sample_invariant(Domain const& d, NoiseModel const& noise, SdeParams const& p,
                                  SamplingPlan const& plan, Profile const& profile);

}  // namespace acldp
