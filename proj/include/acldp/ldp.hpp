#pragma once

// Large-deviation statistics over empirical invariant measures: tail
// probabilities of ||ubar - (m_L - psi)||_sup, their decay in 1/eps, and
// exceedance of W^{k*,p*} balls.

#include <optional>
#include <string>
#include <vector>

#include "acldp/noise.hpp"
#include "acldp/profile.hpp"
#include "acldp/spde.hpp"
#include "acldp/spectral.hpp"

namespace acldp {

struct Interval
{
    double lo = 0.0;
    double hi = 1.0;
};

// Wilson score interval for k successes in n trials (z = 1.96 gives 95%).
Interval wilson_interval(long k, long n, double z = 1.959963984540054);

// Distance statistic. A zero-Dirichlet field is compared with m_L - psi, a
// ramp-Dirichlet field with m_L; the two agree on u = ubar + psi.
double profile_distance(Domain const& d, Field const& f, Profile const& p);

struct TailEstimate
{
    double eps = 0.0;
    double delta = 0.0;
    long count = 0;
    long n = 0;
    double p_hat = 0.0;
    Interval ci;
    // Zero count: the interval is [0, 3/n] (rule of three) and the cell is
    // kept out of the log fit.
    bool upper_bound_only = false;
};

// Throws ConfigError with fewer than 100 samples or delta < 0.
TailEstimate tail_probability(EmpiricalMeasure const& em, double delta);

struct DecayFit
{
    double slope = 0.0;      // of -log p_hat against 1/eps
    double intercept = 0.0;
    double r2 = 0.0;
    int points = 0;          // estimates with a nonzero count
    bool degenerate = true;  // fewer than 3 points or r2 < 0.8
};

DecayFit decay_rate_fit(std::vector<TailEstimate> const& estimates);

struct TailReport
{
    std::vector<double> eps_grid;  // strictly decreasing
    double delta = 0.0;
    std::vector<TailEstimate> p_hat;
    std::optional<double> slope;  // only with >= 3 nonzero tails
    std::optional<double> r2;
    bool flagged = false;         // degenerate fit
};

// Measures are sorted by decreasing eps; equal eps values throw ConfigError.
TailReport tail_report(std::vector<EmpiricalMeasure> const& measures, double delta);

struct TightnessCell
{
    double eps = 0.0;
    double R = 0.0;
    long count = 0;
    long n = 0;
    double fraction = 0.0;
    double sigma = 0.0;  // binomial standard error
    Interval ci;
};

// Throws ConfigError if a measure was recorded with other (k*, p*).
std::vector<TightnessCell> tightness_check(std::vector<EmpiricalMeasure> const& measures, double R,
                                           double kstar, int pstar);

// True if each fraction exceeds its predecessor (larger eps) by at most
// nsigma combined standard errors.
bool nonincreasing_within(std::vector<TightnessCell> const& cells, double nsigma = 2.0);

struct ConcentrationPlan
{
    std::vector<double> eps{0.1, 0.05, 0.025};
    double delta = 0.0;    // 0: choose so the 2 delta tail at the smallest eps has min_count samples
    double R = 0.0;        // 0: upper quartile of the Sobolev norm at the largest eps
    long min_count = 10;
    SdeParams sde;         // eps is overwritten per cell
    SamplingPlan sampling;
};

struct ConcentrationResult
{
    std::vector<EmpiricalMeasure> measures;  // decreasing eps
    TailReport tail_delta;
    TailReport tail_2delta;
    std::optional<double> scaling_ratio;  // slope(2 delta) / slope(delta)
    double R = 0.0;
    std::vector<TightnessCell> tightness;
    bool tightness_monotone = false;
    std::vector<std::string> warnings;
};

ConcentrationResult run_concentration(Domain const& d, NoiseModel const& noise, Profile const& p,
                                      ConcentrationPlan const& plan);

}  // namespace acldp
