#include <doctest.h>

#include <cmath>
#include <random>

#include "acldp/errors.hpp"
#include "acldp/ldp.hpp"
#include "support.hpp"

using namespace acldp;

namespace {

EmpiricalMeasure synthetic(double eps, int n, std::mt19937_64& rng, double scale)
{
    EmpiricalMeasure em;
    em.eps = eps;
    em.kstar = 0.2;
    em.pstar = 8;
    std::exponential_distribution<double> expo(1.0);
    for (int i = 0; i < n; ++i)
    {
        Sample s;
        s.chain = i % 4;
        s.obs.dist_to_profile = scale * std::sqrt(eps * expo(rng));
        s.obs.sobolev_norm = 1.0 + s.obs.dist_to_profile;
        em.samples.push_back(s);
    }
    return em;
}

}  // namespace

TEST_CASE("Wilson interval")
{
    // Closed form at k = 0: upper end z^2 / (n + z^2).
    double const z = 1.959963984540054;
    Interval const zero = wilson_interval(0, 50);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi == doctest::Approx(z * z / (50 + z * z)).epsilon(1e-12));

    Interval const ten = wilson_interval(10, 100);
    CHECK(ten.lo == doctest::Approx(0.0552).epsilon(2e-3));
    CHECK(ten.hi == doctest::Approx(0.1744).epsilon(2e-3));

    Interval const all = wilson_interval(20, 20);
    CHECK(all.hi == 1.0);
    CHECK_THROWS_AS(wilson_interval(3, 2), ConfigError);
    CHECK_THROWS_AS(wilson_interval(0, 0), ConfigError);
}

TEST_CASE("Wilson interval coverage")
{
    std::mt19937_64 rng(21);
    for (double p : {0.05, 0.3, 0.6})
    {
        std::binomial_distribution<long> binom(200, p);
        int covered = 0;
        int const trials = 4000;
        for (int t = 0; t < trials; ++t)
        {
            Interval const ci = wilson_interval(binom(rng), 200);
            if (ci.lo <= p && p <= ci.hi)
                ++covered;
        }
        double const rate = static_cast<double>(covered) / trials;
        CHECK(rate > 0.92);
        CHECK(rate < 0.98);
    }
}

TEST_CASE("tail probability edge cases and monotonicity")
{
    std::mt19937_64 rng(4);
    EmpiricalMeasure const em = synthetic(0.05, 500, rng, 1.0);
    TailEstimate const all = tail_probability(em, 0.0);
    CHECK(all.p_hat == 1.0);
    CHECK(all.count == 500);

    TailEstimate const none = tail_probability(em, 10.0);
    CHECK(none.count == 0);
    CHECK(none.upper_bound_only);
    CHECK(none.ci.lo == 0.0);
    CHECK(none.ci.hi == doctest::Approx(3.0 / 500));

    double prev = 1.0;
    for (double delta = 0.0; delta < 1.0; delta += 0.01)
    {
        TailEstimate const t = tail_probability(em, delta);
        CHECK(t.p_hat <= prev);
        CHECK(t.ci.lo <= t.p_hat);
        CHECK(t.p_hat <= t.ci.hi);
        prev = t.p_hat;
    }

    EmpiricalMeasure small = em;
    small.samples.resize(99);
    CHECK_THROWS_AS(tail_probability(small, 0.1), ConfigError);
    CHECK_THROWS_AS(tail_probability(em, -1.0), ConfigError);
}

TEST_CASE("decay fit recovers a synthetic exponential rate")
{
    std::vector<TailEstimate> est;
    for (double eps : {0.2, 0.1, 0.05, 0.025})
    {
        TailEstimate t;
        t.eps = eps;
        t.count = 1;
        t.n = 1;
        t.p_hat = std::exp(-3.0 / eps);
        est.push_back(t);
    }
    DecayFit const f = decay_rate_fit(est);
    CHECK(f.slope == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(!f.degenerate);
    CHECK(f.points == 4);

    // Zero-count cells never enter the fit.
    est[3].count = 0;
    est[3].upper_bound_only = true;
    est[3].p_hat = 1e-300;
    DecayFit const g = decay_rate_fit(est);
    CHECK(g.points == 3);
    CHECK(g.slope == doctest::Approx(3.0).epsilon(1e-6));

    est[2].count = 0;
    est[2].upper_bound_only = true;
    CHECK(decay_rate_fit(est).degenerate);
}

TEST_CASE("tail report on a Gaussian-like synthetic family")
{
    // dist = scale sqrt(eps X), X ~ Exp(1): P(dist >= delta) = exp(-delta^2 / (scale^2 eps)).
    std::mt19937_64 rng(9);
    std::vector<EmpiricalMeasure> ms;
    for (double eps : {0.025, 0.1, 0.05})
        ms.push_back(synthetic(eps, 20000, rng, 1.0));
    TailReport const r = tail_report(ms, 0.2);
    REQUIRE(r.eps_grid.size() == 3);
    CHECK(r.eps_grid[0] == 0.1);
    CHECK(r.eps_grid[2] == 0.025);
    REQUIRE(r.slope.has_value());
    CHECK(*r.slope == doctest::Approx(0.04).epsilon(0.1));
    CHECK(!r.flagged);

    TailReport const r2 = tail_report(ms, 0.4);
    REQUIRE(r2.slope.has_value());
    double const ratio = *r2.slope / *r.slope;
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);

    ms.push_back(synthetic(0.05, 200, rng, 1.0));
    CHECK_THROWS_AS(tail_report(ms, 0.3), ConfigError);
}

TEST_CASE("tightness fractions")
{
    std::mt19937_64 rng(12);
    std::vector<EmpiricalMeasure> ms;
    for (double eps : {0.1, 0.05, 0.025})
        ms.push_back(synthetic(eps, 2000, rng, 1.0));
    auto const zero = tightness_check(ms, 0.0, 0.2, 8);
    for (auto const& c : zero)
        CHECK(c.fraction == 1.0);
    auto const huge = tightness_check(ms, 1e6, 0.2, 8);
    for (auto const& c : huge)
    {
        CHECK(c.fraction == 0.0);
        CHECK(c.ci.hi == doctest::Approx(3.0 / c.n));
    }
    auto const mid = tightness_check(ms, 1.3, 0.2, 8);
    CHECK(mid[0].fraction > mid[2].fraction);
    CHECK(nonincreasing_within(mid));
    CHECK_THROWS_AS(tightness_check(ms, 1.0, 0.3, 8), ConfigError);
    CHECK_THROWS_AS(tightness_check(ms, 1.0, 0.2, 4), ConfigError);

    std::vector<TightnessCell> rising(2);
    rising[0].fraction = 0.1;
    rising[0].sigma = 0.01;
    rising[1].fraction = 0.2;
    rising[1].sigma = 0.01;
    CHECK(!nonincreasing_within(rising));
    rising[1].fraction = 0.12;
    CHECK(nonincreasing_within(rising));
}

TEST_CASE("distance statistic is shift consistent")
{
    Domain d(2.0, 63, 32);
    Profile const p = compute_profile(d);
    std::mt19937_64 rng(30);
    for (int trial = 0; trial < 20; ++trial)
    {
        Field const ubar = testing_support::random_band_limited(d, rng, 10, 0.5);
        Field const u = add_ramp(d, ubar);
        double const a = profile_distance(d, ubar, p);
        double const b = profile_distance(d, u, p);
        CHECK(a == b);
        Observation const o = observe(d, ubar, 0.0, &p, 0.2, 8);
        CHECK(o.dist_to_profile == doctest::Approx(a).epsilon(1e-14));
    }
}

TEST_CASE("concentration pipeline on a short run")
{
    Domain d(2.0, 31, 16);
    Profile const p = compute_profile(d);
    ConcentrationPlan plan;
    plan.eps = {0.05, 0.2, 0.1};
    plan.sde.dt = 5e-3;
    plan.sde.seed = 77;
    plan.sampling.burn_in = 5.0;
    plan.sampling.stride = 0.5;
    plan.sampling.samples_per_chain = 60;
    plan.sampling.n_chains = 2;
    ConcentrationResult const r = run_concentration(d, NoiseModel::constant(1.0), p, plan);
    REQUIRE(r.measures.size() == 3);
    CHECK(r.measures[0].eps == 0.2);
    CHECK(r.measures[2].eps == 0.05);
    CHECK(r.tail_delta.delta > 0.0);
    CHECK(r.tail_2delta.delta == doctest::Approx(2.0 * r.tail_delta.delta));
    CHECK(r.tail_2delta.p_hat[2].count >= plan.min_count);
    CHECK(r.tightness.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(r.tail_delta.p_hat[i].p_hat >= r.tail_2delta.p_hat[i].p_hat);

    plan.eps = {0.1, 0.05};
    CHECK_THROWS_AS(run_concentration(d, NoiseModel::constant(1.0), p, plan), ConfigError);
}
