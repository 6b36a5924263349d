#include "acldp/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "acldp/errors.hpp"

namespace acldp {

Interval wilson_interval(long k, long n, double z)
{
    if (n <= 0 || k < 0 || k > n)
        throw ConfigError("wilson_interval: need 0 <= k <= n and n > 0");
    double const nn = static_cast<double>(n);
    double const p = k / nn;
    double const z2 = z * z;
    double const denom = 1.0 + z2 / nn;
    double const centre = (p + z2 / (2.0 * nn)) / denom;
    double const half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    Interval out{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    if (k == 0)
        out.lo = 0.0;
    if (k == n)
        out.hi = 1.0;
    return out;
}

double profile_distance(Domain const& d, Field const& f, Profile const& p)
{
    if (static_cast<int>(f.values.size()) != d.size())
        throw ConfigError("profile_distance: field size does not match the domain");
    double m = 0.0;
    if (f.bc == Boundary::ramp_dirichlet)
    {
        for (int j = 0; j < d.size(); ++j)
            m = std::max(m, std::abs(f.values[j] - p.m.values[j]));
    }
    else
    {
        auto const psi = d.ramp();
        for (int j = 0; j < d.size(); ++j)
            m = std::max(m, std::abs((f.values[j] + psi[j]) - p.m.values[j]));
    }
    return m;
}

TailEstimate tail_probability(EmpiricalMeasure const& em, double delta)
{
    if (em.samples.size() < 100)
        throw ConfigError("tail_probability: need at least 100 samples, have " +
                          std::to_string(em.samples.size()));
    if (!(delta >= 0.0))
        throw ConfigError("tail_probability: delta must be >= 0");
    TailEstimate t;
    t.eps = em.eps;
    t.delta = delta;
    t.n = static_cast<long>(em.samples.size());
    for (auto const& s : em.samples)
        if (s.obs.dist_to_profile >= delta)
            ++t.count;
    t.ci = wilson_interval(t.count, t.n);
    t.p_hat = static_cast<double>(t.count) / t.n;
    if (t.count == 0)
    {
        t.upper_bound_only = true;
        t.ci.hi = 3.0 / t.n;
    }
    return t;
}

DecayFit decay_rate_fit(std::vector<TailEstimate> const& estimates)
{
    std::vector<double> x, y;
    for (auto const& e : estimates)
        if (!e.upper_bound_only && e.count > 0)
        {
            x.push_back(1.0 / e.eps);
            y.push_back(-std::log(e.p_hat));
        }
    DecayFit fit;
    fit.points = static_cast<int>(x.size());
    if (fit.points < 2)
        return fit;
    double const n = fit.points;
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < fit.points; ++i)
    {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < fit.points; ++i)
    {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0)
        return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    fit.degenerate = fit.points < 3 || fit.r2 < 0.8;
    return fit;
}

namespace {

std::vector<EmpiricalMeasure const*> by_decreasing_eps(std::vector<EmpiricalMeasure> const& measures)
{
    std::vector<EmpiricalMeasure const*> out;
    for (auto const& m : measures)
        out.push_back(&m);
    std::stable_sort(out.begin(), out.end(),
                     [](auto const* a, auto const* b) { return a->eps > b->eps; });
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i]->eps < out[i - 1]->eps))
            throw ConfigError("eps grid must be strictly decreasing (duplicate eps)");
    return out;
}

}  // namespace

TailReport tail_report(std::vector<EmpiricalMeasure> const& measures, double delta)
{
    TailReport r;
    r.delta = delta;
    for (auto const* m : by_decreasing_eps(measures))
    {
        r.eps_grid.push_back(m->eps);
        r.p_hat.push_back(tail_probability(*m, delta));
    }
    DecayFit const fit = decay_rate_fit(r.p_hat);
    if (fit.points >= 3)
    {
        r.slope = fit.slope;
        r.r2 = fit.r2;
    }
    r.flagged = fit.degenerate;
    return r;
}

std::vector<TightnessCell> tightness_check(std::vector<EmpiricalMeasure> const& measures, double R,
                                           double kstar, int pstar)
{
    std::vector<TightnessCell> out;
    for (auto const* m : by_decreasing_eps(measures))
    {
        if (m->kstar != kstar || m->pstar != pstar)
        {
            std::ostringstream os;
            os << "tightness_check: samples carry W^{" << m->kstar << "," << m->pstar
               << "} norms, requested W^{" << kstar << "," << pstar << "}";
            throw ConfigError(os.str());
        }
        TightnessCell c;
        c.eps = m->eps;
        c.R = R;
        c.n = static_cast<long>(m->samples.size());
        if (c.n == 0)
            throw ConfigError("tightness_check: empty measure");
        for (auto const& s : m->samples)
            if (s.obs.sobolev_norm > R)
                ++c.count;
        c.fraction = static_cast<double>(c.count) / c.n;
        c.sigma = std::sqrt(c.fraction * (1.0 - c.fraction) / c.n);
        c.ci = wilson_interval(c.count, c.n);
        if (c.count == 0)
            c.ci.hi = 3.0 / c.n;
        out.push_back(c);
    }
    return out;
}

bool nonincreasing_within(std::vector<TightnessCell> const& cells, double nsigma)
{
    for (std::size_t i = 1; i < cells.size(); ++i)
    {
        double const tol = nsigma * std::hypot(cells[i].sigma, cells[i - 1].sigma);
        if (cells[i].fraction > cells[i - 1].fraction + tol)
            return false;
    }
    return true;
}

ConcentrationResult run_concentration(Domain const& d, NoiseModel const& noise, Profile const& p,
                                      ConcentrationPlan const& plan)
{
    if (plan.eps.size() < 3)
        throw ConfigError("concentration needs at least three eps values");
    if (plan.min_count < 1)
        throw ConfigError("concentration: min_count must be >= 1");
    ConcentrationResult out;
    std::vector<double> eps = plan.eps;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    for (double e : eps)
    {
        SdeParams sp = plan.sde;
        sp.eps = e;
        out.measures.push_back(sample_invariant(d, noise, sp, plan.sampling, p));
        for (auto const& w : out.measures.back().warnings)
            out.warnings.push_back(w);
    }

    double delta = plan.delta;
    if (delta <= 0.0)
    {
        // The 2 delta tail at the smallest eps is the rarest cell.
        std::vector<double> dist;
        for (auto const& s : out.measures.back().samples)
            dist.push_back(s.obs.dist_to_profile);
        if (static_cast<long>(dist.size()) < plan.min_count)
            throw ConfigError("concentration: fewer samples than min_count");
        std::sort(dist.begin(), dist.end(), std::greater<>());
        delta = 0.5 * dist[plan.min_count - 1];
    }
    out.tail_delta = tail_report(out.measures, delta);
    out.tail_2delta = tail_report(out.measures, 2.0 * delta);
    if (out.tail_delta.slope && out.tail_2delta.slope && *out.tail_delta.slope > 0.0)
        out.scaling_ratio = *out.tail_2delta.slope / *out.tail_delta.slope;

    double R = plan.R;
    if (R <= 0.0)
    {
        std::vector<double> norms;
        for (auto const& s : out.measures.front().samples)
            norms.push_back(s.obs.sobolev_norm);
        std::sort(norms.begin(), norms.end());
        R = norms[(3 * norms.size()) / 4];
    }
    out.R = R;
    out.tightness = tightness_check(out.measures, R, plan.sde.kstar, plan.sde.pstar);
    out.tightness_monotone = nonincreasing_within(out.tightness);
    return out;
}

}  // namespace acldp
