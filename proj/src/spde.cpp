#include "acldp/spde.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "acldp/energy.hpp"
#include "acldp/errors.hpp"
#include "acldp/rng.hpp"
#include "integrator.hpp"

namespace acldp {

void SdeParams::validate(Domain const& d) const
{
    if (!(eps >= 0.0) || !std::isfinite(eps))
        throw ConfigError("sde.eps must be nonnegative");
    if (!(dt > 0.0))
        throw ConfigError("sde.dt must be positive");
    if (modes_noise < 0 || modes_noise > d.modes())
        throw ConfigError("sde.modes_noise must lie in [0, domain.modes] (0 selects modes/2)");
    if (!(lambda >= 0.0))
        throw ConfigError("sde.lambda must be nonnegative");
    if (!(blowup > 0.0))
        throw ConfigError("sde.blowup must be positive");
    if (record_every < 1)
        throw ConfigError("sde.record_every must be >= 1");
    if (kstar < 0.0 || kstar >= 1.0)
        throw ConfigError("sobolev.kstar must lie in [0, 1)");
    if (pstar < 2 || pstar % 2 != 0)
        throw ConfigError("sobolev.pstar must be an even integer >= 2");
}

int SdeParams::noise_modes(Domain const& d) const
{
    return modes_noise > 0 ? modes_noise : std::max(1, d.modes() / 2);
}

Observation observe(Domain const& d, Field const& ubar, double t, Profile const* profile,
                    double kstar, int pstar)
{
    Observation o;
    o.t = t;
    o.sup_norm = detail::sup_abs(ubar.values);
    if (profile)
    {
        auto const psi = d.ramp();
        double m = 0.0;
        for (int j = 0; j < d.size(); ++j)
            m = std::max(m, std::abs(ubar.values[j] - (profile->m.values[j] - psi[j])));
        o.dist_to_profile = m;
        o.energy_star = energy_star(d, ubar, *profile);
    }
    else
    {
        o.dist_to_profile = std::numeric_limits<double>::quiet_NaN();
        o.energy_star = std::numeric_limits<double>::quiet_NaN();
    }
    o.sobolev_norm = sobolev_norm(d, ubar, kstar, pstar);
    return o;
}

namespace {

// Per step: c_old (modes before the step), reaction modes, noise modes Z
// (zero when eps = 0).
using StepHook = std::function<void(long, std::span<const double>, std::span<const double>,
                                    std::span<const double>)>;

struct RunOptions
{
    bool store_path = true;
    bool observe_nodes = true;
    StepHook hook;
    // Called at every recorded node with the state; used by the sampler.
    std::function<void(long, std::span<const double>)> on_record;
};

Trajectory simulate(Domain const& d, Field const& x, NoiseModel const& noise, SdeParams const& p,
                    double T, Profile const* profile, RunOptions const& ro)
{
    p.validate(d);
    noise.validate();
    if (x.bc != Boundary::zero_dirichlet || static_cast<int>(x.values.size()) != d.size())
        throw ConfigError("sde: initial state must be a zero-Dirichlet field on the domain grid");
    if (!(T >= 0.0))
        throw ConfigError("sde: T must be nonnegative");

    int const n = d.size();
    int const m = d.modes();
    int const nw = p.noise_modes(d);
    long const nsteps = std::lround(T / p.dt);
    detail::ExpEuler const stepper(d, p.dt);
    std::vector<double> sigma(m);
    for (int k = 0; k < m; ++k)
        sigma[k] = detail::ou_factor(d.eigenvalues()[k], p.dt);
    double const sqrt_eps = std::sqrt(p.eps);
    bool const noisy = p.eps > 0.0 || static_cast<bool>(ro.hook);
    bool const constant_g = noise.kind == NoiseKind::constant;
    NoiseStream const stream(p.seed, p.chain);

    auto const grid = d.grid();
    auto const psi = d.ramp();
    std::vector<double> c = d.to_modes(x.values);
    std::vector<double> z = d.to_grid(c);
    std::vector<double> f(n), fh(m), xi(nw), w(n), zh(m, 0.0), c_old(m);

    Trajectory tr;
    tr.seed = p.seed;
    tr.chain = p.chain;
    tr.path.dt = p.dt * p.record_every;
    tr.min_intensity = std::numeric_limits<double>::infinity();

    auto record = [&](long step) {
        Field const ubar{z, Boundary::zero_dirichlet};
        if (ro.store_path)
            tr.path.fields.push_back(ubar);
        if (ro.observe_nodes)
            tr.observables.push_back(observe(d, ubar, step * p.dt, profile, p.kstar, p.pstar));
        if (ro.on_record)
            ro.on_record(step, z);
    };
    record(0);

    for (long step = 0; step < nsteps; ++step)
    {
        double const t = step * p.dt;
        if (p.drop_reaction)
            std::fill(f.begin(), f.end(), 0.0);
        else
            for (int j = 0; j < n; ++j)
            {
                double const u = z[j] + psi[j];
                f[j] = u - u * u * u;
            }
        d.to_modes(f, fh);

        if (noisy)
        {
            for (int pair = 0; 2 * pair < nw; ++pair)
            {
                NormalPair const g = stream.normals(static_cast<std::uint64_t>(step),
                                                    static_cast<std::uint32_t>(pair));
                xi[2 * pair] = g.a;
                if (2 * pair + 1 < nw)
                    xi[2 * pair + 1] = g.b;
            }
            if (constant_g)
            {
                for (int k = 0; k < nw; ++k)
                    zh[k] = noise.g0 * xi[k];
                tr.min_intensity = std::min(tr.min_intensity, noise.g0);
            }
            else
            {
                d.to_grid(xi, w);
                for (int j = 0; j < n; ++j)
                {
                    double const g = noise.value(t, grid[j], z[j] + psi[j]);
                    tr.min_intensity = std::min(tr.min_intensity, g);
                    w[j] *= g;
                }
                d.to_modes(w, zh);
            }
        }

        if (ro.hook)
        {
            std::copy(c.begin(), c.end(), c_old.begin());
            ro.hook(step, c_old, fh, zh);
        }
        stepper.step(c, fh);
        if (p.eps > 0.0)
            for (int k = 0; k < m; ++k)
                c[k] += sqrt_eps * sigma[k] * zh[k];
        d.to_grid(c, z);

        double const s = detail::sup_abs(z);
        if (!(s <= p.blowup))
        {
            std::ostringstream os;
            os << "sde: sup|ubar| = " << s << " exceeded " << p.blowup << " at t = " << t + p.dt
               << " (eps = " << p.eps << ", dt = " << p.dt << ", seed = " << p.seed
               << ", chain = " << p.chain << "); reduce dt";
            throw NumericalError(os.str());
        }
        if ((step + 1) % p.record_every == 0)
            record(step + 1);
    }
    tr.final_state = Field{z, Boundary::zero_dirichlet};
    if (!std::isfinite(tr.min_intensity))
        tr.min_intensity = noise.g0;
    return tr;
}

}  // namespace

Trajectory sde_run(Domain const& d, Field const& x, NoiseModel const& noise, SdeParams const& p,
                   double T, Profile const* profile)
{
    return simulate(d, x, noise, p, T, profile, RunOptions{});
}

ConvolutionResult stochastic_convolution(Domain const& d, Field const& x, NoiseModel const& noise,
                                         SdeParams const& p, double T, Profile const* profile)
{
    int const m = d.modes();
    detail::ExpEuler const damped(d, p.dt, p.lambda);
    std::vector<double> sigma(m);
    for (int k = 0; k < m; ++k)
        sigma[k] = detail::ou_factor(d.eigenvalues()[k] + p.lambda, p.dt);

    std::vector<double> gamma(m, 0.0);
    std::vector<double> y = d.to_modes(x.values);
    std::vector<double> forcing(m);

    ConvolutionResult out;
    out.gamma.dt = out.y.dt = p.dt * p.record_every;
    out.gamma.fields.push_back(zero_field(d));
    out.y.fields.push_back(Field{d.to_grid(y), Boundary::zero_dirichlet});

    RunOptions ro;
    ro.hook = [&](long step, std::span<const double> c_old, std::span<const double> fh,
                  std::span<const double> zh) {
        for (int k = 0; k < m; ++k)
        {
            gamma[k] = damped.decay[k] * gamma[k] + sigma[k] * zh[k];
            forcing[k] = fh[k] + p.lambda * c_old[k];
        }
        damped.step(y, forcing);
        if ((step + 1) % p.record_every == 0)
        {
            out.gamma.fields.push_back(Field{d.to_grid(gamma), Boundary::zero_dirichlet});
            out.y.fields.push_back(Field{d.to_grid(y), Boundary::zero_dirichlet});
        }
    };
    out.trajectory = simulate(d, x, noise, p, T, profile, ro);
    return out;
}

double factorization_constant(double alpha) { return std::sin(std::numbers::pi * alpha) / std::numbers::pi; }

double factorization_exponent(double alpha, double kstar, int pstar)
{
    return (alpha - 1.0 - 0.5 * kstar) * pstar / (pstar - 1.0);
}

void check_factorization_feasible(double alpha, double kstar, int pstar)
{
    if (!(alpha > 0.0 && alpha < 0.25))
        throw ConfigError("sobolev.alpha must satisfy 0 < alpha < 1/4, got " + std::to_string(alpha));
    if (pstar < 2)
        throw ConfigError("sobolev.pstar must be >= 2");
    double const e = factorization_exponent(alpha, kstar, pstar);
    if (!(e > -1.0))
    {
        std::ostringstream os;
        os << "infeasible factorization: (alpha - 1 - kstar/2) * pstar/(pstar - 1) = " << e
           << " is not > -1 (alpha = " << alpha << ", kstar = " << kstar << ", pstar = " << pstar
           << ")";
        throw ConfigError(os.str());
    }
}

double beta_integral(double alpha)
{
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [alpha](double r, double rc) {
        // rc is the distance to the nearer endpoint, which keeps both
        // singular factors accurate.
        double const left = r <= 0.5 ? r : 1.0 - rc;
        double const right = r <= 0.5 ? 1.0 - r : rc;
        return std::pow(right, alpha - 1.0) * std::pow(left, -alpha);
    };
    return ts.integrate(f, 0.0, 1.0);
}

namespace {

// int_a^b tau^(s-1) exp(-mu tau) dtau, s > 0, 0 <= a < b.
double gamma_moment(double s, double mu, double a, double b)
{
    if (mu == 0.0)
        return (std::pow(b, s) - std::pow(a, s)) / s;
    double const xa = mu * a, xb = mu * b;
    double diff;
    if (xa > s)
        diff = boost::math::tgamma(s, xa) - boost::math::tgamma(s, xb);
    else
        diff = boost::math::tgamma_lower(s, xb) - boost::math::tgamma_lower(s, xa);
    return diff * std::pow(mu, -s);
}

}  // namespace

std::vector<double> kernel_convolve_linear(std::vector<double> const& values, double dt, double beta,
                                           double mu)
{
    if (!(beta > -1.0))
        throw ConfigError("kernel_convolve_linear: exponent must exceed -1");
    std::size_t const n = values.size();
    std::vector<double> A(n), B(n);
    for (std::size_t j = 1; j < n; ++j)
    {
        double const a = (j - 1) * dt, b = j * dt;
        A[j] = gamma_moment(beta + 1.0, mu, a, b);
        double const m1 = gamma_moment(beta + 2.0, mu, a, b);
        B[j] = (m1 - a * A[j]) / dt;
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
    {
        double s = 0.0;
        for (std::size_t j = 1; j <= i; ++j)
            s += values[i - j + 1] * (A[j] - B[j]) + values[i - j] * B[j];
        out[i] = s;
    }
    return out;
}

std::vector<double> kernel_convolve_increments(std::vector<double> const& increments, double dt,
                                               double beta, double mu)
{
    if (!(beta > -1.0))
        throw ConfigError("kernel_convolve_increments: exponent must exceed -1");
    std::size_t const n = increments.size() + 1;
    std::vector<double> A(n);
    for (std::size_t j = 1; j < n; ++j)
        A[j] = gamma_moment(beta + 1.0, mu, (j - 1) * dt, j * dt) / dt;
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
    {
        double s = 0.0;
        for (std::size_t j = 1; j <= i; ++j)
            s += increments[i - j] * A[j];
        out[i] = s;
    }
    return out;
}

FactorizationCheck factorization_deterministic_check(double alpha, double mu, double omega, double T,
                                                     int steps)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("factorization check: alpha must lie in (0, 1)");
    if (steps < 2 || !(T > 0.0))
        throw ConfigError("factorization check: need T > 0 and steps >= 2");
    double const dt = T / steps;
    std::vector<double> h(steps + 1);
    for (int i = 0; i <= steps; ++i)
        h[i] = std::sin(omega * i * dt);
    auto const big_gamma = kernel_convolve_linear(h, dt, -alpha, mu);
    auto const gamma = kernel_convolve_linear(big_gamma, dt, alpha - 1.0, mu);

    FactorizationCheck out;
    out.factorized = factorization_constant(alpha) * gamma.back();
    out.direct = (mu * std::sin(omega * T) - omega * std::cos(omega * T) + omega * std::exp(-mu * T))
                 / (mu * mu + omega * omega);
    out.relative_error = std::abs(out.factorized - out.direct) / std::abs(out.direct);
    return out;
}

FactorizationResult factorized_convolution(Domain const& d, Field const& x, NoiseModel const& noise,
                                           SdeParams const& p, double T, double alpha)
{
    check_factorization_feasible(alpha, p.kstar, p.pstar);
    int const m = d.modes();
    long const nsteps = std::lround(T / p.dt);
    if (nsteps < 2)
        throw ConfigError("factorized_convolution: need at least two steps");
    double const sqrt_dt = std::sqrt(p.dt);

    // Mode-major increments int G dW over each step, projected.
    std::vector<std::vector<double>> inc(m, std::vector<double>(nsteps, 0.0));
    RunOptions ro;
    ro.store_path = false;
    ro.observe_nodes = false;
    ro.hook = [&](long step, std::span<const double>, std::span<const double>,
                  std::span<const double> zh) {
        for (int k = 0; k < m; ++k)
            inc[k][step] = sqrt_dt * zh[k];
    };
    SdeParams q = p;
    q.record_every = 1;
    simulate(d, x, noise, q, nsteps * p.dt, nullptr, ro);

    // Both routes read each increment as a constant density over its step, so
    // they differ only by the factorization quadrature.
    std::vector<std::vector<double>> direct(m), factorized(m), big(m);
    double const c_alpha = factorization_constant(alpha);
    for (int k = 0; k < m; ++k)
    {
        double const mu = d.eigenvalues()[k] + p.lambda;
        direct[k] = kernel_convolve_increments(inc[k], p.dt, 0.0, mu);
        big[k] = kernel_convolve_increments(inc[k], p.dt, -alpha, mu);
        factorized[k] = kernel_convolve_linear(big[k], p.dt, alpha - 1.0, mu);
        for (double& v : factorized[k])
            v *= c_alpha;
    }

    FactorizationResult out;
    out.gamma_direct.dt = out.gamma_factorized.dt = p.dt;
    std::vector<double> cd(m), cf(m), cg(m);
    for (long i = 0; i <= nsteps; ++i)
    {
        for (int k = 0; k < m; ++k)
        {
            cd[k] = direct[k][i];
            cf[k] = factorized[k][i];
            cg[k] = big[k][i];
        }
        out.gamma_direct.fields.push_back(Field{d.to_grid(cd), Boundary::zero_dirichlet});
        out.gamma_factorized.fields.push_back(Field{d.to_grid(cf), Boundary::zero_dirichlet});
        double const norm = lp_norm(d, Field{d.to_grid(cg), Boundary::zero_dirichlet}, p.pstar);
        out.gamma_alpha_norm.push_back(norm);
        out.sup_gamma_alpha_norm = std::max(out.sup_gamma_alpha_norm, norm);
    }
    return out;
}

EmpiricalMeasure sample_invariant(Domain const& d, NoiseModel const& noise, SdeParams const& p,
                                  SamplingPlan const& plan, Profile const& profile)
{
    p.validate(d);
    if (!(p.eps > 0.0))
        throw ConfigError("invariant sampling needs eps > 0");
    if (plan.n_chains < 1 || plan.samples_per_chain < 1)
        throw ConfigError("invariant sampling needs n_chains >= 1 and samples_per_chain >= 1");
    if (!(plan.burn_in >= 0.0) || !(plan.stride > 0.0))
        throw ConfigError("invariant sampling needs burn_in >= 0 and stride > 0");
    long const burn_steps = std::lround(plan.burn_in / p.dt);
    long const stride_steps = std::max(1L, std::lround(plan.stride / p.dt));
    double const T = (burn_steps + stride_steps * (plan.samples_per_chain - 1)) * p.dt;

    EmpiricalMeasure em;
    em.eps = p.eps;
    em.n_chains = plan.n_chains;
    em.burn_in = burn_steps * p.dt;
    em.stride = stride_steps * p.dt;
    em.dt = p.dt;
    em.kstar = p.kstar;
    em.pstar = p.pstar;
    long const total = static_cast<long>(plan.n_chains) * plan.samples_per_chain;
    if (total < 100)
        em.warnings.push_back("under-sampled: " + std::to_string(total)
                              + " samples < 100; tail estimates are unreliable");
    if (plan.relaxation > 0.0 && em.burn_in < 5.0 * plan.relaxation)
    {
        std::ostringstream os;
        os << "burn-in " << em.burn_in << " is shorter than 5 x relaxation time "
           << plan.relaxation;
        em.warnings.push_back(os.str());
    }

    std::vector<std::vector<Sample>> per_chain(plan.n_chains);
    std::vector<double> min_g(plan.n_chains, noise.g0);
    std::vector<std::string> errors(plan.n_chains);
    std::atomic<int> next{0};

    auto worker = [&]() {
        for (;;)
        {
            int const chain = next.fetch_add(1);
            if (chain >= plan.n_chains)
                return;
            try
            {
                SdeParams q = p;
                q.chain = static_cast<std::uint32_t>(chain);
                q.record_every = 1;
                auto& out = per_chain[chain];
                out.reserve(plan.samples_per_chain);
                RunOptions ro;
                ro.store_path = false;
                ro.observe_nodes = false;
                ro.on_record = [&](long step, std::span<const double> z) {
                    if (step < burn_steps || (step - burn_steps) % stride_steps != 0)
                        return;
                    Field const ubar{std::vector<double>(z.begin(), z.end()),
                                     Boundary::zero_dirichlet};
                    out.push_back(
                        Sample{chain, observe(d, ubar, step * p.dt, &profile, p.kstar, p.pstar)});
                };
                Trajectory const tr = simulate(d, zero_field(d), noise, q, T, nullptr, ro);
                min_g[chain] = tr.min_intensity;
            }
            catch (std::exception const& e)
            {
                errors[chain] = e.what();
            }
        }
    };

    int const threads = std::max(1, std::min(plan.threads, plan.n_chains));
    if (threads == 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    em.min_intensity = noise.g0;
    for (int chain = 0; chain < plan.n_chains; ++chain)
    {
        if (!errors[chain].empty())
            throw NumericalError("chain " + std::to_string(chain) + ": " + errors[chain]);
        em.samples.insert(em.samples.end(), per_chain[chain].begin(), per_chain[chain].end());
        em.min_intensity = std::min(em.min_intensity, min_g[chain]);
    }
    return em;
}

}  // namespace acldp
