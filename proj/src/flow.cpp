#include "acldp/flow.hpp"

#include <cmath>
#include <sstream>

#include "acldp/energy.hpp"
#include "acldp/errors.hpp"
#include "integrator.hpp"

namespace acldp {

void validate_path(Domain const& d, Path const& p)
{
    if (p.fields.size() < 2)
        throw ConfigError("path: needs at least two time nodes");
    if (!(p.dt > 0.0))
        throw ConfigError("path: dt must be positive");
    for (auto const& f : p.fields)
    {
        if (f.bc != Boundary::zero_dirichlet)
            throw ConfigError("path: fields must be zero-Dirichlet (shifted by psi)");
        if (static_cast<int>(f.values.size()) != d.size())
            throw ConfigError("path: field size does not match the domain");
    }
    if (!p.control.empty() && static_cast<int>(p.control.size()) != p.steps())
        throw ConfigError("path: control length must equal the number of steps");
}

Field project(Domain const& d, Field const& f)
{
    if (f.bc != Boundary::zero_dirichlet)
        throw ConfigError("project: expected a zero-Dirichlet field (subtract the ramp psi first)");
    return Field{d.to_grid(d.to_modes(f.values)), Boundary::zero_dirichlet};
}

namespace {

void check_size(Domain const& d, Field const& x, char const* what)
{
    if (x.bc != Boundary::zero_dirichlet)
        throw ConfigError(std::string(what) + ": initial state must be zero-Dirichlet (subtract psi)");
    if (static_cast<int>(x.values.size()) != d.size())
        throw ConfigError(std::string(what) + ": initial state size does not match the domain");
}

void guard(std::span<const double> z, double limit, double t, char const* what)
{
    double const s = detail::sup_abs(z);
    if (!(s <= limit))
    {
        std::ostringstream os;
        os << what << ": sup|z| = " << s << " exceeded " << limit << " at t = " << t
           << "; reduce dt";
        throw NumericalError(os.str());
    }
}

// Pointwise F(z) = (z + psi) - (z + psi)^3.
void reaction_into(Domain const& d, std::span<const double> z, std::span<double> out)
{
    auto const psi = d.ramp();
    for (int j = 0; j < d.size(); ++j)
    {
        double const u = z[j] + psi[j];
        out[j] = u - u * u * u;
    }
}

double resolved_norm(Domain const& d, std::span<const double> c, std::span<const double> fh)
{
    double s = 0.0;
    for (int k = 0; k < d.modes(); ++k)
    {
        double const r = fh[k] - d.eigenvalues()[k] * c[k];
        s += r * r;
    }
    return std::sqrt(s);
}

}  // namespace

FlowResult gradient_flow(Domain const& d, Field const& x, FlowOptions const& opts)
{
    check_size(d, x, "gradient_flow");
    if (!(opts.dt > 0.0) || !(opts.T > 0.0))
        throw ConfigError("gradient_flow: dt and T must be positive");
    if (opts.save_every < 1)
        throw ConfigError("gradient_flow: save_every must be >= 1");

    detail::ExpEuler const stepper(d, opts.dt);
    long const nsteps = std::lround(opts.T / opts.dt);
    int const n = d.size();

    std::vector<double> c = d.to_modes(x.values);
    std::vector<double> z = d.to_grid(c);
    std::vector<double> f(n), fh(d.modes());

    FlowResult out;
    out.path.dt = opts.dt * opts.save_every;
    long step = 0;
    for (;; ++step)
    {
        reaction_into(d, z, f);
        d.to_modes(f, fh);
        double const gnorm = resolved_norm(d, c, fh);
        if (step % opts.save_every == 0)
        {
            out.path.fields.push_back(Field{z, Boundary::zero_dirichlet});
            out.grad_norms.push_back(gnorm);
        }
        if (opts.stop_tol > 0.0 && gnorm < opts.stop_tol)
        {
            out.converged = true;
            break;
        }
        if (step == nsteps)
            break;
        stepper.step(c, fh);
        d.to_grid(c, z);
        guard(z, opts.blowup, (step + 1) * opts.dt, "gradient_flow");
    }
    out.final_state = Field{z, Boundary::zero_dirichlet};
    out.t_final = step * opts.dt;
    if (out.path.fields.size() == 1)
    {
        // Stopped before a second save: keep a two-node path.
        out.path.fields.push_back(out.final_state);
        out.path.dt = std::max(out.t_final, opts.dt);
    }
    return out;
}

Path skeleton_solve(Domain const& d, Field const& x, std::vector<Field> const& control,
                    NoiseModel const& noise, double dt, double blowup)
{
    check_size(d, x, "skeleton_solve");
    if (!(dt > 0.0))
        throw ConfigError("skeleton_solve: dt must be positive");
    if (control.empty())
        throw ConfigError("skeleton_solve: control must have at least one step");
    noise.validate();

    detail::ExpEuler const stepper(d, dt);
    int const n = d.size();
    auto const grid = d.grid();
    auto const psi = d.ramp();

    std::vector<double> c = d.to_modes(x.values);
    std::vector<double> z = d.to_grid(c);
    std::vector<double> f(n), fh(d.modes());

    Path out;
    out.dt = dt;
    out.control = control;
    out.fields.push_back(Field{z, Boundary::zero_dirichlet});
    for (std::size_t step = 0; step < control.size(); ++step)
    {
        if (static_cast<int>(control[step].values.size()) != n)
            throw ConfigError("skeleton_solve: control field size does not match the domain");
        double const t = step * dt;
        reaction_into(d, z, f);
        for (int j = 0; j < n; ++j)
            f[j] = f[j] + noise.value(t, grid[j], z[j] + psi[j]) * control[step].values[j];
        d.to_modes(f, fh);
        stepper.step(c, fh);
        d.to_grid(c, z);
        guard(z, blowup, t + dt, "skeleton_solve");
        out.fields.push_back(Field{z, Boundary::zero_dirichlet});
    }
    return out;
}

double relaxation_time(Domain const& d, double dt, double T)
{
    FlowOptions opts;
    opts.dt = dt;
    opts.T = T;
    opts.stop_tol = 1e-12;
    Field const z_inf = gradient_flow(d, zero_field(d), opts).final_state;

    // The flow from zero stays odd, so the slow even (translation) mode is
    // probed separately by a small kick in the two lowest modes.
    double const kick = 1e-4;
    std::vector<double> c(d.modes(), 0.0);
    c[0] = kick;
    if (d.modes() > 1)
        c[1] = kick;
    auto const bump = d.to_grid(c);
    Field x = z_inf;
    for (int j = 0; j < d.size(); ++j)
        x.values[j] += bump[j];

    // Runs in chunks until the distance has dropped by e^-6 and takes the
    // rate over the last three e-folds.
    auto dist = [&](Field const& z) {
        double s = 0.0;
        for (int j = 0; j < d.size(); ++j)
            s += (z.values[j] - z_inf.values[j]) * (z.values[j] - z_inf.values[j]);
        return std::sqrt(s);
    };
    double const d0 = dist(x);
    std::vector<double> times{0.0}, dists{d0};
    opts.stop_tol = 0.0;
    opts.T = 5.0;
    opts.save_every = std::max(1, static_cast<int>(std::lround(0.05 / dt)));
    Field z = x;
    double t = 0.0;
    while (dists.back() > d0 * std::exp(-6.0))
    {
        if (t >= T)
            throw NumericalError("relaxation_time: slowest mode did not decay within T; increase T");
        FlowResult const r = gradient_flow(d, z, opts);
        for (int i = 1; i <= r.path.steps(); ++i)
        {
            times.push_back(t + r.path.time(i));
            dists.push_back(dist(r.path.fields[i]));
        }
        t += r.t_final;
        z = r.final_state;
    }
    std::size_t last = dists.size() - 1;
    while (last > 0 && dists[last - 1] <= d0 * std::exp(-6.0))
        --last;
    std::size_t mid = last;
    while (mid > 0 && dists[mid - 1] <= dists[last] * std::exp(3.0))
        --mid;
    double const rate = std::log(dists[mid] / dists[last]) / (times[last] - times[mid]);
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw NumericalError("relaxation_time: perturbation did not decay; increase T or refine dt");
    return 1.0 / rate;
}

}  // namespace acldp
