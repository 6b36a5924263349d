#include "acldp/action.hpp"

#include <ceres/ceres.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "acldp/errors.hpp"
#include "integrator.hpp"

namespace acldp {

namespace {

// Value (and optionally the node gradient) of the discrete action for grid
// vectors z[0..N].
double evaluate(Domain const& d, std::vector<std::vector<double>> const& z, double dt,
                NoiseModel const& noise, std::vector<double>* residual_norms,
                std::vector<std::vector<double>>* grad)
{
    int const n = d.size();
    int const m = d.modes();
    int const steps = static_cast<int>(z.size()) - 1;
    double const h = d.spacing();
    auto const psi = d.ramp();
    auto const grid = d.grid();

    std::vector<double> mid(n), lap(n), coeffs(m), r(n), g(n), a(n), b(n), fp(n), lap_a(n);
    std::vector<std::vector<double>> am, mm;
    if (grad)
    {
        am.assign(steps, std::vector<double>(n));
        mm.assign(steps, std::vector<double>(n));
    }
    if (residual_norms)
        residual_norms->assign(steps, 0.0);

    double total = 0.0;
    for (int s = 0; s < steps; ++s)
    {
        double const t = (s + 0.5) * dt;
        for (int j = 0; j < n; ++j)
            mid[j] = 0.5 * (z[s][j] + z[s + 1][j]);
        d.to_modes(mid, coeffs);
        for (int k = 0; k < m; ++k)
            coeffs[k] *= -d.eigenvalues()[k];
        d.to_grid(coeffs, lap);

        double sum = 0.0, rsum = 0.0;
        for (int j = 0; j < n; ++j)
        {
            double const u = mid[j] + psi[j];
            r[j] = (z[s + 1][j] - z[s][j]) / dt - lap[j] - (u - u * u * u);
            g[j] = noise.value(t, grid[j], u);
            double const q = r[j] / g[j];
            sum += q * q;
            rsum += r[j] * r[j];
        }
        total += 0.5 * dt * h * sum;
        if (residual_norms)
            (*residual_norms)[s] = std::sqrt(h * rsum);

        if (grad)
        {
            for (int j = 0; j < n; ++j)
            {
                double const u = mid[j] + psi[j];
                double const g2 = g[j] * g[j];
                a[j] = r[j] / g2;
                b[j] = r[j] * r[j] * noise.slope(t, grid[j], u) / (g2 * g[j]);
                fp[j] = 1.0 - 3.0 * u * u;
            }
            d.to_modes(a, coeffs);
            for (int k = 0; k < m; ++k)
                coeffs[k] *= -d.eigenvalues()[k];
            d.to_grid(coeffs, lap_a);
            for (int j = 0; j < n; ++j)
            {
                am[s][j] = a[j];
                mm[s][j] = -lap_a[j] - fp[j] * a[j] - b[j];
            }
        }
    }

    if (grad)
    {
        grad->assign(steps + 1, std::vector<double>(n, 0.0));
        for (int node = 0; node <= steps; ++node)
        {
            auto& gn = (*grad)[node];
            for (int j = 0; j < n; ++j)
            {
                double v = 0.0;
                if (node > 0)
                    v += h * am[node - 1][j] + 0.5 * dt * h * mm[node - 1][j];
                if (node < steps)
                    v += -h * am[node][j] + 0.5 * dt * h * mm[node][j];
                gn[j] = v;
            }
        }
    }
    return total;
}

std::vector<std::vector<double>> node_values(Path const& p)
{
    std::vector<std::vector<double>> z;
    z.reserve(p.fields.size());
    for (auto const& f : p.fields)
        z.push_back(f.values);
    return z;
}

}  // namespace

ActionResult action(Domain const& d, Path const& path, NoiseModel const& noise)
{
    validate_path(d, path);
    noise.validate();
    ActionResult out;
    out.value = evaluate(d, node_values(path), path.dt, noise, &out.residual_series, nullptr);
    out.path = path;
    return out;
}

std::vector<std::vector<double>> action_gradient(Domain const& d, Path const& path,
                                                 NoiseModel const& noise)
{
    validate_path(d, path);
    noise.validate();
    std::vector<std::vector<double>> g;
    evaluate(d, node_values(path), path.dt, noise, nullptr, &g);
    return g;
}

Path interpolation_path(Field const& a, Field const& b, int steps)
{
    if (steps < 1)
        throw ConfigError("interpolation_path: steps must be >= 1");
    if (a.bc != b.bc || a.values.size() != b.values.size())
        throw ConfigError("interpolation_path: endpoints must share boundary class and size");
    Path p;
    p.dt = 1.0 / steps;
    for (int i = 0; i <= steps; ++i)
    {
        Field f = a;
        if (i == steps)
            f = b;
        else
        {
            double const s = static_cast<double>(i) / steps;
            for (std::size_t j = 0; j < f.values.size(); ++j)
                f.values[j] = (1.0 - s) * a.values[j] + s * b.values[j];
        }
        p.fields.push_back(std::move(f));
    }
    return p;
}

Path reversed_path(Path const& p)
{
    Path r;
    r.dt = p.dt;
    r.t0 = p.t0;
    r.fields.assign(p.fields.rbegin(), p.fields.rend());
    return r;
}

Path reversed_flow_path(Domain const& d, Field const& zeta, double t_star, double dt)
{
    if (!(t_star > 0.0))
        throw ConfigError("reversed_flow_path: t_star must be positive");
    FlowOptions o;
    o.dt = dt;
    o.T = t_star;
    o.stop_tol = 0.0;
    // Keep zeta itself as the final node rather than its projection.
    Path p = gradient_flow(d, zeta, o).path;
    p.fields.front() = zeta;
    return reversed_path(p);
}

Path concatenate(Path const& first, Path const& second)
{
    if (first.fields.empty() || second.fields.empty())
        throw ConfigError("concatenate: empty path");
    if (std::abs(first.dt - second.dt) > 1e-12 * first.dt)
        throw ConfigError("concatenate: paths must share dt");
    Path out = first;
    out.fields.insert(out.fields.end(), second.fields.begin() + 1, second.fields.end());
    return out;
}

Path quasipotential_path(Domain const& d, Profile const& p, Field const& zeta, double t_star,
                         double dt)
{
    int const unit_steps = static_cast<int>(std::lround(1.0 / dt));
    if (std::abs(unit_steps * dt - 1.0) > 1e-9)
        throw ConfigError("quasipotential path: 1/dt must be an integer");
    Path const back = reversed_flow_path(d, zeta, t_star, dt);
    Path const bridge = interpolation_path(remove_ramp(d, p.m), back.fields.front(), unit_steps);
    return concatenate(bridge, back);
}

ActionResult quasipotential_upper(Domain const& d, Profile const& p, Field const& zeta,
                                  NoiseModel const& noise, double t_star, double dt)
{
    return action(d, quasipotential_path(d, p, zeta, t_star, dt), noise);
}

namespace {

// Per-mode Cholesky factor of the tridiagonal quadratic part of the action
// over interior nodes: diagonal dt (a^2 + b^2), off-diagonal -dt a b with
// a = 1/dt + lambda/2, b = 1/dt - lambda/2.
struct Preconditioner
{
    int nodes = 0;
    int modes = 0;
    std::vector<double> diag;  // [mode][node]
    std::vector<double> sub;   // [mode][node], sub[0] unused

    Preconditioner(Domain const& d, int interior, double dt, double scale)
        : nodes(interior), modes(d.modes()), diag(modes * interior), sub(modes * interior)
    {
        for (int k = 0; k < modes; ++k)
        {
            double const lam = d.eigenvalues()[k];
            double const a = 1.0 / dt + 0.5 * lam, b = 1.0 / dt - 0.5 * lam;
            double const hd = scale * dt * (a * a + b * b);
            double const ho = -scale * dt * a * b;
            double* dk = &diag[k * nodes];
            double* sk = &sub[k * nodes];
            dk[0] = std::sqrt(hd);
            for (int i = 1; i < nodes; ++i)
            {
                sk[i] = ho / dk[i - 1];
                dk[i] = std::sqrt(hd - sk[i] * sk[i]);
            }
        }
    }

    // c = L^{-T} y for one mode (in place); L lower bidiagonal.
    void to_coeffs(int k, double* v) const
    {
        double const* dk = &diag[k * nodes];
        double const* sk = &sub[k * nodes];
        v[nodes - 1] /= dk[nodes - 1];
        for (int i = nodes - 2; i >= 0; --i)
            v[i] = (v[i] - sk[i + 1] * v[i + 1]) / dk[i];
    }

    // y = L^T c.
    void to_vars(int k, double* v) const
    {
        double const* dk = &diag[k * nodes];
        double const* sk = &sub[k * nodes];
        for (int i = 0; i + 1 < nodes; ++i)
            v[i] = dk[i] * v[i] + sk[i + 1] * v[i + 1];
        v[nodes - 1] *= dk[nodes - 1];
    }

    // g_y = L^{-1} g_c.
    void gradient_to_vars(int k, double* v) const
    {
        double const* dk = &diag[k * nodes];
        double const* sk = &sub[k * nodes];
        v[0] /= dk[0];
        for (int i = 1; i < nodes; ++i)
            v[i] = (v[i] - sk[i] * v[i - 1]) / dk[i];
    }
};

class ActionObjective final : public ceres::FirstOrderFunction
{
  public:
    ActionObjective(Domain const& d, NoiseModel const& noise, Path const& init, Preconditioner const& pc)
        : d_(d), noise_(noise), dt_(init.dt), pc_(pc), z_(node_values(init))
    {
    }

    int NumParameters() const override { return pc_.nodes * pc_.modes; }

    bool Evaluate(double const* params, double* cost, double* gradient) const override
    {
        unpack(params, z_);
        std::vector<std::vector<double>> g;
        double const v = evaluate(d_, z_, dt_, noise_, nullptr, gradient ? &g : nullptr);
        if (!std::isfinite(v))
            return false;
        *cost = v;
        if (gradient)
        {
            int const N = pc_.nodes, M = pc_.modes;
            std::vector<double> gc(M);
            std::vector<double> col(N);
            double const inv_h = 1.0 / d_.spacing();
            for (int i = 0; i < N; ++i)
            {
                d_.to_modes(g[i + 1], gc);
                for (int k = 0; k < M; ++k)
                    gradient[k * N + i] = gc[k] * inv_h;
            }
            for (int k = 0; k < M; ++k)
                pc_.gradient_to_vars(k, gradient + k * N);
        }
        return true;
    }

    // Parameters are mode-major: params[k * nodes + i].
    void unpack(double const* params, std::vector<std::vector<double>>& z) const
    {
        int const N = pc_.nodes, M = pc_.modes;
        std::vector<double> col(N);
        coeffs_.assign(static_cast<std::size_t>(N) * M, 0.0);
        for (int k = 0; k < M; ++k)
        {
            std::copy(params + k * N, params + (k + 1) * N, col.begin());
            pc_.to_coeffs(k, col.data());
            for (int i = 0; i < N; ++i)
                coeffs_[static_cast<std::size_t>(i) * M + k] = col[i];
        }
        for (int i = 0; i < N; ++i)
            d_.to_grid(std::span<const double>(&coeffs_[static_cast<std::size_t>(i) * M], M), z[i + 1]);
    }

    std::vector<double> pack(Path const& p) const
    {
        int const N = pc_.nodes, M = pc_.modes;
        std::vector<double> params(static_cast<std::size_t>(N) * M);
        for (int i = 0; i < N; ++i)
        {
            auto const c = d_.to_modes(p.fields[i + 1].values);
            for (int k = 0; k < M; ++k)
                params[k * N + i] = c[k];
        }
        for (int k = 0; k < M; ++k)
            pc_.to_vars(k, params.data() + k * N);
        return params;
    }

    Path to_path(double const* params, Path const& init) const
    {
        unpack(params, z_);
        Path p = init;
        for (int i = 1; i < static_cast<int>(p.fields.size()) - 1; ++i)
            p.fields[i].values = z_[i];
        return p;
    }

  private:
    Domain const& d_;
    NoiseModel const& noise_;
    double dt_;
    Preconditioner const& pc_;
    mutable std::vector<std::vector<double>> z_;
    mutable std::vector<double> coeffs_;
};

}  // namespace

ActionResult mam_minimize(Domain const& d, NoiseModel const& noise, Path const& init,
                          MamOptions const& opts)
{
    validate_path(d, init);
    noise.validate();
    ActionResult const start = action(d, init, noise);
    if (init.steps() < 2)
        return start;

    int const interior = init.steps() - 1;
    double const g_ref = noise.value(0.0, 0.0, 0.0);
    Preconditioner const pc(d, interior, init.dt, 1.0 / (g_ref * g_ref));
    auto* objective = new ActionObjective(d, noise, init, pc);
    std::vector<double> params = objective->pack(init);
    // Packing projects the interior nodes onto the resolved modes.
    Path const projected = objective->to_path(params.data(), init);
    ceres::GradientProblem problem(objective);

    ceres::GradientProblemSolver::Options o;
    o.line_search_direction_type = ceres::LBFGS;
    o.max_num_iterations = opts.max_iterations;
    o.function_tolerance = opts.function_tolerance;
    o.gradient_tolerance = opts.gradient_tolerance;
    o.logging_type = ceres::SILENT;
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(o, problem, params.data(), &summary);

    ActionResult out = action(d, objective->to_path(params.data(), init), noise);
    out.iterations = static_cast<int>(summary.iterations.size());
    out.converged = summary.termination_type == ceres::CONVERGENCE;
    out.message = summary.message;
    if (!(out.value <= start.value))
    {
        ActionResult keep = start;
        keep.iterations = out.iterations;
        keep.converged = false;
        keep.message = "no descent from the initial path: " + summary.message;
        (void)projected;
        return keep;
    }
    return out;
}

LadderResult mam_ladder(Domain const& d, Profile const& p, Field const& zeta, NoiseModel const& noise,
                        double T0, int rungs, double dt, MamOptions const& opts)
{
    if (!(T0 > 1.0))
        throw ConfigError("action.T0 must exceed 1 (one time unit is spent on the interpolation)");
    if (rungs < 1)
        throw ConfigError("action.ladder must be >= 1");
    LadderResult out;
    out.best.value = std::numeric_limits<double>::infinity();
    double T = T0;
    for (int i = 0; i < rungs; ++i, T *= 2.0)
    {
        Path const init = quasipotential_path(d, p, zeta, T - 1.0, dt);
        ActionResult const r0 = action(d, init, noise);
        ActionResult r = mam_minimize(d, noise, init, opts);
        out.horizons.push_back(T);
        out.initial_values.push_back(r0.value);
        out.values.push_back(r.value);
        if (r.value < out.best.value)
            out.best = std::move(r);
    }
    return out;
}

double lower_sandwich_constant(Path const& path, NoiseModel const& noise)
{
    double sup = 0.0;
    for (auto const& f : path.fields)
        sup = std::max(sup, detail::sup_abs(f.values));
    double const K = std::abs(noise.value_at_zero()) + noise.lipschitz();
    return K * K * (1.0 + sup * sup);
}

}  // namespace acldp
