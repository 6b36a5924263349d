#include "acldp/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "acldp/errors.hpp"

namespace acldp {

namespace {

// FFTW's planner is not reentrant; execution of an existing plan on new
// arrays is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

std::vector<double>& scratch(int which, std::size_t n)
{
    thread_local std::vector<double> buf[2];
    auto& b = buf[which];
    if (b.size() < n)
        b.resize(n);
    return b;
}

}  // namespace

struct Domain::Plan
{
    fftw_plan dst = nullptr;

    explicit Plan(int n)
    {
        std::vector<double> in(n), out(n);
        std::lock_guard lock(planner_mutex());
        dst = fftw_plan_r2r_1d(n, in.data(), out.data(), FFTW_RODFT00,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    ~Plan()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(dst);
    }
    Plan(Plan const&) = delete;
    Plan& operator=(Plan const&) = delete;
};

Domain::Domain(double half_length, int n, int modes)
    : half_length_(half_length), n_(n), modes_(modes)
{
    if (!(half_length > 0.0) || !std::isfinite(half_length))
        throw ConfigError("domain: L must be positive, got " + std::to_string(half_length));
    if (n < 8)
        throw ConfigError("domain: n must be at least 8, got " + std::to_string(n));
    if (modes < 1 || modes > n)
        throw ConfigError("domain: modes must lie in [1, n], got modes="
                          + std::to_string(modes) + " n=" + std::to_string(n));

    h_ = 2.0 * half_length / (n + 1);
    grid_.resize(n);
    ramp_.resize(n);
    for (int j = 0; j < n; ++j)
    {
        grid_[j] = -half_length + (j + 1) * h_;
        ramp_[j] = grid_[j] / half_length;
    }
    eigenvalues_.resize(modes);
    sign_.resize(modes);
    for (int k = 1; k <= modes; ++k)
    {
        double const w = k * std::numbers::pi / (2.0 * half_length);
        eigenvalues_[k - 1] = w * w;
        sign_[k - 1] = (k % 4 == 0 || k % 4 == 1) ? 1.0 : -1.0;
    }
    plan_ = std::make_shared<const Plan>(n);
}

double Domain::eigenvalue(int k) const
{
    if (k < 1 || k > modes_)
        throw ConfigError("eigenvalue index out of range: " + std::to_string(k));
    return eigenvalues_[k - 1];
}

void Domain::to_modes(std::span<const double> values, std::span<double> coeffs) const
{
    if (static_cast<int>(values.size()) != n_ || static_cast<int>(coeffs.size()) != modes_)
        throw ConfigError("to_modes: size mismatch");
    auto& in = scratch(0, n_);
    auto& out = scratch(1, n_);
    std::copy(values.begin(), values.end(), in.begin());
    fftw_execute_r2r(plan_->dst, in.data(), out.data());
    double const scale = h_ / (2.0 * std::sqrt(half_length_));
    for (int k = 0; k < modes_; ++k)
        coeffs[k] = scale * sign_[k] * out[k];
}

std::vector<double> Domain::to_modes(std::span<const double> values) const
{
    std::vector<double> c(modes_);
    to_modes(values, c);
    return c;
}

void Domain::to_grid(std::span<const double> coeffs, std::span<double> values) const
{
    int const m = static_cast<int>(coeffs.size());
    if (m > modes_ || static_cast<int>(values.size()) != n_)
        throw ConfigError("to_grid: size mismatch");
    auto& in = scratch(0, n_);
    auto& out = scratch(1, n_);
    for (int k = 0; k < m; ++k)
        in[k] = sign_[k] * coeffs[k];
    std::fill(in.begin() + m, in.begin() + n_, 0.0);
    fftw_execute_r2r(plan_->dst, in.data(), out.data());
    double const scale = 1.0 / (2.0 * std::sqrt(half_length_));
    for (int j = 0; j < n_; ++j)
        values[j] = scale * out[j];
}

std::vector<double> Domain::to_grid(std::span<const double> coeffs) const
{
    std::vector<double> v(n_);
    to_grid(coeffs, v);
    return v;
}

double Domain::integrate(std::span<const double> values, double left, double right) const
{
    double s = 0.5 * (left + right);
    for (double v : values)
        s += v;
    return h_ * s;
}

double Domain::inner(std::span<const double> a, std::span<const double> b) const
{
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        s += a[j] * b[j];
    return h_ * s;
}

bool Domain::same_as(Domain const& other) const
{
    return half_length_ == other.half_length_ && n_ == other.n_ && modes_ == other.modes_;
}

Field zero_field(Domain const& d)
{
    return Field{std::vector<double>(d.size(), 0.0), Boundary::zero_dirichlet};
}

Field ramp_field(Domain const& d)
{
    return Field{std::vector<double>(d.ramp().begin(), d.ramp().end()), Boundary::ramp_dirichlet};
}

Field add_ramp(Domain const& d, Field const& ubar)
{
    if (ubar.bc != Boundary::zero_dirichlet)
        throw ConfigError("add_ramp: expected a zero-Dirichlet field");
    Field u{ubar.values, Boundary::ramp_dirichlet};
    for (int j = 0; j < d.size(); ++j)
        u.values[j] += d.ramp()[j];
    return u;
}

Field remove_ramp(Domain const& d, Field const& u)
{
    if (u.bc != Boundary::ramp_dirichlet)
        throw ConfigError("remove_ramp: expected a ramp-Dirichlet field");
    Field ubar{u.values, Boundary::zero_dirichlet};
    for (int j = 0; j < d.size(); ++j)
        ubar.values[j] -= d.ramp()[j];
    return ubar;
}

double left_value(Boundary bc) { return bc == Boundary::ramp_dirichlet ? -1.0 : 0.0; }
double right_value(Boundary bc) { return bc == Boundary::ramp_dirichlet ? 1.0 : 0.0; }

Field basis_eval(Domain const& d, int k)
{
    if (k < 1 || k > d.modes())
        throw ConfigError("basis_eval: k must lie in [1, modes], got " + std::to_string(k));
    double const L = d.half_length();
    double const w = k * std::numbers::pi / (2.0 * L);
    Field f = zero_field(d);
    for (int j = 0; j < d.size(); ++j)
    {
        double const x = d.grid()[j];
        f.values[j] = (k % 2 == 0 ? std::sin(w * x) : std::cos(w * x)) / std::sqrt(L);
    }
    return f;
}

namespace {

void require_zero_bc(Field const& f, char const* what)
{
    if (f.bc != Boundary::zero_dirichlet)
        throw ConfigError(std::string(what)
                          + ": ramp-Dirichlet input; subtract the ramp psi first");
}

}  // namespace

std::vector<double> spectral_transform(Domain const& d, Field const& f)
{
    require_zero_bc(f, "spectral_transform");
    return d.to_modes(f.values);
}

Field inverse_transform(Domain const& d, std::span<const double> coeffs)
{
    return Field{d.to_grid(coeffs), Boundary::zero_dirichlet};
}

Field laplacian_apply(Domain const& d, Field const& f)
{
    require_zero_bc(f, "laplacian_apply");
    auto c = d.to_modes(f.values);
    for (int k = 0; k < d.modes(); ++k)
        c[k] *= -d.eigenvalues()[k];
    return inverse_transform(d, c);
}

Field semigroup_apply(Domain const& d, Field const& f, double t, double damping)
{
    require_zero_bc(f, "semigroup_apply");
    if (t < 0.0)
        throw ConfigError("semigroup_apply: negative time");
    if (damping < 0.0)
        throw ConfigError("semigroup_apply: negative damping");
    if (t == 0.0)
        return f;
    auto c = d.to_modes(f.values);
    for (int k = 0; k < d.modes(); ++k)
        c[k] *= std::exp(-(d.eigenvalues()[k] + damping) * t);
    return inverse_transform(d, c);
}

double lp_norm(Domain const& d, Field const& f, double p)
{
    if (!(p >= 1.0))
        throw ConfigError("lp_norm: p must be >= 1");
    double const a = std::pow(std::abs(left_value(f.bc)), p);
    double const b = std::pow(std::abs(right_value(f.bc)), p);
    double s = 0.5 * (a + b);
    for (double v : f.values)
        s += std::pow(std::abs(v), p);
    return std::pow(d.spacing() * s, 1.0 / p);
}

double sup_norm(Field const& f)
{
    double m = std::max(std::abs(left_value(f.bc)), std::abs(right_value(f.bc)));
    for (double v : f.values)
        m = std::max(m, std::abs(v));
    return m;
}

double sobolev_norm(Domain const& d, Field const& f, double kstar, int pstar)
{
    require_zero_bc(f, "sobolev_norm");
    if (pstar < 2 || pstar % 2 != 0)
        throw ConfigError("sobolev_norm: pstar must be an even integer >= 2, got "
                          + std::to_string(pstar));
    if (kstar < 0.0 || kstar >= 1.0)
        throw ConfigError("sobolev_norm: kstar must lie in [0, 1)");
    if (kstar == 0.0)
        return lp_norm(d, f, pstar);
    auto c = d.to_modes(f.values);
    for (int k = 0; k < d.modes(); ++k)
        c[k] *= std::pow(d.eigenvalues()[k], 0.5 * kstar);
    return lp_norm(d, inverse_transform(d, c), pstar);
}

double h1_norm_squared(Domain const& d, Field const& f)
{
    require_zero_bc(f, "h1_norm_squared");
    auto const c = d.to_modes(f.values);
    double s = 0.0;
    for (int k = 0; k < d.modes(); ++k)
        s += (1.0 + d.eigenvalues()[k]) * c[k] * c[k];
    return s;
}

}  // namespace acldp
