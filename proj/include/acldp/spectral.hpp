#pragma once

// Discretized interval (-L, L) with the Dirichlet Laplacian diagonalized in
// the basis
//
//   e_k(xi) = cos(k pi xi / 2L) / sqrt(L)   (k odd)
//   e_k(xi) = sin(k pi xi / 2L) / sqrt(L)   (k even)
//
// On the uniform interior grid xi_j = -L + j h, h = 2L/(n+1), these are
// (up to a sign per mode) the DST-I vectors, so transforms are done with an
// FFTW RODFT00 plan and are exactly orthonormal under the trapezoid rule.

#include <memory>
#include <span>
#include <vector>

namespace acldp {

enum class Boundary
{
    zero_dirichlet,  // u(-L) = u(L) = 0, the space E
    ramp_dirichlet,  // u(-L) = -1, u(L) = 1, the affine space of ramp data
};

struct Field
{
    std::vector<double> values;  // interior grid values, length n
    Boundary bc = Boundary::zero_dirichlet;
};

class Domain
{
  public:
    // Throws ConfigError on L <= 0, n < 8, modes < 1 or modes > n.
    Domain(double half_length, int n, int modes);

    double half_length() const { return half_length_; }
    int size() const { return n_; }
    int modes() const { return modes_; }
    double spacing() const { return h_; }

    std::span<const double> grid() const { return grid_; }
    std::span<const double> ramp() const { return ramp_; }
    // lambda_k = (k pi / 2L)^2 stored at index k-1.
    std::span<const double> eigenvalues() const { return eigenvalues_; }
    double eigenvalue(int k) const;

    // c_k = <f, e_k> for k = 1..modes (index k-1). `coeffs` has length modes.
    void to_modes(std::span<const double> values, std::span<double> coeffs) const;
    std::vector<double> to_modes(std::span<const double> values) const;
    // Synthesis from the first coeffs.size() <= modes coefficients.
    void to_grid(std::span<const double> coeffs, std::span<double> values) const;
    std::vector<double> to_grid(std::span<const double> coeffs) const;

    // Composite trapezoid over the closed grid; `left`/`right` are the
    // boundary values at -L and L.
    double integrate(std::span<const double> values, double left = 0.0,
                     double right = 0.0) const;
    double inner(std::span<const double> a, std::span<const double> b) const;

    bool same_as(Domain const& other) const;

  private:
    struct Plan;

    double half_length_;
    int n_;
    int modes_;
    double h_;
    std::vector<double> grid_;
    std::vector<double> ramp_;
    std::vector<double> eigenvalues_;
    std::vector<double> sign_;  // e_k = sign_k * sin(k pi (xi+L)/2L) / sqrt(L)
    std::shared_ptr<const Plan> plan_;
};

Field zero_field(Domain const& d);
Field ramp_field(Domain const& d);

// u = ubar + psi and back. Throws ConfigError on the wrong boundary class.
Field add_ramp(Domain const& d, Field const& ubar);
Field remove_ramp(Domain const& d, Field const& u);

// Boundary values implied by a field's class at -L and +L.
double left_value(Boundary bc);
double right_value(Boundary bc);

Field basis_eval(Domain const& d, int k);

std::vector<double> spectral_transform(Domain const& d, Field const& f);
Field inverse_transform(Domain const& d, std::span<const double> coeffs);

Field laplacian_apply(Domain const& d, Field const& f);
// exp(-(lambda_k + damping) t) per mode; S(0) is the identity on the
// band-limited part.
Field semigroup_apply(Domain const& d, Field const& f, double t, double damping = 0.0);

double lp_norm(Domain const& d, Field const& f, double p);
double sup_norm(Field const& f);
// || (-Delta)^{kstar/2} f ||_{L^pstar}, spectrally.
double sobolev_norm(Domain const& d, Field const& f, double kstar, int pstar);
// sum_k (1 + lambda_k) c_k^2, the squared H^1 norm of a zero-Dirichlet field.
double h1_norm_squared(Domain const& d, Field const& f);

}  // namespace acldp
