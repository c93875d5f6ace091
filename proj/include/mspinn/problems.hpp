#pragma once

#include <array>
#include <memory>
#include <string>

#include "mspinn/autodiff.hpp"

namespace mspinn::problems {

using autodiff::DerivativeBundle;

/// Derivative of one residual component with respect to one output
/// component's bundle entries. Inputs are at most 2-D here.
struct BundleSeed {
  Real d_value = 0.0;
  std::array<Real, 2> d_gradient{0.0, 0.0};
  std::array<Real, 2> d_hessian{0.0, 0.0};
};

/// Residual components at one point plus their bundle Jacobian.
/// seed(c, o) = derivative of residual component c with respect to the
/// bundle of output component o.
struct PointResidual {
  std::array<Real, 2> r{0.0, 0.0};
  int components = 0;
  std::array<BundleSeed, 4> seeds{};

  BundleSeed& seed(int c, int o) { return seeds[static_cast<std::size_t>(2 * c + o)]; }
  const BundleSeed& seed(int c, int o) const {
    return seeds[static_cast<std::size_t>(2 * c + o)];
  }
};

/// A PDE benchmark: residual operators, condition sets, collocation
/// sampling, and (when available) a reference solution. All members are pure
/// functions of their inputs; instances are safe to share across threads.
class Problem {
public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual int output_dim() const = 0;
  virtual const Domain& domain() const = 0;
  virtual bool time_dependent() const = 0;  // axis 1 is time, with an initial set

  virtual void interior_residual(const VecX& x, std::span<const DerivativeBundle> u,
                                 PointResidual& out, bool want_seeds) const = 0;
  virtual void boundary_residual(const VecX& x, std::span<const DerivativeBundle> u,
                                 PointResidual& out, bool want_seeds) const = 0;
  virtual void initial_residual(const VecX& x, std::span<const DerivativeBundle> u,
                                PointResidual& out, bool want_seeds) const;

  /// Uniform random interior points (rows).
  MatX sample_interior(int n, std::uint64_t seed) const;
  /// Boundary points split equally among the boundary segments.
  virtual MatX sample_boundary(int n, std::uint64_t seed) const = 0;
  virtual MatX sample_initial(int n, std::uint64_t seed) const;

  virtual bool has_reference() const = 0;
  virtual VecX reference(const VecX& x) const = 0;
};

// ---------------------------------------------------------------------------
// Burgers: u_t + u u_x = nu u_xx on x in [-1,1], t in [0,1],
// u(+-1, t) = 0, u(x, 0) = -sin(pi x).
// ---------------------------------------------------------------------------

/// Pointwise Burgers equation residual u_t + u u_x - nu u_xx.
Real burgers_residual(Real u, Real u_t, Real u_x, Real u_xx, Real nu);

/// Condition targets: boundary residual is u itself at x = +-1; initial
/// residual is u + sin(pi x) at t = 0. Throws if the point is on neither set.
enum class ConditionKind { boundary, initial };
Real burgers_condition_residual(ConditionKind kind, Real x, Real t, Real u);

/// Cole-Hopf closed-form reference evaluated with Gauss-Hermite quadrature;
/// node count is doubled until the value moves by < 1e-10 (throws on
/// non-convergence). t = 0 returns the initial condition.
Real burgers_reference(Real x, Real t, Real nu);

class BurgersProblem final : public Problem {
public:
  explicit BurgersProblem(Real viscosity = 1.0);

  Real viscosity() const { return viscosity_; }

  std::string name() const override { return "burgers"; }
  int output_dim() const override { return 1; }
  const Domain& domain() const override { return domain_; }
  bool time_dependent() const override { return true; }

  void interior_residual(const VecX& x, std::span<const DerivativeBundle> u,
                         PointResidual& out, bool want_seeds) const override;
  void boundary_residual(const VecX& x, std::span<const DerivativeBundle> u,
                         PointResidual& out, bool want_seeds) const override;
  void initial_residual(const VecX& x, std::span<const DerivativeBundle> u,
                        PointResidual& out, bool want_seeds) const override;

  MatX sample_boundary(int n, std::uint64_t seed) const override;
  MatX sample_initial(int n, std::uint64_t seed) const override;

  bool has_reference() const override { return true; }
  VecX reference(const VecX& x) const override;

private:
  Real viscosity_;
  Domain domain_;
};

// ---------------------------------------------------------------------------
// Helmholtz: scattering of a plane wave by a dielectric disk of radius R
// centered at the origin, domain [-1,1]^2, first-order absorbing boundary on
// the outer square. Units are normalized so the vacuum light speed is 1 and
// eps0 = mu0 = 1; a 300 MHz excitation over the 1 m-scaled domain gives
// k = omega = 2*pi. The incident wave is the complex plane wave e^{ikx}
// (real part cos kx), matching the e^{+i n theta} / H^{(1)} convention of
// the analytic series.
// ---------------------------------------------------------------------------

struct HelmholtzConfig {
  Real omega = kTwoPi;
  Real eps_r = 1.0;
  Real radius = 0.25;
  int n_trunc = 15;
};

class HelmholtzProblem final : public Problem {
public:
  explicit HelmholtzProblem(HelmholtzConfig cfg = {});

  const HelmholtzConfig& config() const { return cfg_; }
  Real wavenumber() const { return cfg_.omega; }            // exterior K
  Real interior_wavenumber() const { return k_interior_; }  // K_i = K sqrt(eps_r)

  /// Mie expansion coefficients (even in the order index).
  std::complex<Real> mie_alpha(int n) const;
  std::complex<Real> mie_beta(int n) const;

  /// Analytic series solution in polar coordinates, (E_rz, E_iz).
  std::array<Real, 2> mie_solution(Real r, Real theta) const;

  /// Relative permittivity map; the disk rim belongs to the interior.
  Real permittivity(Real x, Real y) const;

  /// Outward unit normal of the outer square at a boundary point.
  std::array<Real, 2> boundary_normal(const VecX& x) const;

  /// Incident field and the absorbing-boundary source terms at a point.
  std::array<Real, 2> incident_field(Real x, Real y) const;
  std::array<Real, 2> abc_source(const VecX& x) const;

  std::string name() const override { return "helmholtz"; }
  int output_dim() const override { return 2; }
  const Domain& domain() const override { return domain_; }
  bool time_dependent() const override { return false; }

  void interior_residual(const VecX& x, std::span<const DerivativeBundle> u,
                         PointResidual& out, bool want_seeds) const override;
  void boundary_residual(const VecX& x, std::span<const DerivativeBundle> u,
                         PointResidual& out, bool want_seeds) const override;

  MatX sample_boundary(int n, std::uint64_t seed) const override;

  bool has_reference() const override { return true; }
  VecX reference(const VecX& x) const override;

private:
  HelmholtzConfig cfg_;
  Domain domain_;
  Real k_interior_;
  std::vector<std::complex<Real>> alpha_, beta_;
};

/// Helmholtz equation residual from precomputed Laplacians:
/// lap(E) + omega^2 mu eps(x,y) E, componentwise.
std::array<Real, 2> helmholtz_residual(Real lap_re, Real lap_im, Real e_re, Real e_im,
                                       Real x, Real y, const HelmholtzProblem& p);

/// First-order absorbing boundary residual for the TMz field, scalarized as
/// (d_n - i k) applied to E_rz + i E_iz, minus the same operator applied to
/// the incident wave. `grad_*` are the field gradients at the point.
std::array<Real, 2> abc_residual(Real e_re, Real e_im, const std::array<Real, 2>& grad_re,
                                 const std::array<Real, 2>& grad_im, const VecX& x,
                                 const HelmholtzProblem& p);

}  // namespace mspinn::problems
