#include "mspinn/problems.hpp"

#include <cmath>
#include <map>

#include "mspinn/specfun.hpp"

namespace mspinn::problems {

void Problem::initial_residual(const VecX&, std::span<const DerivativeBundle>, PointResidual&,
                               bool) const {
  throw InvalidInput(name() + ": problem has no initial-condition set");
}

MatX Problem::sample_interior(int n, std::uint64_t seed) const {
  if (n < 1) throw InvalidInput("sample_interior: n must be >= 1");
  const Domain& dom = domain();
  Rng rng(seed);
  MatX pts(n, dom.dim());
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < dom.dim(); ++a) pts(i, a) = rng.uniform(dom.lo[a], dom.hi[a]);
  }
  return pts;
}

MatX Problem::sample_initial(int, std::uint64_t) const {
  throw InvalidInput(name() + ": problem has no initial-condition set");
}

// ---------------------------------------------------------------------------
// Burgers
// ---------------------------------------------------------------------------

Real burgers_residual(Real u, Real u_t, Real u_x, Real u_xx, Real nu) {
  return u_t + u * u_x - nu * u_xx;
}

Real burgers_condition_residual(ConditionKind kind, Real x, Real t, Real u) {
  constexpr Real tol = 1e-9;
  switch (kind) {
    case ConditionKind::boundary:
      if (std::abs(std::abs(x) - 1.0) > tol) {
        throw InvalidInput("burgers_condition_residual: point not on x = +-1");
      }
      return u;
    case ConditionKind::initial:
      if (std::abs(t) > tol) {
        throw InvalidInput("burgers_condition_residual: point not on t = 0");
      }
      return u + std::sin(kPi * x);
  }
  return 0.0;
}

namespace {

// Gauss-Hermite nodes/weights for integrals against exp(-z^2), via
// Golub-Welsch: eigenvalues of the symmetric tridiagonal Jacobi matrix
// (implicit-QL iteration tracking the first eigenvector row for weights).
// Robust at the large node counts the viscous quotient needs; cached per n.
struct GaussHermite {
  std::vector<Real> nodes, weights;
};

void tridiagonal_eigen_firstrow(std::vector<Real>& d, std::vector<Real>& e,
                                std::vector<Real>& z) {
  const int n = static_cast<int>(d.size());
  e.push_back(0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    for (;;) {
      for (m = l; m < n - 1; ++m) {
        const Real dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-16 * dd) break;
      }
      if (m == l) break;
      if (iter++ == 64) throw std::runtime_error("gauss_hermite: QL iteration stalled");
      Real g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      Real r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
      Real s = 1.0, c = 1.0, p = 0.0;
      int i = m - 1;
      for (; i >= l; --i) {
        Real f = s * e[i];
        const Real b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        f = z[i + 1];
        z[i + 1] = s * z[i] + c * f;
        z[i] = c * z[i] - s * f;
      }
      if (r == 0.0 && i >= l) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

const GaussHermite& gauss_hermite(int n) {
  static std::map<int, GaussHermite> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<Real> d(static_cast<std::size_t>(n), 0.0);
  std::vector<Real> e(static_cast<std::size_t>(n) - 1);
  std::vector<Real> z(static_cast<std::size_t>(n), 0.0);
  for (int j = 1; j < n; ++j) e[static_cast<std::size_t>(j - 1)] = std::sqrt(0.5 * j);
  z[0] = 1.0;
  tridiagonal_eigen_firstrow(d, e, z);

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return d[static_cast<std::size_t>(a)] < d[static_cast<std::size_t>(b)];
  });

  GaussHermite gh;
  gh.nodes.resize(static_cast<std::size_t>(n));
  gh.weights.resize(static_cast<std::size_t>(n));
  const Real mu0 = std::sqrt(kPi);  // total weight of exp(-z^2)
  for (int i = 0; i < n; ++i) {
    const std::size_t src = static_cast<std::size_t>(order[static_cast<std::size_t>(i)]);
    gh.nodes[static_cast<std::size_t>(i)] = d[src];
    gh.weights[static_cast<std::size_t>(i)] = mu0 * z[src] * z[src];
  }
  return cache.emplace(n, std::move(gh)).first->second;
}

// One quadrature pass of the Cole-Hopf quotient at a fixed node count.
Real cole_hopf_quotient(Real x, Real t, Real nu, int n_nodes) {
  const GaussHermite& gh = gauss_hermite(n_nodes);
  const Real spread = 2.0 * std::sqrt(nu * t);
  const Real inv2pinu = 1.0 / (2.0 * kPi * nu);
  Real num = 0.0;
  Real den = 0.0;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
    const Real y = x - spread * gh.nodes[i];
    const Real f = std::exp(-std::cos(kPi * y) * inv2pinu);
    num += gh.weights[i] * std::sin(kPi * y) * f;
    den += gh.weights[i] * f;
  }
  return -num / den;
}

}  // namespace

Real burgers_reference(Real x, Real t, Real nu) {
  if (nu <= 0.0) throw InvalidInput("burgers_reference: viscosity must be > 0");
  if (t < 0.0) throw InvalidInput("burgers_reference: t must be >= 0");
  if (t == 0.0) return -std::sin(kPi * x);

  Real prev = cole_hopf_quotient(x, t, nu, 64);
  for (int n = 128; n <= 8192; n *= 2) {
    const Real cur = cole_hopf_quotient(x, t, nu, n);
    if (std::abs(cur - prev) < 1e-10 * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw std::runtime_error("burgers_reference: quadrature did not converge");
}

BurgersProblem::BurgersProblem(Real viscosity) : viscosity_(viscosity) {
  if (viscosity <= 0.0) throw InvalidInput("BurgersProblem: viscosity must be > 0");
  domain_.lo = {-1.0, 0.0};
  domain_.hi = {1.0, 1.0};
}

void BurgersProblem::interior_residual(const VecX&, std::span<const DerivativeBundle> u,
                                       PointResidual& out, bool want_seeds) const {
  const DerivativeBundle& b = u[0];
  const Real ux = b.gradient(0);
  const Real ut = b.gradient(1);
  const Real uxx = b.hessian_diag(0);
  out.components = 1;
  out.r[0] = burgers_residual(b.value, ut, ux, uxx, viscosity_);
  if (want_seeds) {
    BundleSeed& s = out.seed(0, 0);
    s.d_value = ux;
    s.d_gradient = {b.value, 1.0};
    s.d_hessian = {-viscosity_, 0.0};
  }
}

void BurgersProblem::boundary_residual(const VecX&, std::span<const DerivativeBundle> u,
                                       PointResidual& out, bool want_seeds) const {
  out.components = 1;
  out.r[0] = u[0].value;
  if (want_seeds) {
    out.seed(0, 0) = BundleSeed{};
    out.seed(0, 0).d_value = 1.0;
  }
}

void BurgersProblem::initial_residual(const VecX& x, std::span<const DerivativeBundle> u,
                                      PointResidual& out, bool want_seeds) const {
  out.components = 1;
  out.r[0] = u[0].value + std::sin(kPi * x(0));
  if (want_seeds) {
    out.seed(0, 0) = BundleSeed{};
    out.seed(0, 0).d_value = 1.0;
  }
}

MatX BurgersProblem::sample_boundary(int n, std::uint64_t seed) const {
  if (n < 1) throw InvalidInput("sample_boundary: n must be >= 1");
  Rng rng(seed);
  MatX pts(n, 2);
  const int n_left = n - n / 2;
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = i < n_left ? -1.0 : 1.0;
    pts(i, 1) = rng.uniform(0.0, 1.0);
  }
  return pts;
}

MatX BurgersProblem::sample_initial(int n, std::uint64_t seed) const {
  if (n < 1) throw InvalidInput("sample_initial: n must be >= 1");
  Rng rng(seed);
  MatX pts(n, 2);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = rng.uniform(-1.0, 1.0);
    pts(i, 1) = 0.0;
  }
  return pts;
}

VecX BurgersProblem::reference(const VecX& x) const {
  VecX v(1);
  v(0) = burgers_reference(x(0), x(1), viscosity_);
  return v;
}

// ---------------------------------------------------------------------------
// Helmholtz
// ---------------------------------------------------------------------------

HelmholtzProblem::HelmholtzProblem(HelmholtzConfig cfg) : cfg_(cfg) {
  if (cfg_.eps_r < 1.0) throw InvalidInput("HelmholtzProblem: eps_r must be >= 1");
  if (cfg_.radius <= 0.0 || cfg_.radius >= 1.0) {
    throw InvalidInput("HelmholtzProblem: radius must lie in (0, 1)");
  }
  if (cfg_.n_trunc < 1) throw InvalidInput("HelmholtzProblem: n_trunc must be >= 1");
  domain_.lo = {-1.0, -1.0};
  domain_.hi = {1.0, 1.0};
  k_interior_ = cfg_.omega * std::sqrt(cfg_.eps_r);

  // Mie coefficients from continuity of u and u' at r = R (mu_r = 1):
  //   alpha_n = (J_n(KR) Ki J_n'(KiR) - K J_n'(KR) J_n(KiR)) / D
  //   beta_n  = (J_n(KR) K H_n'(KR) - K J_n(KR)' ... ) / D, with
  //   D = K H_n'(KR) J_n(KiR) - Ki J_n'(KiR) H_n(KR).
  using specfun::bessel_deriv;
  using specfun::bessel_j;
  using specfun::hankel1;
  using specfun::hankel1_deriv;
  using specfun::BesselKind;
  const Real K = cfg_.omega;
  const Real Ki = k_interior_;
  const Real R = cfg_.radius;
  alpha_.resize(static_cast<std::size_t>(cfg_.n_trunc) + 1);
  beta_.resize(static_cast<std::size_t>(cfg_.n_trunc) + 1);
  for (int n = 0; n <= cfg_.n_trunc; ++n) {
    const Real a = bessel_j(n, K * R);
    const Real ap = K * bessel_deriv(BesselKind::J, n, K * R);
    const std::complex<Real> h = hankel1(n, K * R);
    const std::complex<Real> hp = K * hankel1_deriv(n, K * R);
    const Real j = bessel_j(n, Ki * R);
    const Real jp = Ki * bessel_deriv(BesselKind::J, n, Ki * R);
    const std::complex<Real> denom = hp * j - h * jp;
    alpha_[static_cast<std::size_t>(n)] = (a * jp - ap * j) / denom;
    beta_[static_cast<std::size_t>(n)] = (a * hp - ap * h) / denom;
  }
}

std::complex<Real> HelmholtzProblem::mie_alpha(int n) const {
  return alpha_.at(static_cast<std::size_t>(std::abs(n)));
}

std::complex<Real> HelmholtzProblem::mie_beta(int n) const {
  return beta_.at(static_cast<std::size_t>(std::abs(n)));
}

std::array<Real, 2> HelmholtzProblem::mie_solution(Real r, Real theta) const {
  using specfun::bessel_j;
  using specfun::hankel1;
  const Real K = cfg_.omega;
  const bool interior = r <= cfg_.radius;
  // alpha_n, beta_n are even in the order while the radial factors obey
  // C_{-n} = (-1)^n C_n, so the +-n pair collapses to 2 i^n c_n(r) cos(n
  // theta). The exterior incident sum over J_n is the Jacobi-Anger expansion
  // of e^{iKx}, evaluated in closed form; only the scattered Hankel series
  // (whose coefficients decay superexponentially) is truncated, so N_trunc
  // controls accuracy at the disk rather than at the domain corners.
  std::complex<Real> acc(0.0, 0.0);
  std::complex<Real> i_pow(1.0, 0.0);
  const std::complex<Real> i_unit(0.0, 1.0);
  for (int n = 0; n <= cfg_.n_trunc; ++n) {
    std::complex<Real> radial;
    if (interior) {
      radial = beta_[static_cast<std::size_t>(n)] * bessel_j(n, k_interior_ * r);
    } else {
      radial = alpha_[static_cast<std::size_t>(n)] * hankel1(n, K * r);
    }
    const Real angular = n == 0 ? 1.0 : 2.0 * std::cos(n * theta);
    acc += i_pow * angular * radial;
    i_pow *= i_unit;
  }
  if (!interior) {
    const Real phase = K * r * std::cos(theta);  // K x
    acc += std::complex<Real>(std::cos(phase), std::sin(phase));
  }
  return {acc.real(), acc.imag()};
}

Real HelmholtzProblem::permittivity(Real x, Real y) const {
  return (x * x + y * y <= cfg_.radius * cfg_.radius) ? cfg_.eps_r : 1.0;
}

std::array<Real, 2> HelmholtzProblem::boundary_normal(const VecX& x) const {
  constexpr Real tol = 1e-9;
  if (std::abs(x(0) - 1.0) <= tol) return {1.0, 0.0};
  if (std::abs(x(0) + 1.0) <= tol) return {-1.0, 0.0};
  if (std::abs(x(1) - 1.0) <= tol) return {0.0, 1.0};
  if (std::abs(x(1) + 1.0) <= tol) return {0.0, -1.0};
  throw InvalidInput("helmholtz: point not on the outer boundary");
}

std::array<Real, 2> HelmholtzProblem::incident_field(Real x, Real) const {
  const Real K = cfg_.omega;
  return {std::cos(K * x), std::sin(K * x)};
}

std::array<Real, 2> HelmholtzProblem::abc_source(const VecX& x) const {
  // (d_n - i k) e^{ikx} = i k (n_x - 1) e^{ikx}; zero on the outflow wall.
  const std::array<Real, 2> n = boundary_normal(x);
  const Real K = cfg_.omega;
  const Real phase = K * x(0);
  const Real c = K * (n[0] - 1.0);
  return {-c * std::sin(phase), c * std::cos(phase)};
}

void HelmholtzProblem::interior_residual(const VecX& x, std::span<const DerivativeBundle> u,
                                         PointResidual& out, bool want_seeds) const {
  const Real coeff = cfg_.omega * cfg_.omega * permittivity(x(0), x(1));
  out.components = 2;
  for (int c = 0; c < 2; ++c) {
    const DerivativeBundle& b = u[static_cast<std::size_t>(c)];
    const Real lap = b.hessian_diag(0) + b.hessian_diag(1);
    out.r[static_cast<std::size_t>(c)] = lap + coeff * b.value;
    if (want_seeds) {
      out.seed(c, 0) = BundleSeed{};
      out.seed(c, 1) = BundleSeed{};
      BundleSeed& s = out.seed(c, c);
      s.d_value = coeff;
      s.d_hessian = {1.0, 1.0};
    }
  }
}

void HelmholtzProblem::boundary_residual(const VecX& x, std::span<const DerivativeBundle> u,
                                         PointResidual& out, bool want_seeds) const {
  const std::array<Real, 2> n = boundary_normal(x);
  const std::array<Real, 2> g = abc_source(x);
  const Real K = cfg_.omega;
  const DerivativeBundle& re = u[0];
  const DerivativeBundle& im = u[1];
  const Real dn_re = n[0] * re.gradient(0) + n[1] * re.gradient(1);
  const Real dn_im = n[0] * im.gradient(0) + n[1] * im.gradient(1);
  out.components = 2;
  out.r[0] = dn_re + K * im.value - g[0];
  out.r[1] = dn_im - K * re.value - g[1];
  if (want_seeds) {
    for (int c = 0; c < 2; ++c)
      for (int o = 0; o < 2; ++o) out.seed(c, o) = BundleSeed{};
    out.seed(0, 0).d_gradient = n;
    out.seed(0, 1).d_value = K;
    out.seed(1, 1).d_gradient = n;
    out.seed(1, 0).d_value = -K;
  }
}

MatX HelmholtzProblem::sample_boundary(int n, std::uint64_t seed) const {
  if (n < 1) throw InvalidInput("sample_boundary: n must be >= 1");
  Rng rng(seed);
  MatX pts(n, 2);
  for (int i = 0; i < n; ++i) {
    const int side = i % 4;
    const Real s = rng.uniform(-1.0, 1.0);
    switch (side) {
      case 0: pts(i, 0) = -1.0; pts(i, 1) = s; break;
      case 1: pts(i, 0) = 1.0; pts(i, 1) = s; break;
      case 2: pts(i, 0) = s; pts(i, 1) = -1.0; break;
      default: pts(i, 0) = s; pts(i, 1) = 1.0; break;
    }
  }
  return pts;
}

VecX HelmholtzProblem::reference(const VecX& x) const {
  const Real r = std::hypot(x(0), x(1));
  const Real theta = std::atan2(x(1), x(0));
  const std::array<Real, 2> u = mie_solution(r, theta);
  VecX v(2);
  v << u[0], u[1];
  return v;
}

std::array<Real, 2> helmholtz_residual(Real lap_re, Real lap_im, Real e_re, Real e_im,
                                       Real x, Real y, const HelmholtzProblem& p) {
  const Real coeff = p.config().omega * p.config().omega * p.permittivity(x, y);
  return {lap_re + coeff * e_re, lap_im + coeff * e_im};
}

std::array<Real, 2> abc_residual(Real e_re, Real e_im, const std::array<Real, 2>& grad_re,
                                 const std::array<Real, 2>& grad_im, const VecX& x,
                                 const HelmholtzProblem& p) {
  const std::array<Real, 2> n = p.boundary_normal(x);
  const std::array<Real, 2> g = p.abc_source(x);
  const Real K = p.wavenumber();
  const Real dn_re = n[0] * grad_re[0] + n[1] * grad_re[1];
  const Real dn_im = n[0] * grad_im[0] + n[1] * grad_im[1];
  return {dn_re + K * e_im - g[0], dn_im - K * e_re - g[1]};
}

}  // namespace mspinn::problems
