#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "mspinn/problems.hpp"
#include "mspinn/specfun.hpp"

using namespace mspinn;
using problems::BurgersProblem;
using problems::HelmholtzConfig;
using problems::HelmholtzProblem;

TEST_CASE("burgers_residual pointwise forms") {
  CHECK(problems::burgers_residual(0, 0, 0, 0, 1.0) == 0.0);
  CHECK(problems::burgers_residual(3.7, 0, 0, 0, 1.0) == 0.0);  // constant state
  // u(x,t) = x: u_t + u u_x - nu u_xx = x.
  for (const Real x : {-0.7, 0.2, 0.9}) {
    CHECK(problems::burgers_residual(x, 0.0, 1.0, 0.0, 1.0) == doctest::Approx(x));
  }
}

TEST_CASE("burgers condition targets") {
  using problems::ConditionKind;
  CHECK(problems::burgers_condition_residual(ConditionKind::initial, 0.0, 0.0, 0.0) ==
        doctest::Approx(0.0));
  // u(0.5, 0) must equal -sin(pi/2) = -1, so the residual of u = -1 is zero.
  CHECK(problems::burgers_condition_residual(ConditionKind::initial, 0.5, 0.0, -1.0) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(problems::burgers_condition_residual(ConditionKind::boundary, -1.0, 0.3, 0.0) == 0.0);
  CHECK_THROWS_AS(problems::burgers_condition_residual(ConditionKind::boundary, 0.5, 0.3, 0.0),
                  InvalidInput);
  CHECK_THROWS_AS(problems::burgers_condition_residual(ConditionKind::initial, 0.5, 0.3, 0.0),
                  InvalidInput);
}

TEST_CASE("burgers reference: continuity, symmetry, and frozen oracle values") {
  // t -> 0+ limit continuous with the initial condition.
  CHECK(problems::burgers_reference(0.5, 1e-9, 1.0) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(problems::burgers_reference(0.5, 0.0, 1.0) == -std::sin(kPi * 0.5));

  // Odd symmetry and the fixed point at x = 0.
  for (const Real t : {0.05, 0.3, 0.8}) {
    for (const Real x : {0.2, 0.55, 0.9}) {
      const Real up = problems::burgers_reference(x, t, 1.0);
      const Real um = problems::burgers_reference(-x, t, 1.0);
      CHECK(std::abs(up + um) < 1e-10);
    }
    CHECK(std::abs(problems::burgers_reference(0.0, t, 1.0)) < 1e-12);
  }

  // Frozen values from an independent 30-digit quadrature of the quotient.
  CHECK(problems::burgers_reference(-0.9, 0.5, 1.0) ==
        doctest::Approx(0.00221300559426).epsilon(1e-9));
  CHECK(problems::burgers_reference(-0.5, 0.5, 1.0) ==
        doctest::Approx(0.00716920750762).epsilon(1e-9));
  CHECK(problems::burgers_reference(0.3, 1.0, 1.0) ==
        doctest::Approx(-4.17132016864e-5).epsilon(1e-7));
  const Real nu_sharp = 0.01 / kPi;
  CHECK(problems::burgers_reference(0.1, 0.75, nu_sharp) ==
        doctest::Approx(-0.800395992475).epsilon(1e-9));
  CHECK(problems::burgers_reference(0.05, 1.0, nu_sharp) ==
        doctest::Approx(-0.700027080879).epsilon(1e-9));
  CHECK(problems::burgers_reference(-0.3, 0.4, nu_sharp) ==
        doctest::Approx(0.880655188853).epsilon(1e-9));
}

TEST_CASE("burgers reference satisfies the PDE under finite differences") {
  const Real h = 1e-3;
  const auto fd_residual = [&](Real x, Real t, Real nu) {
    const auto u = [&](Real xx, Real tt) { return problems::burgers_reference(xx, tt, nu); };
    const Real u0 = u(x, t);
    const Real ut = (u(x, t + h) - u(x, t - h)) / (2 * h);
    const Real ux = (u(x + h, t) - u(x - h, t)) / (2 * h);
    const Real uxx = (u(x + h, t) - 2 * u0 + u(x - h, t)) / (h * h);
    return problems::burgers_residual(u0, ut, ux, uxx, nu);
  };
  for (const Real x : {-0.8, -0.4, 0.1, 0.6}) {
    for (const Real t : {0.1, 0.4, 0.9}) {
      CHECK(std::abs(fd_residual(x, t, 1.0)) < 1e-5);
    }
  }
  // Sharp-front viscosity, sampled away from the shock layer at x ~ 0.
  for (const Real x : {-0.75, -0.45, 0.55, 0.85}) {
    CHECK(std::abs(fd_residual(x, 0.6, 0.01 / kPi)) < 1e-5);
  }
}

TEST_CASE("burgers problem sampling and residual plumbing") {
  const BurgersProblem prob(1.0);
  CHECK(prob.time_dependent());
  CHECK(prob.output_dim() == 1);

  const MatX bnd = prob.sample_boundary(81, 3);
  int left = 0;
  for (Eigen::Index i = 0; i < bnd.rows(); ++i) {
    CHECK(std::abs(std::abs(bnd(i, 0)) - 1.0) < 1e-15);
    if (bnd(i, 0) < 0) ++left;
    CHECK(bnd(i, 1) >= 0.0);
    CHECK(bnd(i, 1) < 1.0);
  }
  CHECK(std::abs(left - 40.5) <= 0.5);  // split equally, odd count tolerated

  const MatX ini = prob.sample_initial(10, 4);
  for (Eigen::Index i = 0; i < ini.rows(); ++i) CHECK(ini(i, 1) == 0.0);

  CHECK_THROWS_AS(BurgersProblem(0.0), InvalidInput);
  CHECK_THROWS_AS(BurgersProblem(-0.1), InvalidInput);
}

TEST_CASE("permittivity map with closed-disk convention") {
  HelmholtzConfig cfg;
  cfg.eps_r = 2.0;
  const HelmholtzProblem p(cfg);
  CHECK(p.permittivity(0.0, 0.0) == 2.0);
  CHECK(p.permittivity(0.9, 0.9) == 1.0);
  CHECK(p.permittivity(0.25, 0.0) == 2.0);  // rim belongs to the interior
  CHECK(p.permittivity(0.2501, 0.0) == 1.0);
}

TEST_CASE("helmholtz residual: zero field and free-space plane wave") {
  const HelmholtzProblem p(HelmholtzConfig{});
  const auto zero = problems::helmholtz_residual(0, 0, 0, 0, 0.5, 0.5, p);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);

  // E_rz = cos(kx) outside the disk: laplacian = -k^2 cos(kx).
  const Real k = p.wavenumber();
  for (const Real x : {0.6, -0.8, 0.9}) {
    const Real e = std::cos(k * x);
    const auto r = problems::helmholtz_residual(-k * k * e, 0.0, e, 0.0, x, 0.9, p);
    CHECK(std::abs(r[0]) < 1e-9);
    CHECK(r[1] == 0.0);
  }
}

TEST_CASE("mie solution at eps_r = 1 is the incident plane wave") {
  HelmholtzConfig cfg;
  cfg.eps_r = 1.0;
  cfg.n_trunc = 20;
  const HelmholtzProblem p(cfg);
  CHECK(std::abs(p.mie_alpha(0)) < 1e-14);
  CHECK(std::abs(p.mie_beta(0) - std::complex<Real>(1.0, 0.0)) < 1e-14);

  Real num = 0.0, den = 0.0;
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      const Real x = -1.0 + 2.0 * i / 63.0;
      const Real y = -1.0 + 2.0 * j / 63.0;
      const auto u = p.mie_solution(std::hypot(x, y), std::atan2(y, x));
      const auto inc = p.incident_field(x, y);
      num += (u[0] - inc[0]) * (u[0] - inc[0]) + (u[1] - inc[1]) * (u[1] - inc[1]);
      den += inc[0] * inc[0] + inc[1] * inc[1];
    }
  }
  CHECK(std::sqrt(num / den) < 1e-8);
}

TEST_CASE("mie interface continuity and truncation stability") {
  HelmholtzConfig cfg;
  cfg.eps_r = 1.5;
  cfg.n_trunc = 15;
  const HelmholtzProblem p15(cfg);
  for (int k = 0; k < 40; ++k) {
    const Real th = kTwoPi * k / 40.0;
    const auto ui = p15.mie_solution(cfg.radius - 1e-12, th);
    const auto ue = p15.mie_solution(cfg.radius + 1e-12, th);
    CHECK(std::hypot(ui[0] - ue[0], ui[1] - ue[1]) < 1e-6);
  }

  cfg.n_trunc = 20;
  const HelmholtzProblem p20(cfg);
  for (const Real r : {0.1, 0.3, 0.8, 1.3}) {
    for (int k = 0; k < 8; ++k) {
      const Real th = kTwoPi * k / 8.0;
      const auto a = p15.mie_solution(r, th);
      const auto b = p20.mie_solution(r, th);
      CHECK(std::hypot(a[0] - b[0], a[1] - b[1]) < 1e-8);
    }
  }
}

TEST_CASE("mie field satisfies the Helmholtz equation via Bessel recurrences") {
  // Laplacian of each cylinder harmonic evaluated with the derivative
  // recurrences; residual must vanish off the interface.
  HelmholtzConfig cfg;
  cfg.eps_r = 1.5;
  const HelmholtzProblem p(cfg);
  using specfun::bessel_j;
  using specfun::hankel1;

  const auto residual_at = [&](Real r, Real th) {
    const bool interior = r <= cfg.radius;
    const Real k = interior ? p.interior_wavenumber() : p.wavenumber();
    const Real z = k * r;
    std::complex<Real> acc(0.0, 0.0);
    std::complex<Real> i_pow(1.0, 0.0);
    const std::complex<Real> iu(0.0, 1.0);
    for (int n = 0; n <= cfg.n_trunc; ++n) {
      const auto radial = [&](int m) -> std::complex<Real> {
        const int am = std::abs(m);
        const Real sign = (m < 0 && (am & 1)) ? -1.0 : 1.0;
        return interior ? std::complex<Real>(sign * bessel_j(am, z), 0.0)
                        : sign * hankel1(am, z);
      };
      const std::complex<Real> coef = interior ? p.mie_beta(n) : p.mie_alpha(n);
      const std::complex<Real> cpp = 0.25 * (radial(n - 2) - 2.0 * radial(n) + radial(n + 2));
      const std::complex<Real> cp = 0.5 * (radial(n - 1) - radial(n + 1));
      const std::complex<Real> lap =
          k * k * (cpp + cp / z - static_cast<Real>(n) * n / (z * z) * radial(n));
      const Real angular = n == 0 ? 1.0 : 2.0 * std::cos(n * th);
      acc += i_pow * angular * coef * (lap + k * k * radial(n));
      i_pow *= iu;
    }
    return std::abs(acc);
  };
  for (const Real r : {0.08, 0.18, 0.4, 0.9, 1.35}) {
    for (int k = 0; k < 8; ++k) {
      CHECK(residual_at(r, kTwoPi * k / 8.0) < 1e-10);
    }
  }
}

TEST_CASE("abc residual passes the incident wave exactly") {
  const HelmholtzProblem p(HelmholtzConfig{});
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    VecX x(2);
    const int side = trial % 4;
    const Real s = rng.uniform(-1.0, 1.0);
    if (side == 0) x << 1.0, s;
    if (side == 1) x << -1.0, s;
    if (side == 2) x << s, 1.0;
    if (side == 3) x << s, -1.0;
    const Real k = p.wavenumber();
    const auto inc = p.incident_field(x(0), x(1));
    const std::array<Real, 2> grad_re{-k * std::sin(k * x(0)), 0.0};
    const std::array<Real, 2> grad_im{k * std::cos(k * x(0)), 0.0};
    const auto r = problems::abc_residual(inc[0], inc[1], grad_re, grad_im, x, p);
    CHECK(std::abs(r[0]) < 1e-12);
    CHECK(std::abs(r[1]) < 1e-12);
  }
}

TEST_CASE("abc residual of the zero field equals minus the source terms") {
  const HelmholtzProblem p(HelmholtzConfig{});
  VecX x(2);
  x << 0.0, 1.0;  // top wall
  const auto g = p.abc_source(x);
  const auto r = problems::abc_residual(0.0, 0.0, {0.0, 0.0}, {0.0, 0.0}, x, p);
  CHECK(r[0] == doctest::Approx(-g[0]));
  CHECK(r[1] == doctest::Approx(-g[1]));
  VecX inside(2);
  inside << 0.2, 0.3;
  CHECK_THROWS_AS(problems::abc_residual(0, 0, {0, 0}, {0, 0}, inside, p), InvalidInput);
}

TEST_CASE("first-order ABC error of the true scattered field stays moderate") {
  // The analytic Mie field does not satisfy the first-order ABC exactly;
  // record that the relative defect stays below 10% for eps_r = 1.5.
  HelmholtzConfig cfg;
  cfg.eps_r = 1.5;
  const HelmholtzProblem p(cfg);
  const Real h = 1e-6;
  Real worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    VecX x(2);
    const Real s = -1.0 + 2.0 * (i % 10) / 9.0;
    if (i < 10) x << 1.0, s;
    else if (i < 20) x << -1.0, s;
    else if (i < 30) x << s, 1.0;
    else x << s, -1.0;

    const auto field = [&](Real xx, Real yy) {
      return p.mie_solution(std::hypot(xx, yy), std::atan2(yy, xx));
    };
    const auto u0 = field(x(0), x(1));
    const auto uxp = field(x(0) + h, x(1));
    const auto uxm = field(x(0) - h, x(1));
    const auto uyp = field(x(0), x(1) + h);
    const auto uym = field(x(0), x(1) - h);
    const std::array<Real, 2> grad_re{(uxp[0] - uxm[0]) / (2 * h), (uyp[0] - uym[0]) / (2 * h)};
    const std::array<Real, 2> grad_im{(uxp[1] - uxm[1]) / (2 * h), (uyp[1] - uym[1]) / (2 * h)};
    const auto r = problems::abc_residual(u0[0], u0[1], grad_re, grad_im, x, p);
    const Real scale = p.wavenumber() * std::hypot(u0[0], u0[1]);
    worst = std::max(worst, std::hypot(r[0], r[1]) / scale);
  }
  CHECK(worst <= 0.1);
  MESSAGE("first-order ABC relative defect of the Mie field: ", worst);
}

TEST_CASE("mie residual against finite-difference laplacian off the interface") {
  HelmholtzConfig cfg;
  cfg.eps_r = 1.5;
  const HelmholtzProblem p(cfg);
  const Real h = 0.01;
  const auto field = [&](Real xx, Real yy) {
    return p.mie_solution(std::hypot(xx, yy), std::atan2(yy, xx));
  };
  for (const auto [x, y] : {std::pair{0.6, 0.1}, {0.05, 0.08}, {-0.5, 0.55}, {0.0, 0.75}}) {
    const auto u0 = field(x, y);
    const auto xp = field(x + h, y), xm = field(x - h, y);
    const auto yp = field(x, y + h), ym = field(x, y - h);
    for (int c = 0; c < 2; ++c) {
      const Real lap = (xp[c] + xm[c] + yp[c] + ym[c] - 4 * u0[c]) / (h * h);
      const Real coeff = p.wavenumber() * p.wavenumber() * p.permittivity(x, y);
      CHECK(std::abs(lap + coeff * u0[c]) < 1e-3 * std::max(1.0, coeff * std::abs(u0[c])));
    }
  }
}

TEST_CASE("helmholtz problem boundary sampling covers all four walls") {
  const HelmholtzProblem p(HelmholtzConfig{});
  CHECK_FALSE(p.time_dependent());
  const MatX bnd = p.sample_boundary(80, 7);
  int sides[4] = {0, 0, 0, 0};
  for (Eigen::Index i = 0; i < bnd.rows(); ++i) {
    VecX x = bnd.row(i).transpose();
    const auto n = p.boundary_normal(x);
    if (n[0] < 0) ++sides[0];
    else if (n[0] > 0) ++sides[1];
    else if (n[1] < 0) ++sides[2];
    else ++sides[3];
  }
  for (int s = 0; s < 4; ++s) CHECK(sides[s] == 20);
  CHECK_THROWS_AS(p.sample_initial(5, 1), InvalidInput);
}

TEST_CASE("helmholtz config validation") {
  HelmholtzConfig bad;
  bad.eps_r = 0.5;
  CHECK_THROWS_AS(HelmholtzProblem{bad}, InvalidInput);
  bad = HelmholtzConfig{};
  bad.radius = 1.5;
  CHECK_THROWS_AS(HelmholtzProblem{bad}, InvalidInput);
}
