#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mspinn/specfun.hpp"

using namespace mspinn;
using specfun::BesselKind;

namespace {

// Independent oracles, kept free of the library's algorithm choices.

// J_n(x) = (1/pi) int_0^pi cos(n tau - x sin tau) dtau, composite Simpson.
double bessel_j_integral_oracle(int n, double x) {
  const int segments = 20000;
  const double h = kPi / segments;
  double acc = 0.0;
  for (int i = 0; i <= segments; ++i) {
    const double tau = i * h;
    const double f = std::cos(n * tau - x * std::sin(tau));
    const double w = (i == 0 || i == segments) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * f;
  }
  return acc * h / (3.0 * kPi);
}

// Y_n(x) = (1/pi) int_0^pi sin(x sin tau - n tau) dtau
//        - (1/pi) int_0^inf [e^{n t} + (-1)^n e^{-n t}] e^{-x sinh t} dt.
double bessel_y_integral_oracle(int n, double x) {
  const int segments = 20000;
  const double h = kPi / segments;
  double first = 0.0;
  for (int i = 0; i <= segments; ++i) {
    const double tau = i * h;
    const double f = std::sin(x * std::sin(tau) - n * tau);
    const double w = (i == 0 || i == segments) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    first += w * f;
  }
  first *= h / 3.0;

  // Truncate where x sinh t - n t > 760 so the integrand has underflowed.
  double t_max = 2.0;
  while (x * std::sinh(t_max) - std::abs(n) * t_max < 760.0) t_max += 0.5;
  const int seg2 = 40000;
  const double h2 = t_max / seg2;
  double second = 0.0;
  for (int i = 0; i <= seg2; ++i) {
    const double t = i * h2;
    const double expo = -x * std::sinh(t);
    if (expo < -745.0) continue;
    const double f = (std::exp(n * t) + (n % 2 == 0 ? 1.0 : -1.0) * std::exp(-n * t)) *
                     std::exp(expo);
    const double w = (i == 0 || i == seg2) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    second += w * f;
  }
  second *= h2 / 3.0;
  return (first - second) / kPi;
}

}  // namespace

TEST_CASE("bessel_j special values") {
  CHECK(specfun::bessel_j(0, 0.0) == 1.0);
  CHECK(specfun::bessel_j(1, 0.0) == 0.0);
  CHECK(specfun::bessel_j(7, 0.0) == 0.0);
  // First zero of J_0 from the independent series oracle value.
  CHECK(std::abs(specfun::bessel_j(0, 2.404825557695773)) < 1e-9);
}

TEST_CASE("bessel_j matches the integral-representation oracle") {
  for (const int n : {0, 1, 2, 3, 5, 10, 20}) {
    for (const double x : {0.3, 1.0, 2.5, 7.5, 14.0, 22.0, 30.0, 41.0, 50.0}) {
      const double ref = bessel_j_integral_oracle(n, x);
      const double got = specfun::bessel_j(n, x);
      CHECK(std::abs(got - ref) < 1e-11 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("bessel_y matches the integral-representation oracle") {
  // Includes the spec's cross-check point (n=3, x=7.5).
  for (const int n : {0, 1, 2, 3, 6, 12}) {
    for (const double x : {0.5, 1.0, 3.0, 7.5, 12.0, 20.0, 35.0, 50.0}) {
      const double ref = bessel_y_integral_oracle(n, x);
      const double got = specfun::bessel_y(n, x);
      CHECK(std::abs(got - ref) < 1e-9 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("wronskian identity J_n Y_n' - J_n' Y_n = 2/(pi x)") {
  for (int n = 0; n <= 20; ++n) {
    for (double x = 0.5; x <= 30.0; x += 1.7) {
      const double w = specfun::bessel_j(n, x) * specfun::bessel_deriv(BesselKind::Y, n, x) -
                       specfun::bessel_deriv(BesselKind::J, n, x) * specfun::bessel_y(n, x);
      CHECK(std::abs(w - 2.0 / (kPi * x)) < 1e-10);
    }
  }
}

TEST_CASE("three-term recurrence consistency") {
  for (int n = 1; n <= 20; ++n) {
    for (double x = 0.5; x <= 30.0; x += 2.3) {
      const double lhs_j = specfun::bessel_j(n - 1, x) + specfun::bessel_j(n + 1, x);
      const double rhs_j = (2.0 * n / x) * specfun::bessel_j(n, x);
      CHECK(std::abs(lhs_j - rhs_j) < 1e-10 * std::max(1.0, std::abs(rhs_j)));
      const double lhs_y = specfun::bessel_y(n - 1, x) + specfun::bessel_y(n + 1, x);
      const double rhs_y = (2.0 * n / x) * specfun::bessel_y(n, x);
      CHECK(std::abs(lhs_y - rhs_y) < 1e-10 * std::max(1.0, std::abs(rhs_y)));
    }
  }
}

TEST_CASE("negative order reflection is exact") {
  for (int n = 1; n <= 15; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    CHECK(specfun::bessel_j(-n, 3.7) == sign * specfun::bessel_j(n, 3.7));
    CHECK(specfun::bessel_y(-n, 3.7) == sign * specfun::bessel_y(n, 3.7));
  }
}

TEST_CASE("derivative identities") {
  CHECK(std::abs(specfun::bessel_deriv(BesselKind::J, 0, 1.3) +
                 specfun::bessel_j(1, 1.3)) < 1e-12);
  const auto h0p = specfun::hankel1_deriv(0, 2.1);
  const auto mh1 = -specfun::hankel1(1, 2.1);
  CHECK(std::abs(h0p.real() - mh1.real()) < 1e-12);
  CHECK(std::abs(h0p.imag() - mh1.imag()) < 1e-12);

  // Central finite difference of J_2 at x = 5.
  const double h = 1e-6;
  const double fd = (specfun::bessel_j(2, 5.0 + h) - specfun::bessel_j(2, 5.0 - h)) / (2 * h);
  CHECK(std::abs(specfun::bessel_deriv(BesselKind::J, 2, 5.0) - fd) < 1e-8);
}

TEST_CASE("Y_0 diverges monotonically toward -inf at the origin") {
  double prev = specfun::bessel_y(0, 0.2);
  for (const double x : {0.1, 0.05, 0.02, 0.01, 0.005}) {
    const double v = specfun::bessel_y(0, x);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < -3.0);
}

TEST_CASE("domain and range errors") {
  CHECK_THROWS_AS(specfun::bessel_y(0, 0.0), InvalidInput);
  CHECK_THROWS_AS(specfun::bessel_y(2, -1.0), InvalidInput);
  CHECK_THROWS_AS(specfun::bessel_j(0, -0.5), InvalidInput);
  CHECK_THROWS_AS(specfun::bessel_j(61, 1.0), std::range_error);
  CHECK_THROWS_AS(specfun::bessel_y(-61, 1.0), std::range_error);
}

TEST_CASE("hankel1 composition") {
  const auto h = specfun::hankel1(4, 6.2);
  CHECK(h.real() == specfun::bessel_j(4, 6.2));
  CHECK(h.imag() == specfun::bessel_y(4, 6.2));
}
