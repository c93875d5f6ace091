#include "mspinn/specfun.hpp"

#include <cmath>
#include <vector>

namespace mspinn::specfun {

namespace {

constexpr Real kEulerGamma = 0.57721566490153286060651209008240243;
constexpr int kMaxOrder = 60;

void check_order(int n) {
  if (std::abs(n) > kMaxOrder) {
    throw std::range_error("bessel: order |n| > 60 unsupported");
  }
}

// Ascending power series; safe from cancellation for x <= ~8.
Real bessel_j_series(int n, Real x) {
  const Real half_x = 0.5 * x;
  Real term = 1.0;
  for (int k = 1; k <= n; ++k) term *= half_x / static_cast<Real>(k);
  Real sum = term;
  const Real q = half_x * half_x;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<Real>(k) * static_cast<Real>(n + k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

// One downward Miller sweep produces J_0..J_nmax, normalized with
// J_0 + 2*sum_k J_{2k} = 1. Stable for all x once the start order
// exceeds both nmax and x by a safe margin.
std::vector<Real> bessel_j_all_miller(int nmax, Real x) {
  const Real top = std::max<Real>(nmax, x);
  int start = static_cast<int>(top + 1.5 * std::sqrt(40.0 * std::max<Real>(top, 1.0)) + 24.0);
  if (start % 2 == 1) ++start;

  std::vector<Real> j(static_cast<std::size_t>(nmax) + 1, 0.0);
  Real jp = 0.0;        // J_{k+1}
  Real jc = 1e-30;      // J_k (arbitrary seed)
  Real norm = 0.0;      // accumulates J_0 + 2*J_2 + 2*J_4 + ...
  for (int k = start; k >= 1; --k) {
    Real jm = (2.0 * k / x) * jc - jp;
    jp = jc;
    jc = jm;
    if (std::abs(jc) > 1e250) {
      jc *= 1e-250;
      jp *= 1e-250;
      norm *= 1e-250;
      for (Real& v : j) v *= 1e-250;
    }
    const int order = k - 1;
    if (order <= nmax) j[static_cast<std::size_t>(order)] = jc;
    if (order > 0 && order % 2 == 0) norm += 2.0 * jc;
  }
  norm += jc;  // J_0
  for (Real& v : j) v /= norm;
  return j;
}

Real bessel_j_nonneg(int n, Real x) {
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (x <= 8.0 || n > x + 4.0) return bessel_j_series(n, x);
  return bessel_j_all_miller(n, x)[static_cast<std::size_t>(n)];
}

// Ascending log series (small x).
Real y0_ascending(Real x) {
  const Real q = 0.25 * x * x;
  Real term = 1.0, harmonic = 0.0, acc = 0.0;
  for (int k = 1; k < 120; ++k) {
    term *= q / (static_cast<Real>(k) * static_cast<Real>(k));
    harmonic += 1.0 / static_cast<Real>(k);
    const Real t = (k % 2 == 1 ? 1.0 : -1.0) * harmonic * term;
    acc += t;
    if (std::abs(t) < 1e-18 * (std::abs(acc) + 1.0)) break;
  }
  return (2.0 / kPi) * ((std::log(0.5 * x) + kEulerGamma) * bessel_j_nonneg(0, x) + acc);
}

Real y1_ascending(Real x) {
  const Real q = 0.25 * x * x;
  Real term = 0.5 * x;  // (x/2)^{2k+1} / (k! (k+1)!) at k = 0
  Real hk = 0.0, hk1 = 1.0, s = 0.0;
  for (int k = 0; k < 120; ++k) {
    const Real psi_sum = -2.0 * kEulerGamma + hk + hk1;
    s += psi_sum * term;
    term *= -q / (static_cast<Real>(k + 1) * static_cast<Real>(k + 2));
    hk += 1.0 / static_cast<Real>(k + 1);
    hk1 += 1.0 / static_cast<Real>(k + 2);
    if (std::abs(term) < 1e-18) break;
  }
  return -(2.0 / (kPi * x)) + (2.0 / kPi) * std::log(0.5 * x) * bessel_j_nonneg(1, x) -
         s / kPi;
}

// Neumann J-expansions; cancellation-free at moderate and large x.
//   Y_0 = (2/pi)[(ln(x/2)+g) J_0 + 2 sum (-1)^{k+1} J_{2k}/k]
//   Y_1 = (2/pi)[(ln(x/2)+g-1) J_1 - J_0/x + sum (-1)^{m+1}(1/m + 1/(m+1)) J_{2m+1}]
void y01_neumann(Real x, Real& y0, Real& y1) {
  const int jmax = static_cast<int>(x + 12.0 * std::cbrt(x) + 30.0);
  const std::vector<Real> j = bessel_j_all_miller(jmax, x);
  const Real lg = std::log(0.5 * x) + kEulerGamma;

  Real s0 = 0.0;
  for (int k = 1; 2 * k <= jmax; ++k) {
    s0 += (k % 2 == 1 ? 1.0 : -1.0) * j[static_cast<std::size_t>(2 * k)] / static_cast<Real>(k);
  }
  y0 = (2.0 / kPi) * (lg * j[0] + 2.0 * s0);

  Real s1 = 0.0;
  for (int m = 1; 2 * m + 1 <= jmax; ++m) {
    const Real c = 1.0 / static_cast<Real>(m) + 1.0 / static_cast<Real>(m + 1);
    s1 += (m % 2 == 1 ? 1.0 : -1.0) * c * j[static_cast<std::size_t>(2 * m + 1)];
  }
  y1 = (2.0 / kPi) * ((lg - 1.0) * j[1] - j[0] / x + s1);
}

Real bessel_y_nonneg(int n, Real x) {
  Real y0, y1;
  if (x <= 9.0) {
    y0 = y0_ascending(x);
    y1 = y1_ascending(x);
  } else {
    y01_neumann(x, y0, y1);
  }
  if (n == 0) return y0;
  if (n == 1) return y1;
  // Upward recurrence is stable for Y (the dominant solution).
  Real ym = y0, yc = y1;
  for (int k = 1; k < n; ++k) {
    Real yn = (2.0 * k / x) * yc - ym;
    if (!std::isfinite(yn) || std::abs(yn) > 1e290) {
      throw std::range_error("bessel_y: overflow in upward recurrence");
    }
    ym = yc;
    yc = yn;
  }
  return yc;
}

}  // namespace

Real bessel_j(int n, Real x) {
  check_order(n);
  if (x < 0.0) throw InvalidInput("bessel_j: requires x >= 0");
  const Real v = bessel_j_nonneg(std::abs(n), x);
  return (n < 0 && (n & 1)) ? -v : v;
}

Real bessel_y(int n, Real x) {
  check_order(n);
  if (x <= 0.0) throw InvalidInput("bessel_y: requires x > 0");
  const Real v = bessel_y_nonneg(std::abs(n), x);
  return (n < 0 && (n & 1)) ? -v : v;
}

std::complex<Real> hankel1(int n, Real x) {
  return {bessel_j(n, x), bessel_y(n, x)};
}

Real bessel_deriv(BesselKind kind, int n, Real x) {
  switch (kind) {
    case BesselKind::J:
      return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x));
    case BesselKind::Y:
      return 0.5 * (bessel_y(n - 1, x) - bessel_y(n + 1, x));
    case BesselKind::H1:
      throw InvalidInput("bessel_deriv: use hankel1_deriv for complex H1'");
  }
  return 0.0;
}

std::complex<Real> hankel1_deriv(int n, Real x) {
  return 0.5 * (hankel1(n - 1, x) - hankel1(n + 1, x));
}

}  // namespace mspinn::specfun
