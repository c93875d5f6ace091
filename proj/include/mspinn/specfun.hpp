#pragma once

#include <complex>

#include "mspinn/common.hpp"

namespace mspinn::specfun {

/// Bessel function of the first kind J_n(x), integer order |n| <= 60.
/// Accurate to ~1e-12 relative on x in [0, 50].
Real bessel_j(int n, Real x);

/// Bessel function of the second kind Y_n(x), integer order |n| <= 60.
/// Requires x > 0 (logarithmic singularity at the origin); accurate to
/// ~1e-10 relative on (0.05, 50].
Real bessel_y(int n, Real x);

/// Hankel function of the first kind H_n^{(1)}(x) = J_n(x) + i Y_n(x).
std::complex<Real> hankel1(int n, Real x);

enum class BesselKind { J, Y, H1 };

/// Derivative via C_n'(x) = (C_{n-1}(x) - C_{n+1}(x)) / 2.
Real bessel_deriv(BesselKind kind, int n, Real x);
std::complex<Real> hankel1_deriv(int n, Real x);

}  // namespace mspinn::specfun
