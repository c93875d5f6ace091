#pragma once

#include <array>
#include <complex>
#include <functional>

#include "mspinn/common.hpp"

namespace mspinn::spectral {

using Complex = std::complex<Real>;

/// Uniform tensor grid of real samples over a 2-D box. Points include the
/// lower edge and exclude the upper one (periodic convention), so cell
/// (ix, iy) sits at lo + (ix/nx, iy/ny) * (hi - lo). Storage is row-major
/// with the x index outermost.
struct GridField {
  int nx = 0;
  int ny = 0;
  Domain domain;
  std::vector<Real> values;

  GridField() = default;
  GridField(int nx_, int ny_, Domain dom);

  Real& at(int ix, int iy) { return values[static_cast<std::size_t>(ix) * ny + iy]; }
  Real at(int ix, int iy) const { return values[static_cast<std::size_t>(ix) * ny + iy]; }
  Real x_of(int ix) const { return domain.lo[0] + domain.length(0) * ix / nx; }
  Real y_of(int iy) const { return domain.lo[1] + domain.length(1) * iy / ny; }
};

/// 2-D DFT coefficients with forward normalization 1/(nx*ny): a unit-amplitude
/// pure cosine shows up as two conjugate coefficients of magnitude 0.5.
struct Spectrum {
  int nx = 0;
  int ny = 0;
  Domain domain;
  std::vector<Complex> coeffs;  // row-major, x index outermost

  Complex& at(int jx, int jy) { return coeffs[static_cast<std::size_t>(jx) * ny + jy]; }
  Complex at(int jx, int jy) const { return coeffs[static_cast<std::size_t>(jx) * ny + jy]; }
  Real amplitude(int jx, int jy) const { return std::abs(at(jx, jy)); }
  Real phase(int jx, int jy) const { return std::arg(at(jx, jy)); }

  /// Signed mode index in (-n/2, n/2] for array index j.
  static int signed_mode(int j, int n) { return j <= n / 2 ? j : j - n; }
  /// Angular frequency of array cell (jx, jy): 2*pi*mode/length per axis.
  std::array<Real, 2> angular_frequency(int jx, int jy) const;
  /// Cyclic frequency of array cell (jx, jy): mode/length per axis.
  std::array<Real, 2> cyclic_frequency(int jx, int jy) const;
};

/// One retained cosine mode of a real field: amplitude-normalized strength
/// alpha, physical-coordinate phase theta, angular frequency vector k, so the
/// signal contribution is scale * alpha * cos(k . x + theta).
struct Mode {
  std::array<Real, 2> k{};       // angular frequency
  Real alpha = 0.0;              // amplitude / largest amplitude
  Real theta = 0.0;              // phase in physical coordinates
  std::array<int, 2> mode_index{};  // signed integer DFT modes (diagnostics)
};

struct SpectralModes {
  std::vector<Mode> modes;  // sorted by descending amplitude
  Real scale = 0.0;         // largest raw amplitude (de-normalization factor)
};

/// Discrete sampling distribution over frequency vectors (cyclic units).
struct FrequencyDistribution {
  std::vector<std::array<Real, 2>> support;
  std::vector<Real> probabilities;  // sums to 1 within 1e-12
};

class DegenerateResidual : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Evaluate f on the uniform tensor grid. Throws if f produces a non-finite
/// value (the message names the offending point).
GridField sample_on_grid(const std::function<Real(Real, Real)>& f, const Domain& domain,
                         int nx, int ny);

/// Forward 2-D DFT (row-column; radix-2 FFT on power-of-two axes, direct
/// summation otherwise).
Spectrum dft2(const GridField& g);

/// Inverse of dft2 (real part of the synthesis sum).
GridField inverse_dft2(const Spectrum& s);

/// Top n_f modes of the non-redundant half spectrum, sorted by descending
/// amplitude. Amplitudes of modes with a distinct conjugate partner are
/// doubled so the real series sum reproduces the retained signal; all
/// amplitudes are then divided by the largest one, which is returned as
/// `scale`. Self-conjugate modes (DC, Nyquist lines) get phase 0 or pi in
/// index space before the physical-coordinate shift.
SpectralModes extract_top_modes(const Spectrum& s, int n_f);

/// scale * sum_j alpha_j cos(k_j . x + theta_j) evaluated on a grid.
GridField reconstruct_from_modes(const SpectralModes& m, const Domain& domain, int nx, int ny);

/// Elementwise squared magnitude |coeff|^2, laid out like the spectrum.
GridField psd(const Spectrum& s);

/// Normalize a PSD grid into a probability distribution over the cyclic
/// frequencies of its cells. Throws DegenerateResidual when the PSD is
/// identically zero.
FrequencyDistribution normalize_psd(const GridField& p);

/// m i.i.d. draws (with replacement) via inverse CDF over the support in
/// enumeration order; deterministic for a fixed seed.
std::vector<std::array<Real, 2>> sample_frequencies(const FrequencyDistribution& p, int m,
                                                    std::uint64_t seed);

/// Stack sampled frequencies into the RFF weight matrix (rows in draw order)
/// and draw phases uniformly on [0, 2*pi).
void build_rff_layer(const std::vector<std::array<Real, 2>>& freqs, std::uint64_t seed,
                     MatX& B, VecX& b);

}  // namespace mspinn::spectral
