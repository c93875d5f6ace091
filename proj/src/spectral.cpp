#include "mspinn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mspinn::spectral {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place radix-2 Cooley-Tukey, sign = -1 forward / +1 inverse.
void fft_pow2(std::vector<Complex>& a, int sign) {
  const int n = static_cast<int>(a.size());
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const Real ang = sign * kTwoPi / len;
    const Complex wl(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      Complex w(1.0, 0.0);
      for (int k = 0; k < len / 2; ++k) {
        Complex u = a[i + k];
        Complex v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Direct O(n^2) line transform for non power-of-two sizes.
void dft_line(std::vector<Complex>& a, int sign) {
  const int n = static_cast<int>(a.size());
  std::vector<Complex> out(a.size());
  for (int m = 0; m < n; ++m) {
    Complex acc(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
      const Real ang = sign * kTwoPi * m * j / n;
      acc += a[j] * Complex(std::cos(ang), std::sin(ang));
    }
    out[m] = acc;
  }
  a.swap(out);
}

void transform_line(std::vector<Complex>& a, int sign) {
  if (is_power_of_two(static_cast<int>(a.size()))) {
    fft_pow2(a, sign);
  } else {
    dft_line(a, sign);
  }
}

// Row-column 2-D transform without normalization.
void transform2(std::vector<Complex>& data, int nx, int ny, int sign) {
  std::vector<Complex> line;
  line.reserve(static_cast<std::size_t>(std::max(nx, ny)));
  for (int ix = 0; ix < nx; ++ix) {
    line.assign(data.begin() + static_cast<std::ptrdiff_t>(ix) * ny,
                data.begin() + static_cast<std::ptrdiff_t>(ix + 1) * ny);
    transform_line(line, sign);
    std::copy(line.begin(), line.end(), data.begin() + static_cast<std::ptrdiff_t>(ix) * ny);
  }
  for (int iy = 0; iy < ny; ++iy) {
    line.resize(static_cast<std::size_t>(nx));
    for (int ix = 0; ix < nx; ++ix) line[static_cast<std::size_t>(ix)] = data[static_cast<std::size_t>(ix) * ny + iy];
    transform_line(line, sign);
    for (int ix = 0; ix < nx; ++ix) data[static_cast<std::size_t>(ix) * ny + iy] = line[static_cast<std::size_t>(ix)];
  }
}

// Signed-mode wrap of -m on an axis of size n, staying in (-n/2, n/2].
int conjugate_mode(int m, int n) {
  int c = -m;
  if (c <= -(n - n / 2)) c += n;  // -n/2 aliases to +n/2 for even n
  if (c > n / 2) c -= n;
  return c;
}

}  // namespace

GridField::GridField(int nx_, int ny_, Domain dom)
    : nx(nx_), ny(ny_), domain(std::move(dom)),
      values(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), 0.0) {
  if (nx < 2 || ny < 2) throw InvalidInput("GridField: resolution must be >= 2 per axis");
  if (domain.dim() != 2) throw InvalidInput("GridField: 2-D domain required");
}

std::array<Real, 2> Spectrum::angular_frequency(int jx, int jy) const {
  return {kTwoPi * signed_mode(jx, nx) / domain.length(0),
          kTwoPi * signed_mode(jy, ny) / domain.length(1)};
}

std::array<Real, 2> Spectrum::cyclic_frequency(int jx, int jy) const {
  return {signed_mode(jx, nx) / domain.length(0), signed_mode(jy, ny) / domain.length(1)};
}

GridField sample_on_grid(const std::function<Real(Real, Real)>& f, const Domain& domain,
                         int nx, int ny) {
  GridField g(nx, ny, domain);
  for (int ix = 0; ix < nx; ++ix) {
    const Real x = g.x_of(ix);
    for (int iy = 0; iy < ny; ++iy) {
      const Real y = g.y_of(iy);
      const Real v = f(x, y);
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << "sample_on_grid: non-finite value at (x=" << x << ", y=" << y << ")";
        throw std::runtime_error(msg.str());
      }
      g.at(ix, iy) = v;
    }
  }
  return g;
}

Spectrum dft2(const GridField& g) {
  Spectrum s;
  s.nx = g.nx;
  s.ny = g.ny;
  s.domain = g.domain;
  s.coeffs.assign(g.values.begin(), g.values.end());
  transform2(s.coeffs, s.nx, s.ny, -1);
  const Real scale = 1.0 / (static_cast<Real>(s.nx) * static_cast<Real>(s.ny));
  for (Complex& c : s.coeffs) c *= scale;
  return s;
}

GridField inverse_dft2(const Spectrum& s) {
  std::vector<Complex> data = s.coeffs;
  transform2(data, s.nx, s.ny, +1);
  GridField g(s.nx, s.ny, s.domain);
  for (std::size_t i = 0; i < data.size(); ++i) g.values[i] = data[i].real();
  return g;
}

SpectralModes extract_top_modes(const Spectrum& s, int n_f) {
  if (n_f < 1) throw InvalidInput("extract_top_modes: n_f must be >= 1");

  struct Candidate {
    Real raw_amp;
    Real theta;
    std::array<Real, 2> k;
    std::array<int, 2> mode;
  };
  std::vector<Candidate> cands;
  cands.reserve(s.coeffs.size() / 2 + 2);

  const std::array<Real, 2> lo{s.domain.lo[0], s.domain.lo[1]};
  for (int jx = 0; jx < s.nx; ++jx) {
    const int mx = Spectrum::signed_mode(jx, s.nx);
    for (int jy = 0; jy < s.ny; ++jy) {
      const int my = Spectrum::signed_mode(jy, s.ny);
      const int cx = conjugate_mode(mx, s.nx);
      const int cy = conjugate_mode(my, s.ny);
      const bool self_conjugate = (cx == mx && cy == my);
      if (!self_conjugate) {
        // Keep one representative per conjugate pair: the lexicographically
        // larger of (my, mx) vs its partner. This reduces to "my > 0, plus
        // mx >= 0 on the my = 0 line" away from the Nyquist rows.
        if (std::pair(my, mx) < std::pair(cy, cx)) continue;
      }
      const Complex c = s.at(jx, jy);
      const std::array<Real, 2> k = s.angular_frequency(jx, jy);
      Candidate cand;
      cand.k = k;
      cand.mode = {mx, my};
      if (self_conjugate) {
        cand.raw_amp = std::abs(c.real());
        cand.theta = (c.real() < 0.0 ? kPi : 0.0) - (k[0] * lo[0] + k[1] * lo[1]);
      } else {
        cand.raw_amp = 2.0 * std::abs(c);
        cand.theta = std::arg(c) - (k[0] * lo[0] + k[1] * lo[1]);
      }
      cands.push_back(cand);
    }
  }

  if (n_f > static_cast<int>(cands.size())) {
    throw InvalidInput("extract_top_modes: n_f exceeds available non-redundant modes");
  }

  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.raw_amp != b.raw_amp) return a.raw_amp > b.raw_amp;
    return std::pair(a.mode[1], a.mode[0]) < std::pair(b.mode[1], b.mode[0]);
  });

  SpectralModes out;
  out.scale = cands.front().raw_amp;
  out.modes.reserve(static_cast<std::size_t>(n_f));
  for (int i = 0; i < n_f; ++i) {
    const Candidate& c = cands[static_cast<std::size_t>(i)];
    Mode m;
    m.k = c.k;
    m.alpha = out.scale > 0.0 ? c.raw_amp / out.scale : 0.0;
    m.theta = c.theta;
    m.mode_index = c.mode;
    out.modes.push_back(m);
  }
  return out;
}

GridField reconstruct_from_modes(const SpectralModes& m, const Domain& domain, int nx, int ny) {
  GridField g(nx, ny, domain);
  for (int ix = 0; ix < nx; ++ix) {
    const Real x = g.x_of(ix);
    for (int iy = 0; iy < ny; ++iy) {
      const Real y = g.y_of(iy);
      Real acc = 0.0;
      for (const Mode& mode : m.modes) {
        acc += mode.alpha * std::cos(mode.k[0] * x + mode.k[1] * y + mode.theta);
      }
      g.at(ix, iy) = m.scale * acc;
    }
  }
  return g;
}

GridField psd(const Spectrum& s) {
  GridField p(s.nx, s.ny, s.domain);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) p.values[i] = std::norm(s.coeffs[i]);
  return p;
}

FrequencyDistribution normalize_psd(const GridField& p) {
  Real total = 0.0;
  for (Real v : p.values) {
    if (v < 0.0) throw InvalidInput("normalize_psd: negative PSD entry");
    total += v;
  }
  if (total <= 0.0) throw DegenerateResidual("normalize_psd: PSD is identically zero");

  FrequencyDistribution d;
  d.support.reserve(p.values.size());
  d.probabilities.reserve(p.values.size());
  for (int jx = 0; jx < p.nx; ++jx) {
    const int mx = Spectrum::signed_mode(jx, p.nx);
    for (int jy = 0; jy < p.ny; ++jy) {
      const int my = Spectrum::signed_mode(jy, p.ny);
      d.support.push_back({mx / p.domain.length(0), my / p.domain.length(1)});
      d.probabilities.push_back(p.at(jx, jy) / total);
    }
  }
  return d;
}

std::vector<std::array<Real, 2>> sample_frequencies(const FrequencyDistribution& p, int m,
                                                    std::uint64_t seed) {
  if (m < 1) throw InvalidInput("sample_frequencies: m must be >= 1");
  std::vector<Real> cdf(p.probabilities.size());
  std::partial_sum(p.probabilities.begin(), p.probabilities.end(), cdf.begin());
  cdf.back() = 1.0;  // guard against rounding in the final bin

  Rng rng(seed);
  std::vector<std::array<Real, 2>> draws;
  draws.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const Real u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t idx = std::min<std::size_t>(
        static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    draws.push_back(p.support[idx]);
  }
  return draws;
}

void build_rff_layer(const std::vector<std::array<Real, 2>>& freqs, std::uint64_t seed,
                     MatX& B, VecX& b) {
  if (freqs.empty()) throw InvalidInput("build_rff_layer: empty frequency list");
  const int m = static_cast<int>(freqs.size());
  B.resize(m, 2);
  b.resize(m);
  Rng rng(seed);
  for (int j = 0; j < m; ++j) {
    B(j, 0) = freqs[static_cast<std::size_t>(j)][0];
    B(j, 1) = freqs[static_cast<std::size_t>(j)][1];
    b(j) = rng.uniform(0.0, kTwoPi);
  }
}

}  // namespace mspinn::spectral
