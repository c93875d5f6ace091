#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mspinn {

using Real = double;
using VecX = Eigen::VectorXd;
using MatX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Axis-aligned box domain, one [lo, hi) pair per input axis.
struct Domain {
  std::vector<Real> lo;
  std::vector<Real> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  Real length(int axis) const { return hi[axis] - lo[axis]; }
};

/// Thrown when a precondition on user-supplied data fails.
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an optimization run hits a non-finite loss or residual.
class TrainingAbort : public std::runtime_error {
public:
  TrainingAbort(const std::string& msg, int stage, long step)
      : std::runtime_error(msg), stage_index(stage), step_index(step) {}
  int stage_index;
  long step_index;
};

// ---------------------------------------------------------------------------
// Deterministic random numbers.
//
// std::mt19937_64 output is fully specified by the standard; the uniform
// mappings below are done by hand so that streams are bit-identical across
// compilers and platforms (std::uniform_real_distribution is not portable).
// ---------------------------------------------------------------------------
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  Real uniform() {
    return static_cast<Real>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  Real uniform(Real lo, Real hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t next_u64() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Stream purposes drawn from one master seed. Keeping the derivation in a
/// single place guarantees that independent substreams never collide.
enum class SeedPurpose : std::uint64_t {
  xavier_init = 1,
  collocation = 2,
  rff_frequencies = 3,
  rff_phases = 4,
};

inline std::uint64_t derive_seed(std::uint64_t master, int stage, SeedPurpose purpose) {
  std::uint64_t h = detail::splitmix64(master);
  h = detail::splitmix64(h ^ (0x632be59bd9b4e019ULL * static_cast<std::uint64_t>(stage + 1)));
  h = detail::splitmix64(h ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(purpose)));
  return h;
}

inline constexpr Real kPi = 3.14159265358979323846;
inline constexpr Real kTwoPi = 6.28318530717958647692;

}  // namespace mspinn
