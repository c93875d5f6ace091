#pragma once

#include <optional>

#include "mspinn/autodiff.hpp"
#include "mspinn/optim.hpp"
#include "mspinn/problems.hpp"
#include "mspinn/spectral.hpp"

namespace mspinn::multistage {

enum class Method { pinn, msnn, si_mspinn, rff_mspinn };

const char* to_string(Method m);
std::optional<Method> method_from_string(const std::string& s);

struct CollocationCounts {
  int interior = 2540;
  int boundary = 80;
  int initial = 80;  // ignored for time-independent problems
};

struct LossWeights {
  Real pde = 1.0;
  Real boundary = 1.0;
  Real initial = 1.0;
};

struct RunConfig {
  Method method = Method::pinn;
  int stages = 2;  // residual-correction stages after stage 0; 0 = plain PINN
  network::InitConfig init;
  optim::OptimConfig optim;
  CollocationCounts counts;
  LossWeights weights;
  int spectrum_grid = 64;
  std::uint64_t master_seed = 1;

  void validate() const;
};

/// One trained stage. `epsilon` is the residual RMS that entered the stage
/// (1 for stage 0); the composite applies it as the stage's output scale.
struct StageRecord {
  network::NetworkParams net;
  Real epsilon = 1.0;
  std::vector<optim::LossSample> loss_history;
  Real stage_objective = 0.0;      // final normalized training objective
  Real composite_loss = 0.0;       // final unscaled full PINN loss
  Real residual_rms_after = 0.0;   // interior residual RMS on the spectrum grid
  std::uint64_t seed = 0;
  std::string init_kind;
  Real kappa = 1.0;  // msnn scale factor (1 elsewhere)
};

/// u_s(x) = sum_j epsilon_j u_j(x).
struct CompositeSolution {
  std::vector<StageRecord> stages;

  int input_dim() const { return stages.front().net.input_dim(); }
  int output_dim() const { return stages.front().net.output_dim(); }

  /// Batched composite values (rows of X are points).
  MatX values(const MatX& X) const;
  /// Batched composite bundles (values + input derivatives).
  void bundles(const MatX& X, autodiff::BatchBundles& out) const;
};

struct PointSets {
  MatX interior;
  MatX boundary;
  MatX initial;  // zero rows when the problem has no initial set
};

struct RunReport {
  std::string method;
  std::string problem;
  std::uint64_t master_seed = 0;
  /// Interior residual RMS on the spectrum grid entering stage 1, 2, ...,
  /// plus the final value: [rms(r_0), ..., rms(r_s)].
  std::vector<Real> epsilon_history;
  std::vector<Real> l2_errors;  // per output component (empty without oracle)
  bool monotone_epsilon = true;
  bool early_stop = false;          // residual degenerated below 1e-14
  bool rff_uniform_fallback = false;  // PSD was all-zero, sampled uniformly
  bool line_search_warnings = false;
};

struct RunOutput {
  CompositeSolution solution;
  RunReport report;
};

/// Root mean square of a sample set. Rejects empty input.
Real rms(std::span<const Real> values);

/// Collocation sets for one stage (uniform interior, per-segment boundary).
PointSets sample_point_sets(const problems::Problem& problem, const CollocationCounts& counts,
                            std::uint64_t seed);

/// Full PINN loss of a bare network and its gradient with respect to every
/// trainable parameter.
std::pair<Real, VecX> pinn_loss(const network::NetworkParams& net,
                                const problems::Problem& problem, const PointSets& pts,
                                const LossWeights& weights);

/// Full PINN loss of a composite solution (no gradient).
Real pinn_loss_value(const CompositeSolution& solution, const problems::Problem& problem,
                     const PointSets& pts, const LossWeights& weights);

/// Pointwise PDE equation residual of the composite on a uniform grid,
/// one field per residual component.
std::vector<spectral::GridField> residual_field(const CompositeSolution& solution,
                                                const problems::Problem& problem,
                                                int grid_n);

/// Relative L2 error per output component against the problem's reference
/// oracle on an inclusive uniform grid.
VecX evaluate_error(const CompositeSolution& solution, const problems::Problem& problem,
                    int grid_n);

/// Multistage drivers (Algorithms 1 and 2 plus the two baselines). `run`
/// dispatches on cfg.method; the named entry points check it.
RunOutput run(const RunConfig& cfg, const problems::Problem& problem);
RunOutput run_si_mspinn(const RunConfig& cfg, const problems::Problem& problem);
RunOutput run_rff_mspinn(const RunConfig& cfg, const problems::Problem& problem);
RunOutput run_msnn_baseline(const RunConfig& cfg, const problems::Problem& problem);

}  // namespace mspinn::multistage
