#pragma once

#include <functional>

#include "mspinn/common.hpp"

namespace mspinn::optim {

/// Objective callback: fills `grad` (same length as params) and returns the
/// loss value.
using Objective = std::function<Real(const VecX& params, VecX& grad)>;

struct OptimConfig {
  long adam_steps = 5000;
  Real adam_lr = 1e-3;
  Real adam_beta1 = 0.9;
  Real adam_beta2 = 0.999;
  Real adam_eps = 1e-8;
  long lbfgs_max_iters = 2000;
  int lbfgs_history = 10;
  Real lbfgs_grad_tol = 1e-9;
  Real wolfe_c1 = 1e-4;  // sufficient decrease
  Real wolfe_c2 = 0.9;   // curvature

  void validate() const;
};

enum class Phase { adam, lbfgs };

struct LossSample {
  long step;
  Phase phase;
  Real loss;
};

struct OptimResult {
  VecX params;
  std::vector<LossSample> history;
  bool line_search_failed = false;  // L-BFGS stopped early on a failed search
  bool wolfe_verified = true;       // every accepted step re-checked both conditions
  long iterations = 0;
};

/// Standard Adam with bias correction; runs exactly cfg.adam_steps updates.
/// Throws TrainingAbort (step index in the message) on a non-finite loss.
OptimResult adam_minimize(const Objective& objective, const VecX& initial,
                          const OptimConfig& cfg);

/// L-BFGS with two-loop recursion and a strong-Wolfe line search. Stops at
/// the gradient tolerance, the iteration cap, or a failed line search (the
/// latter returns best-so-far with `line_search_failed` set).
OptimResult lbfgs_minimize(const Objective& objective, const VecX& initial,
                           const OptimConfig& cfg);

}  // namespace mspinn::optim
