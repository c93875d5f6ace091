#pragma once

#include <functional>
#include <span>

#include "mspinn/network.hpp"

namespace mspinn::autodiff {

using network::NetworkParams;

/// Value, input gradient, and diagonal of the input Hessian of one network
/// output at one point.
struct DerivativeBundle {
  Real value = 0.0;
  VecX gradient;      // length = input dimension
  VecX hessian_diag;  // length = input dimension
};

/// Batched bundles: value(b, o) etc. for point b and output component o.
/// gradient[i] / hessian[i] hold the derivative along input axis i.
struct BatchBundles {
  MatX value;
  std::vector<MatX> gradient;
  std::vector<MatX> hessian;

  void resize(Eigen::Index batch, Eigen::Index out, int dim);
  void set_zero();
};

/// Loss adjoints with respect to a BatchBundles (same shapes).
using BatchSeeds = BatchBundles;

/// Recorded forward jets, consumed by backprop(). Reusable across calls to
/// avoid reallocation in optimizer loops.
struct JetTrace {
  struct LayerRecord {
    std::vector<MatX> zg, zh;      // pre-activation gradient / hessian jets
    MatX av;                       // post-activation values
    std::vector<MatX> ag, ah;      // post-activation jets
    MatX act_a;                    // tanh(z), or cos(z) for cosine layers
    MatX act_b;                    // 1 - tanh(z)^2, or sin(z) for cosine layers
  };
  MatX input;
  std::vector<LayerRecord> layers;
};

class UnsupportedLoss : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Forward pass through the network propagating (value, gradient,
/// hessian-diagonal) jets for a batch of points (rows of X). When `trace` is
/// non-null the intermediate jets are recorded for a later backprop().
void eval_batch(const NetworkParams& net, const MatX& X, BatchBundles& out,
                JetTrace* trace = nullptr);

/// Values only (no derivative streams); cheaper for solution-grid export.
MatX forward_values(const NetworkParams& net, const MatX& X);

/// Single-point evaluation; one bundle per output component. Derivatives are
/// exact to rounding (jet propagation, no finite differencing).
std::vector<DerivativeBundle> eval_with_derivatives(const NetworkParams& net, const VecX& x);

/// Reverse sweep through a recorded forward pass. `seeds` holds the loss
/// derivative with respect to every bundle entry; the resulting parameter
/// gradient (canonical flattening order) is accumulated into `grad`.
void backprop(const NetworkParams& net, const JetTrace& trace, const BatchSeeds& seeds,
              VecX& grad);

/// Per-point loss callback: receives the bundles of all output components at
/// one point and must return the loss contribution while filling the seed
/// bundles (derivative of that contribution with respect to each entry).
using PointLoss = std::function<Real(Eigen::Index point, std::span<const DerivativeBundle>,
                                     std::span<DerivativeBundle>)>;

/// Exact gradient of sum_p loss(p) with respect to every trainable network
/// parameter, including paths through first and second input derivatives.
/// Throws UnsupportedLoss if the callback produces non-finite values.
Real loss_parameter_gradient(const NetworkParams& net, const MatX& X, const PointLoss& loss,
                             VecX& grad);

}  // namespace mspinn::autodiff
