#include "mspinn/autodiff.hpp"

#include <cmath>

namespace mspinn::autodiff {

using network::FirstLayerKind;
using network::Layer;

namespace {

void ensure_shape(MatX& m, Eigen::Index rows, Eigen::Index cols) {
  if (m.rows() != rows || m.cols() != cols) m.resize(rows, cols);
}

void ensure_count(std::vector<MatX>& v, std::size_t n) {
  if (v.size() != n) v.resize(n);
}

enum class Act { tanh_fn, cosine, identity };

Act layer_activation(const NetworkParams& net, std::size_t li) {
  if (li + 1 == net.layers.size()) return Act::identity;
  if (li == 0 && net.first_layer_kind != FirstLayerKind::plain) return Act::cosine;
  return Act::tanh_fn;
}

Real layer_wscale(const NetworkParams& net, std::size_t li) {
  return (li == 0 && net.first_layer_kind == FirstLayerKind::rff) ? kTwoPi : 1.0;
}

}  // namespace

void BatchBundles::resize(Eigen::Index batch, Eigen::Index out, int dim) {
  ensure_shape(value, batch, out);
  ensure_count(gradient, static_cast<std::size_t>(dim));
  ensure_count(hessian, static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    ensure_shape(gradient[static_cast<std::size_t>(i)], batch, out);
    ensure_shape(hessian[static_cast<std::size_t>(i)], batch, out);
  }
}

void BatchBundles::set_zero() {
  value.setZero();
  for (MatX& m : gradient) m.setZero();
  for (MatX& m : hessian) m.setZero();
}

void eval_batch(const NetworkParams& net, const MatX& X, BatchBundles& out, JetTrace* trace) {
  net.validate();
  const Eigen::Index batch = X.rows();
  const int d = net.input_dim();
  const std::size_t ds = static_cast<std::size_t>(d);
  if (X.cols() != d) throw InvalidInput("eval_batch: input dimension mismatch");

  thread_local JetTrace scratch;
  JetTrace& tr = trace ? *trace : scratch;
  tr.input = X;
  tr.layers.resize(net.layers.size());

  // Jets of the input itself: one-hot gradient indicators, zero curvature.
  // Handled symbolically in the first layer (no materialized matrices).
  MatX zv;

  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const Layer& L = net.layers[li];
    const Real ws = layer_wscale(net, li);
    const Eigen::Index width = L.weights.rows();
    JetTrace::LayerRecord& rec = tr.layers[li];
    ensure_count(rec.zg, ds);
    ensure_count(rec.zh, ds);
    ensure_count(rec.ag, ds);
    ensure_count(rec.ah, ds);

    zv.noalias() = (li == 0 ? X : tr.layers[li - 1].av) * L.weights.transpose();
    if (ws != 1.0) zv *= ws;
    zv.rowwise() += L.biases.transpose();

    for (int i = 0; i < d; ++i) {
      const std::size_t ii = static_cast<std::size_t>(i);
      MatX& zg = rec.zg[ii];
      MatX& zh = rec.zh[ii];
      if (li == 0) {
        // a_prev.g[i] is the one-hot indicator of axis i; a_prev.h[i] is zero.
        ensure_shape(zg, batch, width);
        zg.rowwise() = ws * L.weights.col(i).transpose();
        ensure_shape(zh, batch, width);
        zh.setZero();
      } else {
        const JetTrace::LayerRecord& prev = tr.layers[li - 1];
        zg.noalias() = prev.ag[ii] * L.weights.transpose();
        zh.noalias() = prev.ah[ii] * L.weights.transpose();
        if (ws != 1.0) {
          zg *= ws;
          zh *= ws;
        }
      }
    }

    switch (layer_activation(net, li)) {
      case Act::identity: {
        rec.av = zv;
        for (int i = 0; i < d; ++i) {
          rec.ag[static_cast<std::size_t>(i)] = rec.zg[static_cast<std::size_t>(i)];
          rec.ah[static_cast<std::size_t>(i)] = rec.zh[static_cast<std::size_t>(i)];
        }
        break;
      }
      case Act::tanh_fn: {
        ensure_shape(rec.act_a, batch, width);
        rec.act_a.array() = zv.array().tanh();
        const auto t = rec.act_a.array();
        ensure_shape(rec.act_b, batch, width);
        rec.act_b.array() = 1.0 - t.square();  // sigma'
        const auto sp = rec.act_b.array();
        rec.av = rec.act_a;
        for (int i = 0; i < d; ++i) {
          const std::size_t ii = static_cast<std::size_t>(i);
          const auto zg = rec.zg[ii].array();
          const auto zh = rec.zh[ii].array();
          ensure_shape(rec.ag[ii], batch, width);
          rec.ag[ii].array() = sp * zg;
          ensure_shape(rec.ah[ii], batch, width);
          rec.ah[ii].array() = (-2.0 * t * sp) * zg.square() + sp * zh;
        }
        break;
      }
      case Act::cosine: {
        ensure_shape(rec.act_a, batch, width);
        ensure_shape(rec.act_b, batch, width);
        rec.act_a.array() = zv.array().cos();
        rec.act_b.array() = zv.array().sin();
        const auto c = rec.act_a.array();
        const auto s = rec.act_b.array();
        const bool amp = net.has_amplitudes();
        for (int i = -1; i < d; ++i) {
          MatX& dst = i < 0 ? rec.av : rec.ag[static_cast<std::size_t>(i)];
          ensure_shape(dst, batch, width);
          if (i < 0) {
            dst.array() = c;
          } else {
            const std::size_t ii = static_cast<std::size_t>(i);
            dst.array() = -s * rec.zg[ii].array();
            MatX& dh = rec.ah[ii];
            ensure_shape(dh, batch, width);
            dh.array() = -(c * rec.zg[ii].array().square() + s * rec.zh[ii].array());
            if (amp) dh.array().rowwise() *= net.amplitudes.transpose().array();
          }
          if (amp) dst.array().rowwise() *= net.amplitudes.transpose().array();
        }
        break;
      }
    }
  }

  const JetTrace::LayerRecord& last = tr.layers.back();
  out.value = last.av;
  out.gradient = last.ag;
  out.hessian = last.ah;
}

MatX forward_values(const NetworkParams& net, const MatX& X) {
  net.validate();
  if (X.cols() != net.input_dim()) throw InvalidInput("forward_values: input dimension mismatch");
  MatX cur = X;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const Layer& L = net.layers[li];
    MatX z = cur * L.weights.transpose();
    const Real ws = layer_wscale(net, li);
    if (ws != 1.0) z *= ws;
    z.rowwise() += L.biases.transpose();
    switch (layer_activation(net, li)) {
      case Act::identity:
        cur = std::move(z);
        break;
      case Act::tanh_fn:
        cur = z.array().tanh().matrix();
        break;
      case Act::cosine:
        cur = z.array().cos().matrix();
        if (net.has_amplitudes()) {
          cur = (cur.array().rowwise() * net.amplitudes.transpose().array()).matrix();
        }
        break;
    }
  }
  return cur;
}

std::vector<DerivativeBundle> eval_with_derivatives(const NetworkParams& net, const VecX& x) {
  BatchBundles bb;
  eval_batch(net, x.transpose(), bb);
  const int d = net.input_dim();
  std::vector<DerivativeBundle> out(static_cast<std::size_t>(net.output_dim()));
  for (int o = 0; o < net.output_dim(); ++o) {
    DerivativeBundle& b = out[static_cast<std::size_t>(o)];
    b.value = bb.value(0, o);
    b.gradient.resize(d);
    b.hessian_diag.resize(d);
    for (int i = 0; i < d; ++i) {
      b.gradient(i) = bb.gradient[static_cast<std::size_t>(i)](0, o);
      b.hessian_diag(i) = bb.hessian[static_cast<std::size_t>(i)](0, o);
    }
  }
  return out;
}

void backprop(const NetworkParams& net, const JetTrace& trace, const BatchSeeds& seeds,
              VecX& grad) {
  const int d = net.input_dim();
  const std::size_t ds = static_cast<std::size_t>(d);
  if (grad.size() != static_cast<Eigen::Index>(net.parameter_count())) {
    throw InvalidInput("backprop: gradient vector has wrong length");
  }

  std::vector<Eigen::Index> w_off(net.layers.size());
  Eigen::Index pos = 0;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    w_off[li] = pos;
    pos += net.layers[li].weights.size() + net.layers[li].biases.size();
    if (li == 0 && net.has_amplitudes()) pos += net.amplitudes.size();
  }

  thread_local MatX rv, sv, gW;
  thread_local std::vector<MatX> rg, rh, sg, sh;
  ensure_count(rg, ds);
  ensure_count(rh, ds);
  ensure_count(sg, ds);
  ensure_count(sh, ds);
  rv = seeds.value;
  for (std::size_t i = 0; i < ds; ++i) {
    rg[i] = seeds.gradient[i];
    rh[i] = seeds.hessian[i];
  }

  for (int li = static_cast<int>(net.layers.size()) - 1; li >= 0; --li) {
    const Layer& L = net.layers[static_cast<std::size_t>(li)];
    const JetTrace::LayerRecord& rec = trace.layers[static_cast<std::size_t>(li)];
    const Real ws = layer_wscale(net, static_cast<std::size_t>(li));
    const Eigen::Index batch = rv.rows();
    const Eigen::Index width = L.weights.rows();

    switch (layer_activation(net, static_cast<std::size_t>(li))) {
      case Act::identity: {
        sv.swap(rv);
        for (std::size_t i = 0; i < ds; ++i) {
          sg[i].swap(rg[i]);
          sh[i].swap(rh[i]);
        }
        break;
      }
      case Act::tanh_fn: {
        const auto t = rec.act_a.array();
        const auto sp = rec.act_b.array();  // 1 - t^2, cached by eval
        ensure_shape(sv, batch, width);
        sv.array() = rv.array() * sp;
        for (std::size_t i = 0; i < ds; ++i) {
          const auto zg = rec.zg[i].array();
          const auto zh = rec.zh[i].array();
          const auto spp = -2.0 * t * sp;
          sv.array() += rg[i].array() * spp * zg +
                        rh[i].array() * ((sp * (6.0 * t.square() - 2.0)) * zg.square() +
                                         spp * zh);
          ensure_shape(sg[i], batch, width);
          sg[i].array() = rg[i].array() * sp + 2.0 * rh[i].array() * spp * zg;
          ensure_shape(sh[i], batch, width);
          sh[i].array() = rh[i].array() * sp;
        }
        break;
      }
      case Act::cosine: {
        const auto c = rec.act_a.array();
        const auto s = rec.act_b.array();
        const bool amp = net.has_amplitudes();
        Eigen::ArrayXd arow =
            amp ? Eigen::ArrayXd(net.amplitudes.array()) : Eigen::ArrayXd::Ones(width);
        // sigma' = -A sin, sigma'' = -A cos, sigma''' = A sin.
        ensure_shape(sv, batch, width);
        sv.array() = rv.array() * ((-s).rowwise() * arow.transpose());
        Eigen::RowVectorXd ga = (rv.array() * c).colwise().sum().matrix();
        for (std::size_t i = 0; i < ds; ++i) {
          const auto zg = rec.zg[i].array();
          const auto zh = rec.zh[i].array();
          sv.array() += (rg[i].array() * ((-c) * zg) +
                         rh[i].array() * (s * zg.square() - c * zh))
                            .rowwise() *
                        arow.transpose();
          ensure_shape(sg[i], batch, width);
          sg[i].array() = (rg[i].array() * (-s) + 2.0 * rh[i].array() * (-c) * zg)
                              .rowwise() *
                          arow.transpose();
          ensure_shape(sh[i], batch, width);
          sh[i].array() = (rh[i].array() * (-s)).rowwise() * arow.transpose();
          ga.array() += (rg[i].array() * (-s * zg)).colwise().sum() +
                        (rh[i].array() * (-(c * zg.square() + s * zh))).colwise().sum();
        }
        if (amp) {
          const Eigen::Index aoff = w_off[static_cast<std::size_t>(li)] + L.weights.size() +
                                    L.biases.size();
          grad.segment(aoff, net.amplitudes.size()) += ga.transpose();
        }
        break;
      }
    }

    // Linear part: z = ws * a_prev W^T + b.
    if (li > 0) {
      const JetTrace::LayerRecord& prev = trace.layers[static_cast<std::size_t>(li - 1)];
      gW.noalias() = sv.transpose() * prev.av;
      for (std::size_t i = 0; i < ds; ++i) {
        gW.noalias() += sg[i].transpose() * prev.ag[i];
        gW.noalias() += sh[i].transpose() * prev.ah[i];
      }
    } else {
      gW.noalias() = sv.transpose() * trace.input;
      for (int i = 0; i < d; ++i) {
        gW.col(i) += sg[static_cast<std::size_t>(i)].colwise().sum().transpose();
      }
    }
    if (ws != 1.0) gW *= ws;

    const Eigen::Index off = w_off[static_cast<std::size_t>(li)];
    grad.segment(off, gW.size()) += Eigen::Map<const VecX>(gW.data(), gW.size());
    grad.segment(off + gW.size(), L.biases.size()) += sv.colwise().sum().transpose();

    if (li > 0) {
      rv.noalias() = sv * L.weights;
      if (ws != 1.0) rv *= ws;
      for (std::size_t i = 0; i < ds; ++i) {
        rg[i].noalias() = sg[i] * L.weights;
        rh[i].noalias() = sh[i] * L.weights;
        if (ws != 1.0) {
          rg[i] *= ws;
          rh[i] *= ws;
        }
      }
    }
  }
}

Real loss_parameter_gradient(const NetworkParams& net, const MatX& X, const PointLoss& loss,
                             VecX& grad) {
  BatchBundles bb;
  JetTrace trace;
  eval_batch(net, X, bb, &trace);

  const Eigen::Index batch = X.rows();
  const int out_dim = net.output_dim();
  const int d = net.input_dim();

  BatchSeeds seeds;
  seeds.resize(batch, out_dim, d);
  seeds.set_zero();

  std::vector<DerivativeBundle> bundles(static_cast<std::size_t>(out_dim));
  std::vector<DerivativeBundle> point_seeds(static_cast<std::size_t>(out_dim));
  for (auto& b : bundles) {
    b.gradient.resize(d);
    b.hessian_diag.resize(d);
  }
  for (auto& b : point_seeds) {
    b.gradient.resize(d);
    b.hessian_diag.resize(d);
  }

  Real total = 0.0;
  for (Eigen::Index p = 0; p < batch; ++p) {
    for (int o = 0; o < out_dim; ++o) {
      DerivativeBundle& b = bundles[static_cast<std::size_t>(o)];
      b.value = bb.value(p, o);
      for (int i = 0; i < d; ++i) {
        b.gradient(i) = bb.gradient[static_cast<std::size_t>(i)](p, o);
        b.hessian_diag(i) = bb.hessian[static_cast<std::size_t>(i)](p, o);
      }
      DerivativeBundle& sb = point_seeds[static_cast<std::size_t>(o)];
      sb.value = 0.0;
      sb.gradient.setZero();
      sb.hessian_diag.setZero();
    }
    const Real contribution = loss(p, bundles, point_seeds);
    if (!std::isfinite(contribution)) {
      throw UnsupportedLoss("loss_parameter_gradient: non-finite loss contribution");
    }
    total += contribution;
    for (int o = 0; o < out_dim; ++o) {
      const DerivativeBundle& sb = point_seeds[static_cast<std::size_t>(o)];
      if (!std::isfinite(sb.value) || !sb.gradient.allFinite() || !sb.hessian_diag.allFinite()) {
        throw UnsupportedLoss("loss_parameter_gradient: non-finite loss derivative");
      }
      seeds.value(p, o) = sb.value;
      for (int i = 0; i < d; ++i) {
        seeds.gradient[static_cast<std::size_t>(i)](p, o) = sb.gradient(i);
        seeds.hessian[static_cast<std::size_t>(i)](p, o) = sb.hessian_diag(i);
      }
    }
  }

  grad = VecX::Zero(static_cast<Eigen::Index>(net.parameter_count()));
  backprop(net, trace, seeds, grad);
  return total;
}

}  // namespace mspinn::autodiff
