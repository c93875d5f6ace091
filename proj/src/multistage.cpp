#include "mspinn/multistage.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mspinn::multistage {

using autodiff::BatchBundles;
using autodiff::BatchSeeds;
using autodiff::DerivativeBundle;
using autodiff::JetTrace;
using network::NetworkParams;
using problems::PointResidual;
using problems::Problem;
using spectral::GridField;
using spectral::Spectrum;

const char* to_string(Method m) {
  switch (m) {
    case Method::pinn: return "pinn";
    case Method::msnn: return "msnn";
    case Method::si_mspinn: return "si_mspinn";
    case Method::rff_mspinn: return "rff_mspinn";
  }
  return "?";
}

std::optional<Method> method_from_string(const std::string& s) {
  if (s == "pinn") return Method::pinn;
  if (s == "msnn") return Method::msnn;
  if (s == "si_mspinn") return Method::si_mspinn;
  if (s == "rff_mspinn") return Method::rff_mspinn;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (stages < 0) throw InvalidInput("RunConfig: stages must be >= 0");
  if (counts.interior < 1 || counts.boundary < 1 || counts.initial < 1) {
    throw InvalidInput("RunConfig: collocation counts must be >= 1");
  }
  if (weights.pde <= 0.0 || weights.boundary <= 0.0 || weights.initial <= 0.0) {
    throw InvalidInput("RunConfig: loss weights must be > 0");
  }
  if (spectrum_grid < 2) throw InvalidInput("RunConfig: spectrum grid must be >= 2");
  init.validate();
  optim.validate();
}

Real rms(std::span<const Real> values) {
  if (values.empty()) throw InvalidInput("rms: empty input");
  Real acc = 0.0;
  for (Real v : values) acc += v * v;
  return std::sqrt(acc / static_cast<Real>(values.size()));
}

namespace {

void axpy_bundles(Real a, const BatchBundles& src, BatchBundles& dst) {
  dst.value += a * src.value;
  for (std::size_t i = 0; i < src.gradient.size(); ++i) {
    dst.gradient[i] += a * src.gradient[i];
    dst.hessian[i] += a * src.hessian[i];
  }
}

}  // namespace

MatX CompositeSolution::values(const MatX& X) const {
  MatX acc = MatX::Zero(X.rows(), output_dim());
  for (const StageRecord& s : stages) {
    acc += s.epsilon * autodiff::forward_values(s.net, X);
  }
  return acc;
}

void CompositeSolution::bundles(const MatX& X, BatchBundles& out) const {
  out.resize(X.rows(), output_dim(), input_dim());
  out.set_zero();
  BatchBundles tmp;
  for (const StageRecord& s : stages) {
    autodiff::eval_batch(s.net, X, tmp);
    axpy_bundles(s.epsilon, tmp, out);
  }
}

PointSets sample_point_sets(const Problem& problem, const CollocationCounts& counts,
                            std::uint64_t seed) {
  PointSets ps;
  ps.interior = problem.sample_interior(counts.interior, detail::splitmix64(seed ^ 0x1111111111111111ULL));
  ps.boundary = problem.sample_boundary(counts.boundary, detail::splitmix64(seed ^ 0x2222222222222222ULL));
  if (problem.time_dependent()) {
    ps.initial = problem.sample_initial(counts.initial, detail::splitmix64(seed ^ 0x3333333333333333ULL));
  } else {
    ps.initial = MatX(0, problem.domain().dim());
  }
  return ps;
}

namespace {

enum class TermKind { interior, boundary, initial };

// Full PINN objective of (frozen composite) + eps * net, normalized by
// 1/eps^2 so stage targets keep O(1) magnitude. Frozen-stage bundles at the
// fixed collocation sets are precomputed once; each objective call evaluates
// only the trainable network.
class StageObjective {
public:
  StageObjective(const Problem& problem, const PointSets& pts, const LossWeights& weights,
                 const CompositeSolution* frozen, Real eps_scale, NetworkParams net)
      : problem_(problem),
        pts_(pts),
        weights_(weights),
        eps_(eps_scale),
        norm_(1.0 / (eps_scale * eps_scale)),
        net_(std::move(net)) {
    out_dim_ = net_.output_dim();
    dim_ = net_.input_dim();
    prep_frozen(frozen, pts_.interior, frozen_interior_);
    prep_frozen(frozen, pts_.boundary, frozen_boundary_);
    prep_frozen(frozen, pts_.initial, frozen_initial_);
    comp_.resize(static_cast<std::size_t>(out_dim_));
    for (auto& b : comp_) {
      b.gradient.resize(dim_);
      b.hessian_diag.resize(dim_);
    }
    x_.resize(dim_);
  }

  Real operator()(const VecX& params, VecX& grad) {
    net_.unflatten(params);
    grad.setZero(params.size());
    Real loss = 0.0;
    loss += term(pts_.interior, frozen_interior_, TermKind::interior, weights_.pde, grad,
                 trace_interior_, live_interior_, seeds_interior_);
    loss += term(pts_.boundary, frozen_boundary_, TermKind::boundary, weights_.boundary, grad,
                 trace_boundary_, live_boundary_, seeds_boundary_);
    loss += term(pts_.initial, frozen_initial_, TermKind::initial, weights_.initial, grad,
                 trace_initial_, live_initial_, seeds_initial_);
    grad *= norm_;
    net_.mask_gradient(grad);
    return loss * norm_;
  }

  /// Unscaled full PINN loss at the given parameters (no gradient).
  Real composite_loss(const VecX& params) {
    VecX grad(params.size());
    const Real scaled = (*this)(params, grad);
    return scaled / norm_;
  }

  const NetworkParams& net_template() const { return net_; }

private:
  void prep_frozen(const CompositeSolution* frozen, const MatX& X, BatchBundles& out) {
    out.resize(X.rows(), out_dim_, dim_);
    out.set_zero();
    if (frozen == nullptr || X.rows() == 0) return;
    BatchBundles tmp;
    for (const StageRecord& s : frozen->stages) {
      autodiff::eval_batch(s.net, X, tmp);
      axpy_bundles(s.epsilon, tmp, out);
    }
  }

  Real term(const MatX& X, const BatchBundles& frozen, TermKind kind, Real weight, VecX& grad,
            JetTrace& trace, BatchBundles& live, BatchSeeds& seeds) {
    const Eigen::Index n = X.rows();
    if (n == 0) return 0.0;
    autodiff::eval_batch(net_, X, live, &trace);
    seeds.resize(n, out_dim_, dim_);
    seeds.set_zero();

    const Real wp = weight / static_cast<Real>(n);
    Real acc = 0.0;
    PointResidual pr;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (int i = 0; i < dim_; ++i) x_(i) = X(p, i);
      for (int o = 0; o < out_dim_; ++o) {
        DerivativeBundle& b = comp_[static_cast<std::size_t>(o)];
        b.value = frozen.value(p, o) + eps_ * live.value(p, o);
        for (int i = 0; i < dim_; ++i) {
          const std::size_t ii = static_cast<std::size_t>(i);
          b.gradient(i) = frozen.gradient[ii](p, o) + eps_ * live.gradient[ii](p, o);
          b.hessian_diag(i) = frozen.hessian[ii](p, o) + eps_ * live.hessian[ii](p, o);
        }
      }
      const std::span<const DerivativeBundle> view(comp_.data(), comp_.size());
      switch (kind) {
        case TermKind::interior: problem_.interior_residual(x_, view, pr, true); break;
        case TermKind::boundary: problem_.boundary_residual(x_, view, pr, true); break;
        case TermKind::initial: problem_.initial_residual(x_, view, pr, true); break;
      }
      for (int c = 0; c < pr.components; ++c) {
        const Real r = pr.r[static_cast<std::size_t>(c)];
        if (!std::isfinite(r)) {
          std::ostringstream msg;
          msg << "non-finite residual at point (" << x_.transpose() << ")";
          throw TrainingAbort(msg.str(), -1, -1);
        }
        acc += wp * r * r;
        const Real f = 2.0 * wp * r * eps_;
        for (int o = 0; o < out_dim_; ++o) {
          const problems::BundleSeed& s = pr.seed(c, o);
          seeds.value(p, o) += f * s.d_value;
          for (int i = 0; i < dim_; ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            seeds.gradient[ii](p, o) += f * s.d_gradient[ii];
            seeds.hessian[ii](p, o) += f * s.d_hessian[ii];
          }
        }
      }
    }
    autodiff::backprop(net_, trace, seeds, grad);
    return acc;
  }

  const Problem& problem_;
  const PointSets& pts_;
  LossWeights weights_;
  Real eps_;
  Real norm_;
  NetworkParams net_;
  int out_dim_ = 0;
  int dim_ = 0;

  BatchBundles frozen_interior_, frozen_boundary_, frozen_initial_;
  BatchBundles live_interior_, live_boundary_, live_initial_;
  BatchSeeds seeds_interior_, seeds_boundary_, seeds_initial_;
  JetTrace trace_interior_, trace_boundary_, trace_initial_;
  std::vector<DerivativeBundle> comp_;
  VecX x_;
};

}  // namespace

std::pair<Real, VecX> pinn_loss(const NetworkParams& net, const Problem& problem,
                                const PointSets& pts, const LossWeights& weights) {
  StageObjective obj(problem, pts, weights, nullptr, 1.0, net);
  const VecX params = net.flatten();
  VecX grad(params.size());
  const Real loss = obj(params, grad);
  return {loss, std::move(grad)};
}

Real pinn_loss_value(const CompositeSolution& solution, const Problem& problem,
                     const PointSets& pts, const LossWeights& weights) {
  if (solution.stages.empty()) throw InvalidInput("pinn_loss_value: empty composite");
  CompositeSolution frozen;
  frozen.stages.assign(solution.stages.begin(), solution.stages.end() - 1);
  const StageRecord& last = solution.stages.back();
  StageObjective obj(problem, pts, weights, frozen.stages.empty() ? nullptr : &frozen,
                     last.epsilon, last.net);
  return obj.composite_loss(last.net.flatten());
}

std::vector<GridField> residual_field(const CompositeSolution& solution, const Problem& problem,
                                      int grid_n) {
  const Domain& dom = problem.domain();
  GridField proto(grid_n, grid_n, dom);
  MatX X(static_cast<Eigen::Index>(grid_n) * grid_n, 2);
  for (int ix = 0; ix < grid_n; ++ix) {
    for (int iy = 0; iy < grid_n; ++iy) {
      const Eigen::Index row = static_cast<Eigen::Index>(ix) * grid_n + iy;
      X(row, 0) = proto.x_of(ix);
      X(row, 1) = proto.y_of(iy);
    }
  }
  BatchBundles bb;
  solution.bundles(X, bb);

  const int out_dim = solution.output_dim();
  std::vector<DerivativeBundle> comp(static_cast<std::size_t>(out_dim));
  for (auto& b : comp) {
    b.gradient.resize(2);
    b.hessian_diag.resize(2);
  }
  std::vector<GridField> fields;
  VecX x(2);
  PointResidual pr;
  bool sized = false;
  for (Eigen::Index p = 0; p < X.rows(); ++p) {
    x = X.row(p).transpose();
    for (int o = 0; o < out_dim; ++o) {
      DerivativeBundle& b = comp[static_cast<std::size_t>(o)];
      b.value = bb.value(p, o);
      for (int i = 0; i < 2; ++i) {
        b.gradient(i) = bb.gradient[static_cast<std::size_t>(i)](p, o);
        b.hessian_diag(i) = bb.hessian[static_cast<std::size_t>(i)](p, o);
      }
    }
    problem.interior_residual(x, std::span<const DerivativeBundle>(comp.data(), comp.size()),
                              pr, false);
    if (!sized) {
      fields.assign(static_cast<std::size_t>(pr.components), proto);
      sized = true;
    }
    for (int c = 0; c < pr.components; ++c) {
      fields[static_cast<std::size_t>(c)].values[static_cast<std::size_t>(p)] =
          pr.r[static_cast<std::size_t>(c)];
    }
  }
  return fields;
}

VecX evaluate_error(const CompositeSolution& solution, const Problem& problem, int grid_n) {
  if (!problem.has_reference()) {
    throw InvalidInput("evaluate_error: problem has no reference oracle");
  }
  if (grid_n < 2) throw InvalidInput("evaluate_error: grid must be >= 2");
  const Domain& dom = problem.domain();
  const Eigen::Index n_pts = static_cast<Eigen::Index>(grid_n) * grid_n;
  MatX X(n_pts, 2);
  for (int ix = 0; ix < grid_n; ++ix) {
    const Real x = dom.lo[0] + dom.length(0) * ix / (grid_n - 1);
    for (int iy = 0; iy < grid_n; ++iy) {
      const Real y = dom.lo[1] + dom.length(1) * iy / (grid_n - 1);
      const Eigen::Index row = static_cast<Eigen::Index>(ix) * grid_n + iy;
      X(row, 0) = x;
      X(row, 1) = y;
    }
  }
  const MatX u = solution.values(X);
  const int out_dim = solution.output_dim();
  VecX num = VecX::Zero(out_dim);
  VecX den = VecX::Zero(out_dim);
  VecX x(2);
  for (Eigen::Index p = 0; p < n_pts; ++p) {
    x = X.row(p).transpose();
    const VecX ref = problem.reference(x);
    for (int o = 0; o < out_dim; ++o) {
      num(o) += (u(p, o) - ref(o)) * (u(p, o) - ref(o));
      den(o) += ref(o) * ref(o);
    }
  }
  VecX err(out_dim);
  for (int o = 0; o < out_dim; ++o) {
    err(o) = den(o) > 0.0 ? std::sqrt(num(o) / den(o)) : std::sqrt(num(o));
  }
  return err;
}

namespace {

struct ResidualAnalysis {
  std::vector<GridField> fields;
  std::vector<Spectrum> spectra;
  Real rms_value = 0.0;
};

ResidualAnalysis analyze_residual(const CompositeSolution& solution, const Problem& problem,
                                  int grid_n) {
  ResidualAnalysis ra;
  ra.fields = residual_field(solution, problem, grid_n);
  Real acc = 0.0;
  std::size_t count = 0;
  for (const GridField& f : ra.fields) {
    ra.spectra.push_back(spectral::dft2(f));
    for (Real v : f.values) {
      acc += v * v;
      ++count;
    }
  }
  ra.rms_value = std::sqrt(acc / static_cast<Real>(count));
  return ra;
}

// For multi-component residuals, mode selection and PSD sampling act on the
// componentwise-dominant spectrum (the coefficient with the larger magnitude
// at each cell).
Spectrum merge_spectra(const std::vector<Spectrum>& spectra) {
  Spectrum s = spectra.front();
  for (std::size_t c = 1; c < spectra.size(); ++c) {
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
      if (std::abs(spectra[c].coeffs[i]) > std::abs(s.coeffs[i])) {
        s.coeffs[i] = spectra[c].coeffs[i];
      }
    }
  }
  return s;
}

GridField total_psd(const std::vector<Spectrum>& spectra) {
  GridField p = spectral::psd(spectra.front());
  for (std::size_t c = 1; c < spectra.size(); ++c) {
    const GridField pc = spectral::psd(spectra[c]);
    for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] += pc.values[i];
  }
  return p;
}

struct TrainOutcome {
  NetworkParams net;
  std::vector<optim::LossSample> history;
  Real stage_objective = 0.0;
  Real composite_loss = 0.0;
  bool line_search_failed = false;
};

TrainOutcome train_stage(const Problem& problem, const PointSets& pts,
                         const LossWeights& weights, const CompositeSolution* frozen,
                         Real eps, NetworkParams init, const optim::OptimConfig& ocfg,
                         int stage_index) {
  StageObjective obj(problem, pts, weights, frozen, eps, std::move(init));
  const optim::Objective fn = [&obj](const VecX& p, VecX& g) { return obj(p, g); };
  const VecX p0 = obj.net_template().flatten();

  TrainOutcome out;
  try {
    optim::OptimResult adam = optim::adam_minimize(fn, p0, ocfg);
    optim::OptimResult lbfgs = optim::lbfgs_minimize(fn, adam.params, ocfg);
    out.history = std::move(adam.history);
    for (optim::LossSample s : lbfgs.history) {
      s.step += ocfg.adam_steps;
      out.history.push_back(s);
    }
    out.line_search_failed = lbfgs.line_search_failed;
    out.net = obj.net_template();
    out.net.unflatten(lbfgs.params);
    VecX g(lbfgs.params.size());
    out.stage_objective = obj(lbfgs.params, g);
    out.composite_loss = out.stage_objective * eps * eps;
  } catch (const TrainingAbort& e) {
    throw TrainingAbort(e.what(), stage_index, e.step_index);
  }
  return out;
}

// Correction stages start with a zero output layer so the composite is
// unchanged at initialization; training can only improve on the incoming
// residual level instead of first unlearning a random perturbation.
void zero_output_layer(NetworkParams& net) {
  net.layers.back().weights.setZero();
  net.layers.back().biases.setZero();
}

NetworkParams build_correction_net(const RunConfig& cfg, const Problem& problem,
                                   const ResidualAnalysis& ra, int stage, StageRecord& rec,
                                   RunReport& report) {
  const int out_dim = problem.output_dim();
  const std::uint64_t net_seed = derive_seed(cfg.master_seed, stage, SeedPurpose::xavier_init);
  rec.seed = net_seed;

  switch (cfg.method) {
    case Method::msnn: {
      const GridField p = total_psd(ra.spectra);
      const Spectrum& s0 = ra.spectra.front();
      std::size_t best = 0;
      for (std::size_t i = 1; i < p.values.size(); ++i) {
        if (p.values[i] > p.values[best]) best = i;
      }
      const int jx = static_cast<int>(best) / p.ny;
      const int jy = static_cast<int>(best) % p.ny;
      const std::array<Real, 2> kc = s0.cyclic_frequency(jx, jy);
      const Real f_d = std::hypot(kc[0], kc[1]);
      const Real kappa = std::clamp(kTwoPi * f_d, 1.0, 500.0);
      rec.kappa = kappa;
      std::ostringstream kind;
      kind << "msnn(kappa=" << kappa << ")";
      rec.init_kind = kind.str();
      NetworkParams net = network::xavier_init(
          network::plain_dims(2, cfg.init.depth, cfg.init.width, out_dim), net_seed);
      net = network::apply_scale_factor(std::move(net), kappa);
      zero_output_layer(net);
      return net;
    }
    case Method::si_mspinn: {
      const Spectrum merged = merge_spectra(ra.spectra);
      const spectral::SpectralModes modes = spectral::extract_top_modes(merged, cfg.init.modes);
      const int n_f = static_cast<int>(modes.modes.size());
      MatX B(n_f, 2);
      VecX b(n_f), A(n_f);
      for (int j = 0; j < n_f; ++j) {
        const spectral::Mode& m = modes.modes[static_cast<std::size_t>(j)];
        B(j, 0) = m.k[0];
        B(j, 1) = m.k[1];
        b(j) = m.theta;
        A(j) = m.alpha;
      }
      std::ostringstream kind;
      kind << "spectral(n_f=" << n_f << ")";
      rec.init_kind = kind.str();
      NetworkParams net = network::spectral_embedding_network(
          B, b, A, cfg.init.depth, cfg.init.width, out_dim, net_seed,
          cfg.init.freeze_first_layer);
      zero_output_layer(net);
      return net;
    }
    case Method::rff_mspinn: {
      const GridField p = total_psd(ra.spectra);
      spectral::FrequencyDistribution dist;
      try {
        dist = spectral::normalize_psd(p);
      } catch (const spectral::DegenerateResidual&) {
        report.rff_uniform_fallback = true;
        const Spectrum& s0 = ra.spectra.front();
        for (int jx = 0; jx < s0.nx; ++jx) {
          for (int jy = 0; jy < s0.ny; ++jy) {
            dist.support.push_back(s0.cyclic_frequency(jx, jy));
            dist.probabilities.push_back(1.0 / (static_cast<Real>(s0.nx) * s0.ny));
          }
        }
      }
      const auto freqs = spectral::sample_frequencies(
          dist, cfg.init.modes, derive_seed(cfg.master_seed, stage, SeedPurpose::rff_frequencies));
      MatX B;
      VecX b;
      spectral::build_rff_layer(freqs, derive_seed(cfg.master_seed, stage, SeedPurpose::rff_phases),
                                B, b);
      std::ostringstream kind;
      kind << "rff(m=" << cfg.init.modes << ")";
      rec.init_kind = kind.str();
      NetworkParams net = network::rff_network(B, b, cfg.init.depth, cfg.init.width, out_dim,
                                                net_seed, cfg.init.freeze_first_layer);
      zero_output_layer(net);
      return net;
    }
    case Method::pinn:
      break;
  }
  throw InvalidInput("build_correction_net: plain PINN has no correction stages");
}

}  // namespace

RunOutput run(const RunConfig& cfg_in, const Problem& problem) {
  RunConfig cfg = cfg_in;
  cfg.validate();
  if (cfg.method == Method::pinn) cfg.stages = 0;

  RunOutput out;
  RunReport& report = out.report;
  report.method = to_string(cfg.method);
  report.problem = problem.name();
  report.master_seed = cfg.master_seed;

  const int out_dim = problem.output_dim();

  // Stage 0: plain PINN.
  {
    StageRecord rec;
    rec.epsilon = 1.0;
    rec.seed = derive_seed(cfg.master_seed, 0, SeedPurpose::xavier_init);
    rec.init_kind = "xavier";
    NetworkParams net0 = network::xavier_init(
        network::plain_dims(2, cfg.init.depth, cfg.init.width, out_dim), rec.seed);
    const PointSets pts = sample_point_sets(
        problem, cfg.counts, derive_seed(cfg.master_seed, 0, SeedPurpose::collocation));
    TrainOutcome t = train_stage(problem, pts, cfg.weights, nullptr, 1.0, std::move(net0),
                                 cfg.optim, 0);
    rec.net = std::move(t.net);
    rec.loss_history = std::move(t.history);
    rec.stage_objective = t.stage_objective;
    rec.composite_loss = t.composite_loss;
    report.line_search_warnings |= t.line_search_failed;
    out.solution.stages.push_back(std::move(rec));
  }

  ResidualAnalysis ra = analyze_residual(out.solution, problem, cfg.spectrum_grid);
  out.solution.stages.back().residual_rms_after = ra.rms_value;
  report.epsilon_history.push_back(ra.rms_value);

  for (int stage = 1; stage <= cfg.stages; ++stage) {
    const Real eps = ra.rms_value;
    if (eps < 1e-14) {
      report.early_stop = true;
      break;
    }
    StageRecord rec;
    rec.epsilon = eps;
    NetworkParams net = build_correction_net(cfg, problem, ra, stage, rec, report);
    const PointSets pts = sample_point_sets(
        problem, cfg.counts, derive_seed(cfg.master_seed, stage, SeedPurpose::collocation));
    TrainOutcome t = train_stage(problem, pts, cfg.weights, &out.solution, eps, std::move(net),
                                 cfg.optim, stage);
    rec.net = std::move(t.net);
    rec.loss_history = std::move(t.history);
    rec.stage_objective = t.stage_objective;
    rec.composite_loss = t.composite_loss;
    report.line_search_warnings |= t.line_search_failed;
    out.solution.stages.push_back(std::move(rec));

    ra = analyze_residual(out.solution, problem, cfg.spectrum_grid);
    out.solution.stages.back().residual_rms_after = ra.rms_value;
    report.epsilon_history.push_back(ra.rms_value);
  }

  for (std::size_t i = 1; i < report.epsilon_history.size(); ++i) {
    if (!(report.epsilon_history[i] < report.epsilon_history[i - 1])) {
      report.monotone_epsilon = false;
    }
  }

  if (problem.has_reference()) {
    const VecX err = evaluate_error(out.solution, problem, cfg.spectrum_grid + 1);
    report.l2_errors.assign(err.data(), err.data() + err.size());
  }
  return out;
}

RunOutput run_si_mspinn(const RunConfig& cfg, const Problem& problem) {
  if (cfg.method != Method::si_mspinn) {
    throw InvalidInput("run_si_mspinn: cfg.method must be si_mspinn");
  }
  return run(cfg, problem);
}

RunOutput run_rff_mspinn(const RunConfig& cfg, const Problem& problem) {
  if (cfg.method != Method::rff_mspinn) {
    throw InvalidInput("run_rff_mspinn: cfg.method must be rff_mspinn");
  }
  return run(cfg, problem);
}

RunOutput run_msnn_baseline(const RunConfig& cfg, const Problem& problem) {
  if (cfg.method != Method::msnn) {
    throw InvalidInput("run_msnn_baseline: cfg.method must be msnn");
  }
  return run(cfg, problem);
}

}  // namespace mspinn::multistage
