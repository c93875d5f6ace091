#include "mspinn/optim.hpp"

#include <cmath>
#include <deque>
#include <sstream>

namespace mspinn::optim {

void OptimConfig::validate() const {
  if (adam_lr <= 0.0) throw InvalidInput("OptimConfig: adam_lr must be > 0");
  if (lbfgs_history < 1) throw InvalidInput("OptimConfig: lbfgs_history must be >= 1");
  if (!(0.0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0)) {
    throw InvalidInput("OptimConfig: need 0 < c1 < c2 < 1");
  }
  if (adam_steps < 0 || lbfgs_max_iters < 0) {
    throw InvalidInput("OptimConfig: iteration counts must be >= 0");
  }
}

OptimResult adam_minimize(const Objective& objective, const VecX& initial,
                          const OptimConfig& cfg) {
  cfg.validate();
  OptimResult res;
  res.params = initial;
  res.history.reserve(static_cast<std::size_t>(cfg.adam_steps));

  VecX g(initial.size());
  VecX m = VecX::Zero(initial.size());
  VecX v = VecX::Zero(initial.size());
  Real b1t = 1.0;
  Real b2t = 1.0;

  for (long t = 1; t <= cfg.adam_steps; ++t) {
    const Real f = objective(res.params, g);
    if (!std::isfinite(f)) {
      std::ostringstream msg;
      msg << "adam: non-finite loss at step " << t;
      throw TrainingAbort(msg.str(), -1, t);
    }
    res.history.push_back({t, Phase::adam, f});

    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
    v = (cfg.adam_beta2 * v.array() + (1.0 - cfg.adam_beta2) * g.array().square()).matrix();
    b1t *= cfg.adam_beta1;
    b2t *= cfg.adam_beta2;
    const Real mc = 1.0 / (1.0 - b1t);
    const Real vc = 1.0 / (1.0 - b2t);
    res.params.array() -=
        cfg.adam_lr * (m.array() * mc) / ((v.array() * vc).sqrt() + cfg.adam_eps);
    ++res.iterations;
  }
  return res;
}

namespace {

struct Probe {
  Real f;
  Real slope;  // directional derivative g . p
};

}  // namespace

OptimResult lbfgs_minimize(const Objective& objective, const VecX& initial,
                           const OptimConfig& cfg) {
  cfg.validate();
  OptimResult res;
  res.params = initial;

  const Eigen::Index n = initial.size();
  VecX x = initial;
  VecX g(n);
  Real f = objective(x, g);
  if (!std::isfinite(f)) throw TrainingAbort("lbfgs: non-finite initial loss", -1, 0);

  VecX best_x = x;
  Real best_f = f;

  if (g.lpNorm<Eigen::Infinity>() <= cfg.lbfgs_grad_tol) {
    res.params = x;
    return res;  // already stationary, zero iterations
  }

  std::deque<VecX> s_hist, y_hist;
  std::deque<Real> rho_hist;
  VecX q(n), direction(n), x_new(n), g_new(n);

  const auto eval_at = [&](const VecX& base, const VecX& p, Real alpha, VecX& gout) -> Probe {
    x_new = base + alpha * p;
    const Real fv = objective(x_new, gout);
    return {fv, gout.dot(p)};
  };

  for (long iter = 1; iter <= cfg.lbfgs_max_iters; ++iter) {
    // Two-loop recursion for the search direction.
    q = g;
    const std::size_t hist = s_hist.size();
    std::vector<Real> alpha_mem(hist);
    for (std::size_t i = hist; i-- > 0;) {
      alpha_mem[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha_mem[i] * y_hist[i];
    }
    Real gamma = 1.0;
    if (hist > 0) {
      gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    }
    q *= gamma;
    for (std::size_t i = 0; i < hist; ++i) {
      const Real beta = rho_hist[i] * y_hist[i].dot(q);
      q += s_hist[i] * (alpha_mem[i] - beta);
    }
    direction = -q;

    Real slope0 = g.dot(direction);
    if (slope0 >= 0.0) {
      direction = -g;  // curvature memory turned uphill; reset to steepest descent
      slope0 = g.dot(direction);
    }

    // Strong Wolfe line search (bracket then zoom by bisection).
    const Real f0 = f;
    Real alpha = (iter == 1 && hist == 0)
                     ? std::min(1.0, 1.0 / std::max(1e-12, g.norm()))
                     : 1.0;
    Real alpha_prev = 0.0;
    Real f_prev = f0;
    constexpr Real kAlphaMax = 1e8;
    constexpr int kMaxProbe = 60;
    bool accepted = false;
    Real f_acc = f0;
    Real slope_acc = 0.0;

    Real lo = 0.0, hi = 0.0, f_lo = f0;
    bool bracketed = false;
    int probes = 0;
    for (; probes < kMaxProbe; ++probes) {
      const Probe pr = eval_at(x, direction, alpha, g_new);
      if (!std::isfinite(pr.f)) {
        // Overshoot into a bad region counts as an upper bracket.
        bracketed = true;
        lo = alpha_prev;
        f_lo = f_prev;
        hi = alpha;
        break;
      }
      if (pr.f > f0 + cfg.wolfe_c1 * alpha * slope0 || (probes > 0 && pr.f >= f_prev)) {
        bracketed = true;
        lo = alpha_prev;
        f_lo = f_prev;
        hi = alpha;
        break;
      }
      if (std::abs(pr.slope) <= -cfg.wolfe_c2 * slope0) {
        accepted = true;
        f_acc = pr.f;
        slope_acc = pr.slope;
        break;
      }
      if (pr.slope >= 0.0) {
        bracketed = true;
        lo = alpha;
        f_lo = pr.f;
        hi = alpha_prev;
        break;
      }
      alpha_prev = alpha;
      f_prev = pr.f;
      alpha = std::min(2.0 * alpha, kAlphaMax);
      if (alpha >= kAlphaMax) break;
    }

    if (!accepted && bracketed) {
      for (int z = 0; z < 50; ++z) {
        alpha = 0.5 * (lo + hi);
        const Probe pr = eval_at(x, direction, alpha, g_new);
        if (!std::isfinite(pr.f) || pr.f > f0 + cfg.wolfe_c1 * alpha * slope0 ||
            pr.f >= f_lo) {
          hi = alpha;
        } else {
          if (std::abs(pr.slope) <= -cfg.wolfe_c2 * slope0) {
            accepted = true;
            f_acc = pr.f;
            slope_acc = pr.slope;
            break;
          }
          if (pr.slope * (hi - lo) >= 0.0) hi = lo;
          lo = alpha;
          f_lo = pr.f;
        }
        if (std::abs(hi - lo) <= 1e-16 * std::max(1.0, std::abs(lo))) break;
      }
    }

    if (!accepted) {
      res.line_search_failed = true;
      res.params = best_x;
      return res;
    }

    // Instrumentation: re-check both strong Wolfe conditions on acceptance.
    if (f_acc > f0 + cfg.wolfe_c1 * alpha * slope0 + 1e-12 * std::abs(f0) ||
        std::abs(slope_acc) > -cfg.wolfe_c2 * slope0 * (1.0 + 1e-12)) {
      res.wolfe_verified = false;
    }

    // x_new and g_new hold the accepted point.
    VecX s_k = x_new - x;
    VecX y_k = g_new - g;
    const Real sy = s_k.dot(y_k);
    if (sy > 1e-12 * s_k.norm() * y_k.norm()) {
      s_hist.push_back(std::move(s_k));
      y_hist.push_back(std::move(y_k));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > cfg.lbfgs_history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    x = x_new;
    g = g_new;
    f = f_acc;
    ++res.iterations;
    res.history.push_back({iter, Phase::lbfgs, f});
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
    if (g.lpNorm<Eigen::Infinity>() <= cfg.lbfgs_grad_tol) break;
  }

  res.params = best_x;
  return res;
}

}  // namespace mspinn::optim
