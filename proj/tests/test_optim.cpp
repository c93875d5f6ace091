#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mspinn/optim.hpp"

using namespace mspinn;
using optim::OptimConfig;

namespace {

const optim::Objective quadratic_1d = [](const VecX& p, VecX& g) {
  g = 2.0 * p;
  return p.squaredNorm();
};

}  // namespace

TEST_CASE("adam drives a 1-d quadratic toward zero") {
  OptimConfig cfg;
  cfg.adam_steps = 200;
  cfg.adam_lr = 0.1;
  VecX x0(1);
  x0 << 1.0;
  const auto res = optim::adam_minimize(quadratic_1d, x0, cfg);
  CHECK(std::abs(res.params(0)) <= 1e-2);
  CHECK(res.history.size() == 200);
  CHECK(res.history.front().phase == optim::Phase::adam);
}

TEST_CASE("adam first step reproduces the hand-evaluated update") {
  // x0 = 1, g0 = 2, lr = 0.1, betas (0.9, 0.999), eps 1e-8:
  // mhat = 2, vhat = 4, x1 = 1 - 0.1 * 2 / (2 + 1e-8) ~ 0.9.
  OptimConfig cfg;
  cfg.adam_steps = 1;
  cfg.adam_lr = 0.1;
  VecX x0(1);
  x0 << 1.0;
  const auto res = optim::adam_minimize(quadratic_1d, x0, cfg);
  CHECK(std::abs(res.params(0) - 0.9) < 1e-8);
}

TEST_CASE("adam leaves parameters unchanged under a zero gradient") {
  OptimConfig cfg;
  cfg.adam_steps = 50;
  VecX x0(3);
  x0 << 1.0, -2.0, 0.5;
  const auto res = optim::adam_minimize(
      [](const VecX&, VecX& g) {
        g.setZero();
        return 1.0;
      },
      x0, cfg);
  CHECK(res.params == x0);
}

TEST_CASE("adam aborts on non-finite loss with the step index") {
  OptimConfig cfg;
  cfg.adam_steps = 10;
  VecX x0(1);
  x0 << 1.0;
  long calls = 0;
  try {
    optim::adam_minimize(
        [&](const VecX& p, VecX& g) {
          ++calls;
          g = 2.0 * p;
          return calls >= 4 ? std::nan("") : p.squaredNorm();
        },
        x0, cfg);
    FAIL("expected TrainingAbort");
  } catch (const TrainingAbort& e) {
    CHECK(e.step_index == 4);
    CHECK(std::string(e.what()).find("step 4") != std::string::npos);
  }
}

TEST_CASE("adam is scale-equivariant as eps -> 0") {
  OptimConfig cfg;
  cfg.adam_steps = 50;
  cfg.adam_eps = 0.0;
  VecX x0(2);
  x0 << 1.0, -3.0;
  const auto base = optim::adam_minimize(
      [](const VecX& p, VecX& g) {
        g = 2.0 * p;
        return p.squaredNorm();
      },
      x0, cfg);
  const Real c = 37.5;
  const auto scaled = optim::adam_minimize(
      [&](const VecX& p, VecX& g) {
        g = c * 2.0 * p;
        return c * p.squaredNorm();
      },
      x0, cfg);
  CHECK((base.params - scaled.params).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("optimizers are deterministic") {
  OptimConfig cfg;
  cfg.adam_steps = 100;
  cfg.lbfgs_max_iters = 50;
  VecX x0(4);
  x0 << 1, 2, 3, 4;
  const auto a1 = optim::adam_minimize(quadratic_1d, x0, cfg);
  const auto a2 = optim::adam_minimize(quadratic_1d, x0, cfg);
  CHECK(a1.params == a2.params);
  const auto l1 = optim::lbfgs_minimize(quadratic_1d, x0, cfg);
  const auto l2 = optim::lbfgs_minimize(quadratic_1d, x0, cfg);
  CHECK(l1.params == l2.params);
}

TEST_CASE("lbfgs solves an SPD quadratic to tight gradient norm") {
  // f(x) = 1/2 x^T A x with A SPD 5x5.
  MatX M = MatX::Random(5, 5);
  MatX A = M.transpose() * M + 5.0 * MatX::Identity(5, 5);
  const optim::Objective f = [&](const VecX& p, VecX& g) {
    g = A * p;
    return 0.5 * p.dot(g);
  };
  OptimConfig cfg;
  cfg.lbfgs_max_iters = 50;
  cfg.lbfgs_grad_tol = 1e-11;
  VecX x0(5);
  x0 << 1, -1, 2, -2, 3;
  const auto res = optim::lbfgs_minimize(f, x0, cfg);
  VecX g(5);
  f(res.params, g);
  CHECK(g.norm() <= 1e-10);
  CHECK(res.iterations <= 50);
  CHECK(res.wolfe_verified);
}

TEST_CASE("lbfgs solves Rosenbrock from the classic start") {
  const optim::Objective rosen = [](const VecX& p, VecX& g) {
    const Real x = p(0), y = p(1);
    g.resize(2);
    g(0) = -2.0 * (1.0 - x) - 400.0 * x * (y - x * x);
    g(1) = 200.0 * (y - x * x);
    return (1.0 - x) * (1.0 - x) + 100.0 * (y - x * x) * (y - x * x);
  };
  OptimConfig cfg;
  cfg.lbfgs_max_iters = 500;
  cfg.lbfgs_grad_tol = 1e-12;
  VecX x0(2);
  x0 << -1.2, 1.0;
  const auto res = optim::lbfgs_minimize(rosen, x0, cfg);
  CHECK(std::abs(res.params(0) - 1.0) < 1e-6);
  CHECK(std::abs(res.params(1) - 1.0) < 1e-6);
  CHECK(res.wolfe_verified);
}

TEST_CASE("lbfgs returns immediately from a stationary point") {
  OptimConfig cfg;
  VecX x0(2);
  x0.setZero();
  const auto res = optim::lbfgs_minimize(quadratic_1d, x0, cfg);
  CHECK(res.iterations == 0);
  CHECK(res.params == x0);
}

TEST_CASE("lbfgs accepted losses are monotone non-increasing") {
  const optim::Objective rosen = [](const VecX& p, VecX& g) {
    const Real x = p(0), y = p(1);
    g.resize(2);
    g(0) = -2.0 * (1.0 - x) - 400.0 * x * (y - x * x);
    g(1) = 200.0 * (y - x * x);
    return (1.0 - x) * (1.0 - x) + 100.0 * (y - x * x) * (y - x * x);
  };
  OptimConfig cfg;
  cfg.lbfgs_max_iters = 200;
  VecX x0(2);
  x0 << -1.2, 1.0;
  const auto res = optim::lbfgs_minimize(rosen, x0, cfg);
  for (std::size_t i = 1; i < res.history.size(); ++i) {
    CHECK(res.history[i].loss <= res.history[i - 1].loss * (1.0 + 1e-15));
  }
}

TEST_CASE("line-search failure returns best-so-far with the warning flag") {
  // |x| is non-differentiable at the optimum; the search eventually stalls.
  const optim::Objective absf = [](const VecX& p, VecX& g) {
    g.resize(1);
    g(0) = p(0) >= 0.0 ? 1.0 : -1.0;
    return std::abs(p(0));
  };
  OptimConfig cfg;
  cfg.lbfgs_max_iters = 100;
  VecX x0(1);
  x0 << 1.0;
  const auto res = optim::lbfgs_minimize(absf, x0, cfg);
  CHECK(res.line_search_failed);
  CHECK(std::abs(res.params(0)) <= 1.0);
}

TEST_CASE("config validation") {
  OptimConfig cfg;
  cfg.wolfe_c1 = 0.95;  // violates c1 < c2
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = OptimConfig{};
  cfg.adam_lr = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = OptimConfig{};
  cfg.lbfgs_history = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}
