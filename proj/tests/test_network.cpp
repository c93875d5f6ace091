#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "mspinn/network.hpp"
#include "mspinn/spectral.hpp"

using namespace mspinn;
using network::FirstLayerKind;
using network::NetworkParams;

TEST_CASE("xavier bounds and zero biases") {
  const NetworkParams net = network::xavier_init({1, 1}, 123);
  CHECK(std::abs(net.layers[0].weights(0, 0)) <= std::sqrt(3.0));
  CHECK(net.layers[0].biases(0) == 0.0);
}

TEST_CASE("xavier is deterministic per seed") {
  const NetworkParams a = network::xavier_init({2, 20, 20, 20, 1}, 99);
  const NetworkParams b = network::xavier_init({2, 20, 20, 20, 1}, 99);
  CHECK(a.flatten() == b.flatten());
  const NetworkParams c = network::xavier_init({2, 20, 20, 20, 1}, 100);
  CHECK(a.flatten() != c.flatten());
}

TEST_CASE("xavier empirical variance matches 2/(fan_in+fan_out)") {
  const std::vector<int> dims = {2, 20, 20, 20, 1};
  std::vector<Real> sum_sq(4, 0.0);
  std::vector<long> count(4, 0);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const NetworkParams net = network::xavier_init(dims, seed);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      sum_sq[l] += net.layers[l].weights.array().square().sum();
      count[l] += net.layers[l].weights.size();
    }
  }
  for (std::size_t l = 0; l < 4; ++l) {
    const Real expected = 2.0 / (dims[l] + dims[l + 1]);
    const Real observed = sum_sq[l] / count[l];
    CHECK(observed == doctest::Approx(expected).epsilon(0.2));
  }
}

TEST_CASE("xavier rejects bad dims") {
  CHECK_THROWS_AS(network::xavier_init({}, 1), InvalidInput);
  CHECK_THROWS_AS(network::xavier_init({3}, 1), InvalidInput);
  CHECK_THROWS_AS(network::xavier_init({3, 0}, 1), InvalidInput);
}

TEST_CASE("spectral_embedding_forward examples") {
  MatX B(1, 2);
  VecX b(1), A(1), x(2);

  A << 1.0;
  B << 0.0, 0.0;
  b << 0.0;
  x << 0.3, -0.8;
  CHECK(network::spectral_embedding_forward(A, B, b, x)(0) == doctest::Approx(1.0));

  A << 2.0;
  B << kPi, 0.0;
  x << 1.0, 0.0;
  CHECK(network::spectral_embedding_forward(A, B, b, x)(0) == doctest::Approx(-2.0));

  A << 1.0;
  B << kPi / 2.0, 0.0;
  b << kPi / 2.0;
  CHECK(network::spectral_embedding_forward(A, B, b, x)(0) == doctest::Approx(-1.0));

  VecX bad(3);
  CHECK_THROWS_AS(network::spectral_embedding_forward(A, B, b, bad), InvalidInput);
  VecX b2(2);
  CHECK_THROWS_AS(network::spectral_embedding_forward(A, B, b2, x), InvalidInput);
}

TEST_CASE("rff_forward examples") {
  MatX B(1, 2);
  VecX b(1), x(2);

  B << 0.0, 0.0;
  b << 0.0;
  x << 0.4, 0.9;
  CHECK(network::rff_forward(B, b, x)(0) == doctest::Approx(1.0));

  B << 1.0, 0.0;
  x << 0.5, 0.0;
  CHECK(network::rff_forward(B, b, x)(0) == doctest::Approx(-1.0));

  B << 0.25, 0.0;
  b << kPi;
  x << 1.0, 0.0;
  CHECK(network::rff_forward(B, b, x)(0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("feature maps are 2pi-periodic in the phase") {
  Rng rng(5);
  MatX B(4, 2);
  VecX b(4), A(4), x(2);
  for (int j = 0; j < 4; ++j) {
    B(j, 0) = rng.uniform(-5, 5);
    B(j, 1) = rng.uniform(-5, 5);
    b(j) = rng.uniform(0, kTwoPi);
    A(j) = rng.uniform(0.5, 2.0);
  }
  x << 0.37, -0.81;
  const VecX shifted = b.array() + kTwoPi;
  CHECK((network::spectral_embedding_forward(A, B, b, x) -
         network::spectral_embedding_forward(A, B, shifted, x))
            .lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((network::rff_forward(B, b, x) - network::rff_forward(B, shifted, x))
            .lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("apply_scale_factor") {
  NetworkParams net = network::xavier_init({2, 4, 1}, 7);
  const NetworkParams same = network::apply_scale_factor(net, 1.0);
  CHECK(same.flatten() == net.flatten());

  net.layers[0].weights(0, 0) = 0.3;
  const NetworkParams scaled = network::apply_scale_factor(net, 10.0);
  CHECK(scaled.layers[0].weights(0, 0) == doctest::Approx(3.0));
  CHECK(scaled.layers[1].weights == net.layers[1].weights);

  // kappa = 2 pi f_d with f_d = 4.
  const NetworkParams by_fd = network::apply_scale_factor(net, kTwoPi * 4.0);
  CHECK(by_fd.layers[0].weights(0, 0) == doctest::Approx(0.3 * 8.0 * kPi));

  CHECK_THROWS_AS(network::apply_scale_factor(net, 0.0), InvalidInput);
  CHECK_THROWS_AS(network::apply_scale_factor(net, -2.0), InvalidInput);

  // Multiplicative composition.
  const NetworkParams ab =
      network::apply_scale_factor(network::apply_scale_factor(net, 2.5), 3.0);
  const NetworkParams once = network::apply_scale_factor(net, 7.5);
  CHECK((ab.flatten() - once.flatten()).lpNorm<Eigen::Infinity>() < 1e-12);

  NetworkParams emb = network::rff_network(MatX::Zero(3, 2), VecX::Zero(3), 3, 4, 1, 1, false);
  CHECK_THROWS_AS(network::apply_scale_factor(emb, 2.0), InvalidInput);
}

TEST_CASE("embedding network reproduces a truncated Fourier series") {
  // Modes extracted from a synthetic field; downstream reduced to a plain sum.
  Domain dom;
  dom.lo = {-1.0, 0.0};
  dom.hi = {1.0, 1.0};
  const spectral::GridField f = spectral::sample_on_grid(
      [](Real x, Real y) {
        return 1.5 * std::cos(kPi * 3.0 * x + 0.4) + 0.5 * std::cos(kTwoPi * 2.0 * y - 1.1);
      },
      dom, 32, 32);
  const auto modes = spectral::extract_top_modes(spectral::dft2(f), 4);

  const int n_f = static_cast<int>(modes.modes.size());
  MatX B(n_f, 2);
  VecX b(n_f), A(n_f);
  for (int j = 0; j < n_f; ++j) {
    B(j, 0) = modes.modes[j].k[0];
    B(j, 1) = modes.modes[j].k[1];
    b(j) = modes.modes[j].theta;
    A(j) = modes.modes[j].alpha;
  }
  NetworkParams net = network::spectral_embedding_network(B, b, A, 2, 8, 1, 3, false);
  REQUIRE(net.layer_count() == 2);
  net.layers[1].weights = MatX::Ones(1, n_f);
  net.layers[1].biases.setZero();

  const spectral::GridField series = spectral::reconstruct_from_modes(modes, dom, 16, 16);
  for (int ix = 0; ix < 16; ++ix) {
    for (int iy = 0; iy < 16; ++iy) {
      VecX x(2);
      x << series.x_of(ix), series.y_of(iy);
      Real direct = 0.0;
      for (const auto& m : modes.modes) {
        direct += m.alpha * std::cos(m.k[0] * x(0) + m.k[1] * x(1) + m.theta);
      }
      const VecX feat = network::spectral_embedding_forward(A, B, b, x);
      const Real via_net = feat.sum();
      CHECK(via_net == doctest::Approx(direct).epsilon(1e-12));
      CHECK(modes.scale * via_net ==
            doctest::Approx(series.at(ix, iy)).epsilon(1e-9));
    }
  }
}

TEST_CASE("checkpoint round trip preserves everything") {
  const auto tmp = std::filesystem::temp_directory_path() / "mspinn_ckpt_test.net";
  NetworkParams net = network::spectral_embedding_network(
      MatX::Random(6, 2), VecX::Random(6), VecX::Random(6), 4, 10, 2, 42, true);
  net.seed = 42;
  network::save_checkpoint(net, tmp);
  const NetworkParams back = network::load_checkpoint(tmp);
  CHECK(back.first_layer_kind == FirstLayerKind::spectral_embedding);
  CHECK(back.first_layer_trainable == net.first_layer_trainable);
  CHECK(back.seed == net.seed);
  CHECK(back.flatten() == net.flatten());
  std::filesystem::remove(tmp);
}

TEST_CASE("checkpoint loader rejects garbage") {
  const auto tmp = std::filesystem::temp_directory_path() / "mspinn_ckpt_bad.net";
  {
    std::ofstream os(tmp, std::ios::binary);
    os << "not a checkpoint at all";
  }
  CHECK_THROWS(network::load_checkpoint(tmp));
  std::filesystem::remove(tmp);
  CHECK_THROWS(network::load_checkpoint("/nonexistent/path.net"));
}

TEST_CASE("plain dims helper") {
  CHECK(network::plain_dims(2, 4, 20, 1) == std::vector<int>{2, 20, 20, 20, 1});
  CHECK(network::plain_dims(2, 2, 7, 3) == std::vector<int>{2, 7, 3});
}
