#pragma once

#include <filesystem>

#include "mspinn/common.hpp"

namespace mspinn::network {

enum class FirstLayerKind { plain, spectral_embedding, rff };

const char* to_string(FirstLayerKind k);

/// One dense layer; weights are (out x in), biases length out.
struct Layer {
  MatX weights;
  VecX biases;
};

/// Parameters of a dense network. Hidden activations are tanh; the first
/// layer is tanh for `plain`, A*cos(Bx+b) for `spectral_embedding` (B holds
/// angular frequencies) and cos(2*pi*Bx+b) for `rff` (B holds cyclic
/// frequencies, the 2*pi lives in the evaluation); the output layer is
/// linear.
///
/// Canonical parameter flattening: layer-major; within a layer the weight
/// matrix in row-major order, then the bias vector; the amplitude vector (if
/// any) follows the first layer's bias.
struct NetworkParams {
  std::vector<Layer> layers;
  FirstLayerKind first_layer_kind = FirstLayerKind::plain;
  VecX amplitudes;                 // spectral_embedding only
  bool first_layer_trainable = true;
  std::uint64_t seed = 0;

  int input_dim() const { return static_cast<int>(layers.front().weights.cols()); }
  int output_dim() const { return static_cast<int>(layers.back().weights.rows()); }
  int layer_count() const { return static_cast<int>(layers.size()); }
  bool has_amplitudes() const { return amplitudes.size() > 0; }

  std::size_t parameter_count() const;
  VecX flatten() const;
  void unflatten(const VecX& flat);
  /// Zero the gradient entries of frozen parameter groups.
  void mask_gradient(VecX& grad) const;

  void validate() const;
};

/// Construction knobs shared by all stage networks.
struct InitConfig {
  std::uint64_t seed = 0;
  int depth = 4;   // number of weight layers ("depth 4" = 3 hidden layers)
  int width = 20;
  int modes = 20;  // n_f (spectral) or m (rff)
  Real scale_factor = 1.0;  // kappa, plain first layer only
  bool freeze_first_layer = false;

  void validate() const;
};

/// Layer size chain for a plain network of the given depth/width.
std::vector<int> plain_dims(int input_dim, int depth, int width, int output_dim);

/// Uniform Xavier/Glorot init on [-sqrt(6/(fan_in+fan_out)), +...], zero
/// biases; deterministic for a fixed seed.
NetworkParams xavier_init(const std::vector<int>& dims, std::uint64_t seed);

/// Plain network with the first-layer weights multiplied by kappa.
NetworkParams apply_scale_factor(NetworkParams net, Real kappa);

/// Network whose first layer is the cosine embedding A*cos(Bx+b); remaining
/// layers Xavier. B is (modes x input_dim) with angular frequency rows.
NetworkParams spectral_embedding_network(const MatX& B, const VecX& b, const VecX& A,
                                         int depth, int width, int output_dim,
                                         std::uint64_t seed, bool freeze_first_layer);

/// Network whose first layer is cos(2*pi*Bx+b); remaining layers Xavier.
/// B is (modes x input_dim) with cyclic frequency rows.
NetworkParams rff_network(const MatX& B, const VecX& b, int depth, int width, int output_dim,
                          std::uint64_t seed, bool freeze_first_layer);

/// Standalone feature maps (the embedding layers outside a full network).
VecX spectral_embedding_forward(const VecX& A, const MatX& B, const VecX& b, const VecX& x);
VecX rff_forward(const MatX& B, const VecX& b, const VecX& x);

/// Self-describing binary checkpoint (documented in the README): magic,
/// version, first-layer kind, flags, seed, layer dims, then all parameters
/// as little-endian 64-bit floats in canonical flattening order.
void save_checkpoint(const NetworkParams& net, const std::filesystem::path& path);
NetworkParams load_checkpoint(const std::filesystem::path& path);

}  // namespace mspinn::network
