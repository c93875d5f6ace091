#include "mspinn/network.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

namespace mspinn::network {

const char* to_string(FirstLayerKind k) {
  switch (k) {
    case FirstLayerKind::plain: return "plain";
    case FirstLayerKind::spectral_embedding: return "spectral_embedding";
    case FirstLayerKind::rff: return "rff";
  }
  return "?";
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers) {
    n += static_cast<std::size_t>(l.weights.size()) + static_cast<std::size_t>(l.biases.size());
  }
  return n + static_cast<std::size_t>(amplitudes.size());
}

VecX NetworkParams::flatten() const {
  VecX flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index pos = 0;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const Layer& l = layers[li];
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) flat(pos++) = l.weights(r, c);
    }
    for (Eigen::Index r = 0; r < l.biases.size(); ++r) flat(pos++) = l.biases(r);
    if (li == 0 && has_amplitudes()) {
      for (Eigen::Index r = 0; r < amplitudes.size(); ++r) flat(pos++) = amplitudes(r);
    }
  }
  return flat;
}

void NetworkParams::unflatten(const VecX& flat) {
  if (flat.size() != static_cast<Eigen::Index>(parameter_count())) {
    throw InvalidInput("unflatten: parameter vector length mismatch");
  }
  Eigen::Index pos = 0;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    Layer& l = layers[li];
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = flat(pos++);
    }
    for (Eigen::Index r = 0; r < l.biases.size(); ++r) l.biases(r) = flat(pos++);
    if (li == 0 && has_amplitudes()) {
      for (Eigen::Index r = 0; r < amplitudes.size(); ++r) amplitudes(r) = flat(pos++);
    }
  }
}

void NetworkParams::mask_gradient(VecX& grad) const {
  if (first_layer_trainable) return;
  const Layer& l0 = layers.front();
  Eigen::Index n0 = l0.weights.size() + l0.biases.size() + amplitudes.size();
  grad.head(n0).setZero();
}

void NetworkParams::validate() const {
  if (layers.empty()) throw InvalidInput("NetworkParams: no layers");
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    if (layers[i].weights.rows() != layers[i + 1].weights.cols()) {
      throw InvalidInput("NetworkParams: layer dimension chain broken");
    }
  }
  for (const Layer& l : layers) {
    if (l.biases.size() != l.weights.rows()) {
      throw InvalidInput("NetworkParams: bias length != weight rows");
    }
  }
  if (first_layer_kind == FirstLayerKind::spectral_embedding &&
      amplitudes.size() != layers.front().weights.rows()) {
    throw InvalidInput("NetworkParams: amplitude length != embedding width");
  }
  if (first_layer_kind != FirstLayerKind::spectral_embedding && amplitudes.size() != 0) {
    throw InvalidInput("NetworkParams: amplitudes only valid for spectral embedding");
  }
}

void InitConfig::validate() const {
  if (depth < 2) throw InvalidInput("InitConfig: depth must be >= 2");
  if (width < 1) throw InvalidInput("InitConfig: width must be >= 1");
  if (modes < 1) throw InvalidInput("InitConfig: modes must be >= 1");
  if (scale_factor <= 0.0) throw InvalidInput("InitConfig: scale factor must be > 0");
}

std::vector<int> plain_dims(int input_dim, int depth, int width, int output_dim) {
  std::vector<int> dims;
  dims.push_back(input_dim);
  for (int i = 0; i + 1 < depth; ++i) dims.push_back(width);
  dims.push_back(output_dim);
  return dims;
}

NetworkParams xavier_init(const std::vector<int>& dims, std::uint64_t seed) {
  if (dims.size() < 2) throw InvalidInput("xavier_init: need at least input and output dims");
  for (int d : dims) {
    if (d < 1) throw InvalidInput("xavier_init: dimensions must be positive");
  }
  NetworkParams net;
  net.seed = seed;
  Rng rng(seed);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const int fan_in = dims[i];
    const int fan_out = dims[i + 1];
    const Real limit = std::sqrt(6.0 / static_cast<Real>(fan_in + fan_out));
    Layer l;
    l.weights.resize(fan_out, fan_in);
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) {
        l.weights(r, c) = rng.uniform(-limit, limit);
      }
    }
    l.biases = VecX::Zero(fan_out);
    net.layers.push_back(std::move(l));
  }
  net.validate();
  return net;
}

NetworkParams apply_scale_factor(NetworkParams net, Real kappa) {
  if (kappa <= 0.0) throw InvalidInput("apply_scale_factor: kappa must be > 0");
  if (net.first_layer_kind != FirstLayerKind::plain) {
    throw InvalidInput("apply_scale_factor: requires a plain first layer");
  }
  net.layers.front().weights *= kappa;
  return net;
}

namespace {

// Xavier layers appended after an embedding first layer of the given width.
void append_tail_layers(NetworkParams& net, int embed_width, int depth, int width,
                        int output_dim, std::uint64_t seed) {
  std::vector<int> dims;
  dims.push_back(embed_width);
  for (int i = 0; i + 2 < depth; ++i) dims.push_back(width);
  dims.push_back(output_dim);
  NetworkParams tail = xavier_init(dims, seed);
  for (Layer& l : tail.layers) net.layers.push_back(std::move(l));
}

}  // namespace

NetworkParams spectral_embedding_network(const MatX& B, const VecX& b, const VecX& A,
                                         int depth, int width, int output_dim,
                                         std::uint64_t seed, bool freeze_first_layer) {
  if (B.rows() != b.size() || B.rows() != A.size()) {
    throw InvalidInput("spectral_embedding_network: B rows must match b and A lengths");
  }
  if (depth < 2) throw InvalidInput("spectral_embedding_network: depth must be >= 2");
  NetworkParams net;
  net.seed = seed;
  net.first_layer_kind = FirstLayerKind::spectral_embedding;
  net.first_layer_trainable = !freeze_first_layer;
  net.layers.push_back(Layer{B, b});
  net.amplitudes = A;
  append_tail_layers(net, static_cast<int>(B.rows()), depth, width, output_dim, seed);
  net.validate();
  return net;
}

NetworkParams rff_network(const MatX& B, const VecX& b, int depth, int width, int output_dim,
                          std::uint64_t seed, bool freeze_first_layer) {
  if (B.rows() != b.size()) throw InvalidInput("rff_network: B rows must match b length");
  if (depth < 2) throw InvalidInput("rff_network: depth must be >= 2");
  NetworkParams net;
  net.seed = seed;
  net.first_layer_kind = FirstLayerKind::rff;
  net.first_layer_trainable = !freeze_first_layer;
  net.layers.push_back(Layer{B, b});
  append_tail_layers(net, static_cast<int>(B.rows()), depth, width, output_dim, seed);
  net.validate();
  return net;
}

VecX spectral_embedding_forward(const VecX& A, const MatX& B, const VecX& b, const VecX& x) {
  if (B.rows() != A.size() || B.rows() != b.size()) {
    throw InvalidInput("spectral_embedding_forward: row count of B must match A and b");
  }
  if (B.cols() != x.size()) {
    throw InvalidInput("spectral_embedding_forward: input dimension mismatch");
  }
  return A.array() * (B * x + b).array().cos();
}

VecX rff_forward(const MatX& B, const VecX& b, const VecX& x) {
  if (B.rows() != b.size()) throw InvalidInput("rff_forward: row count of B must match b");
  if (B.cols() != x.size()) throw InvalidInput("rff_forward: input dimension mismatch");
  return (kTwoPi * (B * x) + b).array().cos();
}

// --------------------------------------------------------------------------
// Checkpoint io
// --------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kMagic = 0x4e50534d;  // "MSPN"
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace

void save_checkpoint(const NetworkParams& net, const std::filesystem::path& path) {
  net.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
  write_pod(os, kMagic);
  write_pod(os, kVersion);
  write_pod(os, static_cast<std::uint8_t>(net.first_layer_kind));
  std::uint8_t flags = 0;
  if (net.has_amplitudes()) flags |= 1;
  if (net.first_layer_trainable) flags |= 2;
  write_pod(os, flags);
  write_pod(os, static_cast<std::uint16_t>(0));
  write_pod(os, net.seed);
  write_pod(os, static_cast<std::uint32_t>(net.layers.size()));
  for (const Layer& l : net.layers) {
    write_pod(os, static_cast<std::uint32_t>(l.weights.rows()));
    write_pod(os, static_cast<std::uint32_t>(l.weights.cols()));
  }
  const VecX flat = net.flatten();
  os.write(reinterpret_cast<const char*>(flat.data()),
           static_cast<std::streamsize>(flat.size() * sizeof(Real)));
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

NetworkParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path.string());
  if (read_pod<std::uint32_t>(is) != kMagic) {
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  }
  if (read_pod<std::uint32_t>(is) != kVersion) {
    throw std::runtime_error("checkpoint: unsupported version in " + path.string());
  }
  NetworkParams net;
  const auto kind = read_pod<std::uint8_t>(is);
  if (kind > 2) throw std::runtime_error("checkpoint: bad first-layer kind");
  net.first_layer_kind = static_cast<FirstLayerKind>(kind);
  const auto flags = read_pod<std::uint8_t>(is);
  read_pod<std::uint16_t>(is);
  net.seed = read_pod<std::uint64_t>(is);
  const auto n_layers = read_pod<std::uint32_t>(is);
  if (n_layers == 0 || n_layers > 1024) throw std::runtime_error("checkpoint: bad layer count");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> dims;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const auto rows = read_pod<std::uint32_t>(is);
    const auto cols = read_pod<std::uint32_t>(is);
    dims.emplace_back(rows, cols);
  }
  for (const auto& [rows, cols] : dims) {
    Layer l;
    l.weights = MatX::Zero(rows, cols);
    l.biases = VecX::Zero(rows);
    net.layers.push_back(std::move(l));
  }
  if (flags & 1) net.amplitudes = VecX::Zero(dims.front().first);
  net.first_layer_trainable = (flags & 2) != 0;
  VecX flat(static_cast<Eigen::Index>(net.parameter_count()));
  is.read(reinterpret_cast<char*>(flat.data()),
          static_cast<std::streamsize>(flat.size() * sizeof(Real)));
  if (!is) throw std::runtime_error("checkpoint: truncated parameter block");
  net.unflatten(flat);
  net.validate();
  return net;
}

}  // namespace mspinn::network
