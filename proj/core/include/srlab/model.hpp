#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srlab/conv.hpp"

namespace srlab {

struct LayerSpec {
  int filter_size = 1;
  int filters = 1;
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Ordered layer list. The last layer reconstructs the image, so its filter
/// count always equals `channels`.
struct NetworkConfig {
  int channels = 1;
  std::vector<LayerSpec> layers;

  /// Builds a config from "9-1-5" style sizes and the widths of every layer but
  /// the last, e.g. ("9-1-5", {64, 32}, 1).
  static NetworkConfig from_notation(const std::string& sizes, const std::vector<int>& widths,
                                     int channels = 1);

  /// "9-1-5"
  [[nodiscard]] std::string notation() const;

  /// Throws ConfigError on an empty list, even or non-positive sizes, or a
  /// last layer whose width differs from `channels`.
  void validate() const;

  /// Per-side shrink of a valid forward pass: sum of (f - 1).
  [[nodiscard]] int shrink() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// The three-layer 9-1-5 network with 64 and 32 filters.
NetworkConfig basic_config(int channels = 1);

/// Weight count excluding biases: sum of n_in * n_out * f^2.
std::int64_t count_weights(const NetworkConfig& config);

/// Side length of the input square that influences one output pixel.
int receptive_field(const NetworkConfig& config);

template <typename T>
struct BasicNetwork {
  NetworkConfig config;
  std::vector<BasicFilterBank<T>> banks;

  template <typename U>
  [[nodiscard]] BasicNetwork<U> cast() const {
    BasicNetwork<U> out{config, {}};
    for (const auto& b : banks) out.banks.push_back(b.template cast<U>());
    return out;
  }
  friend bool operator==(const BasicNetwork&, const BasicNetwork&) = default;
};

using Network = BasicNetwork<float>;
using NetworkD = BasicNetwork<double>;

/// Zero-initialized banks shaped for `config`.
template <typename T>
BasicNetwork<T> zero_network(const NetworkConfig& config);

/// Weights from N(0, 0.001^2) drawn with a seeded mt19937_64; biases 0.
Network init_network(const NetworkConfig& config, std::uint64_t seed, double stddev = 0.001);

/// Throws ConfigError when the banks do not match the config.
template <typename T>
void check_network(const BasicNetwork<T>& net);

/// Valid forward pass: ReLU after every layer except the last.
template <typename T>
BasicTensor<T> forward(const BasicNetwork<T>& net, const BasicTensor<T>& input);

/// Activations kept for backpropagation. inputs[l] feeds layer l;
/// pre[l] is layer l's output before its ReLU.
template <typename T>
struct ForwardCache {
  std::vector<BasicTensor<T>> inputs;
  std::vector<BasicTensor<T>> pre;
  [[nodiscard]] const BasicTensor<T>& output() const { return pre.back(); }
};

template <typename T>
ForwardCache<T> forward_cached(const BasicNetwork<T>& net, const BasicTensor<T>& input);

template <typename T>
struct NetworkGradients {
  std::vector<std::vector<T>> weights;
  std::vector<std::vector<T>> biases;

  static NetworkGradients zeros_like(const BasicNetwork<T>& net);
  void add(const NetworkGradients& other);
  void scale(T factor);
};

/// Backpropagates dL/d(output) through a cached forward pass.
template <typename T>
NetworkGradients<T> backward(const BasicNetwork<T>& net, const ForwardCache<T>& cache,
                             const BasicTensor<T>& grad_output);

/// Same-size inference: replicate-pads by shrink()/2 per side, then forward.
template <typename T>
BasicTensor<T> predict_full(const BasicNetwork<T>& net, const BasicTensor<T>& input);

}  // namespace srlab
