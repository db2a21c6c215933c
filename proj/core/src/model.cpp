#include "srlab/model.hpp"

#include <random>
#include <sstream>

namespace srlab {

NetworkConfig NetworkConfig::from_notation(const std::string& sizes, const std::vector<int>& widths,
                                           int channels) {
  NetworkConfig cfg;
  cfg.channels = channels;
  std::stringstream ss(sizes);
  std::string item;
  std::vector<int> fs;
  while (std::getline(ss, item, '-')) {
    try {
      std::size_t used = 0;
      const int f = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      fs.push_back(f);
    } catch (const std::exception&) {
      throw ConfigError("bad layer notation '" + sizes + "'");
    }
  }
  if (fs.empty()) throw ConfigError("empty layer notation");
  if (widths.size() + 1 != fs.size()) {
    throw ConfigError("notation '" + sizes + "' has " + std::to_string(fs.size()) + " layers but " +
                      std::to_string(widths.size()) + " widths were given (expected one fewer)");
  }
  for (std::size_t i = 0; i < fs.size(); ++i) {
    cfg.layers.push_back({fs[i], i + 1 < fs.size() ? widths[i] : channels});
  }
  cfg.validate();
  return cfg;
}

std::string NetworkConfig::notation() const {
  std::string out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(layers[i].filter_size);
  }
  return out;
}

void NetworkConfig::validate() const {
  if (channels <= 0) throw ConfigError("channel count must be positive");
  if (layers.empty()) throw ConfigError("network needs at least one layer");
  for (const auto& l : layers) {
    if (l.filter_size <= 0 || l.filter_size % 2 == 0) {
      throw ConfigError("filter sizes must be odd and positive, got " + std::to_string(l.filter_size));
    }
    if (l.filters <= 0) throw ConfigError("filter counts must be positive");
  }
  if (layers.back().filters != channels) {
    throw ConfigError("last layer must have " + std::to_string(channels) + " filters, has " +
                      std::to_string(layers.back().filters));
  }
}

int NetworkConfig::shrink() const {
  int s = 0;
  for (const auto& l : layers) s += l.filter_size - 1;
  return s;
}

NetworkConfig basic_config(int channels) {
  return NetworkConfig::from_notation("9-1-5", {64, 32}, channels);
}

std::int64_t count_weights(const NetworkConfig& config) {
  config.validate();
  std::int64_t total = 0;
  int n_in = config.channels;
  for (const auto& l : config.layers) {
    total += static_cast<std::int64_t>(n_in) * l.filters * l.filter_size * l.filter_size;
    n_in = l.filters;
  }
  return total;
}

int receptive_field(const NetworkConfig& config) {
  config.validate();
  return 1 + config.shrink();
}

template <typename T>
BasicNetwork<T> zero_network(const NetworkConfig& config) {
  config.validate();
  BasicNetwork<T> net{config, {}};
  int n_in = config.channels;
  for (const auto& l : config.layers) {
    net.banks.emplace_back(l.filters, n_in, l.filter_size);
    n_in = l.filters;
  }
  return net;
}

Network init_network(const NetworkConfig& config, std::uint64_t seed, double stddev) {
  if (!(stddev >= 0.0)) throw ConfigError("init stddev must be non-negative");
  Network net = zero_network<float>(config);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, stddev);
  for (auto& bank : net.banks) {
    for (float& w : bank.weights) w = static_cast<float>(normal(rng));
  }
  return net;
}

template <typename T>
void check_network(const BasicNetwork<T>& net) {
  net.config.validate();
  if (net.banks.size() != net.config.layers.size()) {
    throw ConfigError("network has " + std::to_string(net.banks.size()) + " banks for " +
                      std::to_string(net.config.layers.size()) + " layers");
  }
  int n_in = net.config.channels;
  for (std::size_t l = 0; l < net.banks.size(); ++l) {
    const auto& b = net.banks[l];
    const auto& spec = net.config.layers[l];
    if (b.n_in != n_in || b.n_out != spec.filters || b.f != spec.filter_size) {
      throw ConfigError("bank " + std::to_string(l) + " does not match the network config");
    }
    n_in = spec.filters;
  }
}

template <typename T>
BasicTensor<T> forward(const BasicNetwork<T>& net, const BasicTensor<T>& input) {
  check_network(net);
  BasicTensor<T> x = conv2d_valid(input, net.banks.front());
  for (std::size_t l = 1; l < net.banks.size(); ++l) {
    x = conv2d_valid(relu(std::move(x)), net.banks[l]);
  }
  return x;
}

template <typename T>
ForwardCache<T> forward_cached(const BasicNetwork<T>& net, const BasicTensor<T>& input) {
  check_network(net);
  ForwardCache<T> cache;
  cache.inputs.reserve(net.banks.size());
  cache.pre.reserve(net.banks.size());
  cache.inputs.push_back(input);
  for (std::size_t l = 0; l < net.banks.size(); ++l) {
    cache.pre.push_back(conv2d_valid(cache.inputs.back(), net.banks[l]));
    if (l + 1 < net.banks.size()) cache.inputs.push_back(relu(cache.pre.back()));
  }
  return cache;
}

template <typename T>
NetworkGradients<T> NetworkGradients<T>::zeros_like(const BasicNetwork<T>& net) {
  NetworkGradients g;
  for (const auto& b : net.banks) {
    g.weights.emplace_back(b.weights.size(), T{0});
    g.biases.emplace_back(b.biases.size(), T{0});
  }
  return g;
}

template <typename T>
void NetworkGradients<T>::add(const NetworkGradients& other) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (std::size_t i = 0; i < weights[l].size(); ++i) weights[l][i] += other.weights[l][i];
    for (std::size_t i = 0; i < biases[l].size(); ++i) biases[l][i] += other.biases[l][i];
  }
}

template <typename T>
void NetworkGradients<T>::scale(T factor) {
  for (auto& w : weights) {
    for (T& v : w) v *= factor;
  }
  for (auto& b : biases) {
    for (T& v : b) v *= factor;
  }
}

template <typename T>
NetworkGradients<T> backward(const BasicNetwork<T>& net, const ForwardCache<T>& cache,
                             const BasicTensor<T>& grad_output) {
  const std::size_t layers = net.banks.size();
  if (cache.pre.size() != layers || cache.inputs.size() != layers) {
    throw ConfigError("forward cache does not match the network");
  }
  if (grad_output.shape() != cache.output().shape()) {
    throw ShapeError("output gradient " + to_string(grad_output.shape()) + " vs output " +
                     to_string(cache.output().shape()));
  }
  NetworkGradients<T> g;
  g.weights.resize(layers);
  g.biases.resize(layers);
  BasicTensor<T> grad = grad_output;
  for (std::size_t l = layers; l-- > 0;) {
    if (l + 1 < layers) grad = relu_backward(cache.pre[l], grad);
    auto cg = conv2d_backward(cache.inputs[l], net.banks[l], grad, /*want_input_grad=*/l > 0);
    g.weights[l] = std::move(cg.weights);
    g.biases[l] = std::move(cg.biases);
    grad = std::move(cg.input);
  }
  return g;
}

template <typename T>
BasicTensor<T> predict_full(const BasicNetwork<T>& net, const BasicTensor<T>& input) {
  check_network(net);
  return forward(net, pad_replicate(input, net.config.shrink() / 2));
}

#define SRLAB_INSTANTIATE_MODEL(T)                                                              \
  template BasicNetwork<T> zero_network<T>(const NetworkConfig&);                               \
  template void check_network(const BasicNetwork<T>&);                                          \
  template BasicTensor<T> forward(const BasicNetwork<T>&, const BasicTensor<T>&);               \
  template ForwardCache<T> forward_cached(const BasicNetwork<T>&, const BasicTensor<T>&);       \
  template struct NetworkGradients<T>;                                                          \
  template NetworkGradients<T> backward(const BasicNetwork<T>&, const ForwardCache<T>&,         \
                                        const BasicTensor<T>&);                                 \
  template BasicTensor<T> predict_full(const BasicNetwork<T>&, const BasicTensor<T>&);

SRLAB_INSTANTIATE_MODEL(float)
SRLAB_INSTANTIATE_MODEL(double)

#undef SRLAB_INSTANTIATE_MODEL

}  // namespace srlab
