#include "srlab/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace srlab {
namespace {

template <typename T>
BasicTensor<T> as(const Tensor& t) {
  if constexpr (std::is_same_v<T, float>) {
    return t;
  } else {
    return t.template cast<T>();
  }
}

void check_loss_args(const Shape& pred, const Shape& target, std::size_t weights) {
  if (pred != target) {
    throw ShapeError("loss shapes differ: " + to_string(pred) + " vs " + to_string(target));
  }
  if (weights != static_cast<std::size_t>(pred.channels)) {
    throw ConfigError("need one loss weight per channel (" + std::to_string(pred.channels) + "), got " +
                      std::to_string(weights));
  }
}

double weight_sum(std::span<const double> w) {
  double s = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) throw ConfigError("channel weights must be non-negative");
    s += v;
  }
  if (s <= 0.0) throw ConfigError("channel weights must not all be zero");
  return s;
}

template <typename T>
double weighted_mse(const BasicTensor<T>& pred, const BasicTensor<T>& target,
                    std::span<const double> channel_weights) {
  check_loss_args(pred.shape(), target.shape(), channel_weights.size());
  const double wsum = weight_sum(channel_weights);
  double loss = 0.0;
  for (int c = 0; c < pred.channels(); ++c) {
    if (channel_weights[c] == 0.0) continue;
    auto p = pred.channel(c);
    auto t = target.channel(c);
    double sse = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = static_cast<double>(p[i]) - static_cast<double>(t[i]);
      sse += d * d;
    }
    loss += channel_weights[c] * sse / static_cast<double>(p.size());
  }
  return loss / wsum;
}

template <typename T>
std::pair<double, NetworkGradients<T>> gradients_for(const BasicNetwork<T>& net,
                                                     std::span<const TrainSample* const> batch,
                                                     std::span<const double> channel_weights) {
  if (batch.empty()) throw ConfigError("empty batch");
  auto total = NetworkGradients<T>::zeros_like(net);
  double loss = 0.0;
  for (const TrainSample* s : batch) {
    const auto cache = forward_cached(net, as<T>(s->input));
    const BasicTensor<T> target = as<T>(s->target);
    const auto& pred = cache.output();
    const double sample_loss = weighted_mse(pred, target, channel_weights);
    loss += sample_loss;
    total.add(backward(net, cache, loss_mse_gradient(pred, target, channel_weights)));
  }
  const auto n = static_cast<double>(batch.size());
  total.scale(static_cast<T>(1.0 / n));
  return {loss / n, std::move(total)};
}

double step_on(Network& net, MomentumState& state, std::span<const TrainSample* const> batch,
               const TrainConfig& cfg) {
  auto [loss, grads] = gradients_for(net, batch, cfg.channel_weights);
  const auto momentum = static_cast<float>(cfg.momentum);
  for (std::size_t l = 0; l < net.banks.size(); ++l) {
    const auto lr = static_cast<float>(cfg.learning_rates[l]);
    momentum_update<float>(net.banks[l].weights, state.weights[l], grads.weights[l], lr, momentum);
    momentum_update<float>(net.banks[l].biases, state.biases[l], grads.biases[l], lr, momentum);
  }
  return loss;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

std::vector<double> default_learning_rates(const NetworkConfig& net, int f_sub) {
  net.validate();
  const double out = target_size(net, f_sub);
  const double factor = out * out / 2.0;
  std::vector<double> lr(net.layers.size(), 1e-4 * factor);
  lr.back() = 1e-5 * factor;
  return lr;
}

int target_size(const NetworkConfig& net, int f_sub) {
  const int out = f_sub - net.shrink();
  if (out <= 0) {
    throw ConfigError("f_sub " + std::to_string(f_sub) + " is smaller than the receptive field " +
                      std::to_string(net.shrink() + 1));
  }
  return out;
}

TrainConfig TrainConfig::resolved(const NetworkConfig& net) const {
  net.validate();
  TrainConfig c = *this;
  if (c.scale < 1) throw ConfigError("scale must be >= 1");
  if (c.stride < 1) throw ConfigError("stride must be >= 1");
  if (c.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(c.momentum >= 0.0 && c.momentum < 1.0)) throw ConfigError("momentum must be in [0, 1)");
  if (c.total_backprops == 0) throw ConfigError("total_backprops must be positive");
  target_size(net, c.f_sub);
  if (c.learning_rates.empty()) c.learning_rates = default_learning_rates(net, c.f_sub);
  if (c.learning_rates.size() != net.layers.size()) {
    throw ConfigError("need one learning rate per layer (" + std::to_string(net.layers.size()) + "), got " +
                      std::to_string(c.learning_rates.size()));
  }
  for (double lr : c.learning_rates) {
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("learning rates must be finite and >= 0");
  }
  if (c.channel_weights.empty()) c.channel_weights.assign(net.channels, 1.0);
  if (c.channel_weights.size() != static_cast<std::size_t>(net.channels)) {
    throw ConfigError("need one channel weight per channel (" + std::to_string(net.channels) + ")");
  }
  weight_sum(c.channel_weights);
  if (const auto* g = std::get_if<GaussianDecimateUp>(&c.degrade); g && !(g->sigma > 0.0)) {
    throw ConfigError("gaussian sigma must be positive");
  }
  if (c.validation_every == 0) throw ConfigError("validation_every must be positive");
  return c;
}

std::vector<TrainSample> extract_subimages(const std::vector<Tensor>& hr_images, const TrainConfig& config,
                                           const NetworkConfig& net, const WarningSink& warn) {
  net.validate();
  if (config.stride < 1 || config.scale < 1) throw ConfigError("stride and scale must be >= 1");
  const int out = target_size(net, config.f_sub);
  const int offset = net.shrink() / 2;
  std::vector<TrainSample> samples;
  for (std::size_t idx = 0; idx < hr_images.size(); ++idx) {
    const Tensor& img = hr_images[idx];
    if (img.channels() != net.channels) {
      throw ConfigError("training image has " + std::to_string(img.channels()) +
                        " channels, network expects " + std::to_string(net.channels));
    }
    if (img.height() < config.f_sub || img.width() < config.f_sub) {
      if (warn) {
        warn("skipping image " + std::to_string(idx) + " (" + to_string(img.shape()) +
             "): smaller than f_sub " + std::to_string(config.f_sub));
      }
      continue;
    }
    const Tensor hr = modcrop(img, config.scale);
    if (hr.height() < config.f_sub || hr.width() < config.f_sub) {
      if (warn) warn("skipping image " + std::to_string(idx) + ": smaller than f_sub after modcrop");
      continue;
    }
    const Tensor lr = degrade(hr, config.scale, config.degrade);
    for (int y = 0; y + config.f_sub <= hr.height(); y += config.stride) {
      for (int x = 0; x + config.f_sub <= hr.width(); x += config.stride) {
        samples.push_back({crop(lr, y, x, config.f_sub, config.f_sub),
                           crop(hr, y + offset, x + offset, out, out)});
      }
    }
  }
  return samples;
}

double loss_mse(const Tensor& pred, const Tensor& target, std::span<const double> channel_weights) {
  return weighted_mse(pred, target, channel_weights);
}

template <typename T>
BasicTensor<T> loss_mse_gradient(const BasicTensor<T>& pred, const BasicTensor<T>& target,
                                 std::span<const double> channel_weights) {
  check_loss_args(pred.shape(), target.shape(), channel_weights.size());
  const double wsum = weight_sum(channel_weights);
  BasicTensor<T> g(pred.shape());
  for (int c = 0; c < pred.channels(); ++c) {
    if (channel_weights[c] == 0.0) continue;
    auto p = pred.channel(c);
    auto t = target.channel(c);
    auto d = g.channel(c);
    const T k = static_cast<T>(2.0 * channel_weights[c] / (wsum * static_cast<double>(p.size())));
    for (std::size_t i = 0; i < p.size(); ++i) d[i] = k * (p[i] - t[i]);
  }
  return g;
}

template <typename T>
std::pair<double, NetworkGradients<T>> batch_gradients(const BasicNetwork<T>& net,
                                                       std::span<const TrainSample> batch,
                                                       std::span<const double> channel_weights) {
  std::vector<const TrainSample*> ptrs;
  ptrs.reserve(batch.size());
  for (const auto& s : batch) ptrs.push_back(&s);
  return gradients_for<T>(net, ptrs, channel_weights);
}

template <typename T>
void momentum_update(std::span<T> param, std::span<T> delta, std::span<const T> grad, T lr, T momentum) {
  if (param.size() != delta.size() || param.size() != grad.size()) {
    throw ShapeError("momentum_update: parameter, delta and gradient lengths differ");
  }
  for (std::size_t i = 0; i < param.size(); ++i) {
    delta[i] = momentum * delta[i] - lr * grad[i];
    param[i] += delta[i];
  }
}

double sgd_step(Network& net, MomentumState& state, std::span<const TrainSample> batch,
                const TrainConfig& config) {
  if (config.learning_rates.size() != net.banks.size()) {
    throw ConfigError("sgd_step needs a resolved config with one learning rate per layer");
  }
  std::vector<const TrainSample*> ptrs;
  ptrs.reserve(batch.size());
  for (const auto& s : batch) ptrs.push_back(&s);
  return step_on(net, state, ptrs, config);
}

std::vector<std::size_t> epoch_permutation(std::size_t n, std::uint64_t seed, std::uint64_t epoch) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(epoch >> 32)};
  std::mt19937_64 rng(seq);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

std::size_t sample_at(std::uint64_t k, std::size_t n, std::uint64_t seed) {
  return epoch_permutation(n, seed, k / n)[k % n];
}

Checkpoint train_loop(Checkpoint start, std::span<const TrainSample> samples,
                      const std::vector<ValidationPair>& validation, const TrainConfig& config,
                      const TrainLoopOptions& options) {
  if (samples.empty()) throw ConfigError("no training samples");
  check_network(start.net);
  const TrainConfig cfg = config.resolved(start.net.config);
  Checkpoint ckpt = std::move(start);
  if (!ckpt.momentum) ckpt.momentum = MomentumState::zeros_like(ckpt.net);
  const std::size_t n = samples.size();

  std::ofstream log;
  if (!options.log_path.empty()) {
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(options.log_path, ec) ||
                       std::filesystem::file_size(options.log_path, ec) == 0;
    log.open(options.log_path, std::ios::app);
    if (!log) throw IoError("cannot open log '" + options.log_path.string() + "'");
    if (fresh) log << kLogHeader << '\n' << std::flush;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const int shave = cfg.scale;
  std::uint64_t next_validation = (ckpt.backprops / cfg.validation_every + 1) * cfg.validation_every;
  std::uint64_t next_checkpoint =
      cfg.checkpoint_every ? (ckpt.backprops / cfg.checkpoint_every + 1) * cfg.checkpoint_every : 0;
  std::uint64_t cached_epoch = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::size_t> perm;
  std::vector<const TrainSample*> batch;
  double loss_sum = 0.0;
  std::uint64_t loss_count = 0;

  auto save = [&] {
    if (!options.checkpoint_path.empty()) save_checkpoint(options.checkpoint_path, ckpt);
  };

  while (ckpt.backprops < cfg.total_backprops) {
    const std::uint64_t b =
        std::min<std::uint64_t>(static_cast<std::uint64_t>(cfg.batch_size), cfg.total_backprops - ckpt.backprops);
    batch.clear();
    for (std::uint64_t j = 0; j < b; ++j) {
      const std::uint64_t k = ckpt.backprops + j;
      if (k / n != cached_epoch) {
        cached_epoch = k / n;
        perm = epoch_permutation(n, cfg.seed, cached_epoch);
      }
      batch.push_back(&samples[perm[k % n]]);
    }
    const double loss = step_on(ckpt.net, *ckpt.momentum, batch, cfg);
    ckpt.backprops += b;
    loss_sum += loss;
    ++loss_count;
    if (options.hooks.on_step) options.hooks.on_step(ckpt.backprops, loss);

    bool stop = false;
    if (ckpt.backprops >= next_validation || ckpt.backprops == cfg.total_backprops) {
      while (next_validation <= ckpt.backprops) next_validation += cfg.validation_every;
      LogRow row;
      row.backprops = ckpt.backprops;
      row.epoch = ckpt.backprops / n;
      row.train_loss = loss_sum / static_cast<double>(loss_count);
      row.val_psnr = validation.empty() ? std::numeric_limits<double>::quiet_NaN()
                                        : validation_psnr(ckpt.net, validation, options.space, shave);
      row.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      loss_sum = 0.0;
      loss_count = 0;
      if (log.is_open()) {
        log << row.backprops << ',' << row.epoch << ',' << format_double(row.train_loss) << ','
            << format_double(row.val_psnr) << ',' << format_double(row.elapsed_seconds) << '\n'
            << std::flush;
        if (!log) throw IoError("write failure on log '" + options.log_path.string() + "'");
      }
      if (options.hooks.on_validation && !options.hooks.on_validation(row)) stop = true;
    }
    if (next_checkpoint && ckpt.backprops >= next_checkpoint) {
      while (next_checkpoint <= ckpt.backprops) next_checkpoint += cfg.checkpoint_every;
      save();
    }
    if (stop) break;
  }
  save();
  return ckpt;
}

Strategy parse_strategy(const std::string& s) {
  if (s == "y") return Strategy::YOnly;
  if (s == "ycbcr") return Strategy::YCbCr;
  if (s == "y-pretrain") return Strategy::YPretrain;
  if (s == "cbcr-pretrain") return Strategy::CbCrPretrain;
  if (s == "rgb") return Strategy::RGB;
  throw ConfigError("unknown strategy '" + s + "' (y, ycbcr, y-pretrain, cbcr-pretrain, rgb)");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::YOnly: return "y";
    case Strategy::YCbCr: return "ycbcr";
    case Strategy::YPretrain: return "y-pretrain";
    case Strategy::CbCrPretrain: return "cbcr-pretrain";
    case Strategy::RGB: return "rgb";
  }
  return "?";
}

StrategyPlan plan_strategy(Strategy s) {
  switch (s) {
    case Strategy::YOnly: return {1, ColorSpace::YCbCr, {}};
    case Strategy::YCbCr: return {3, ColorSpace::YCbCr, {}};
    case Strategy::YPretrain: return {3, ColorSpace::YCbCr, {1.0, 0.0, 0.0}};
    case Strategy::CbCrPretrain: return {3, ColorSpace::YCbCr, {0.0, 1.0, 1.0}};
    case Strategy::RGB: return {3, ColorSpace::RGB, {}};
  }
  throw ConfigError("unknown strategy");
}

std::vector<Tensor> strategy_images(Strategy s, const std::vector<Tensor>& rgb_images) {
  std::vector<Tensor> out;
  out.reserve(rgb_images.size());
  for (const Tensor& img : rgb_images) {
    if (s == Strategy::YOnly) {
      out.push_back(luminance(img));
      continue;
    }
    if (img.channels() != 3) throw ConfigError("strategy " + to_string(s) + " needs color images");
    out.push_back(s == Strategy::RGB ? img : rgb_to_ycbcr(img));
  }
  return out;
}

Checkpoint run_strategy(Strategy strategy, const std::vector<Tensor>& rgb_images,
                        const std::vector<std::pair<std::string, Tensor>>& validation_rgb,
                        const std::string& layer_sizes, const std::vector<int>& widths,
                        const TrainConfig& config, const TrainLoopOptions& options) {
  const StrategyPlan plan = plan_strategy(strategy);
  const NetworkConfig net_cfg = NetworkConfig::from_notation(layer_sizes, widths, plan.channels);
  const auto samples = extract_subimages(strategy_images(strategy, rgb_images), config, net_cfg);
  const auto validation =
      make_validation_set(validation_rgb, config.scale, config.degrade, plan.channels, plan.space);

  return train_phases(plan, {init_network(net_cfg, config.seed), std::nullopt, 0}, samples, validation, config,
                      options);
}

Checkpoint train_phases(const StrategyPlan& plan, Checkpoint start, std::span<const TrainSample> samples,
                        const std::vector<ValidationPair>& validation, const TrainConfig& config,
                        const TrainLoopOptions& options) {
  if (start.net.config.channels != plan.channels) {
    throw ConfigError("network has " + std::to_string(start.net.config.channels) + " channels, strategy needs " +
                      std::to_string(plan.channels));
  }
  TrainLoopOptions opts = options;
  opts.space = plan.space;
  Checkpoint ckpt = std::move(start);

  TrainConfig full = config;
  full.channel_weights.assign(plan.channels, 1.0);
  if (!plan.phase1_weights.empty() && config.pretrain_backprops > 0) {
    if (config.pretrain_backprops >= config.total_backprops) {
      throw ConfigError("pretrain_backprops must be smaller than total_backprops");
    }
    if (ckpt.backprops < config.pretrain_backprops) {
      TrainConfig phase1 = config;
      phase1.channel_weights = plan.phase1_weights;
      phase1.total_backprops = config.pretrain_backprops;
      ckpt = train_loop(std::move(ckpt), samples, validation, phase1, opts);
    }
  }
  return train_loop(std::move(ckpt), samples, validation, full, opts);
}

template BasicTensor<float> loss_mse_gradient(const BasicTensor<float>&, const BasicTensor<float>&,
                                              std::span<const double>);
template BasicTensor<double> loss_mse_gradient(const BasicTensor<double>&, const BasicTensor<double>&,
                                               std::span<const double>);
template std::pair<double, NetworkGradients<float>> batch_gradients(const BasicNetwork<float>&,
                                                                    std::span<const TrainSample>,
                                                                    std::span<const double>);
template std::pair<double, NetworkGradients<double>> batch_gradients(const BasicNetwork<double>&,
                                                                     std::span<const TrainSample>,
                                                                     std::span<const double>);

template void momentum_update(std::span<float>, std::span<float>, std::span<const float>, float, float);
template void momentum_update(std::span<double>, std::span<double>, std::span<const double>, double,
                              double);

}  // namespace srlab
