#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srlab/checkpoint.hpp"
#include "srlab/eval.hpp"
#include "srlab/model.hpp"
#include "srlab/resample.hpp"

namespace srlab {

/// A degraded sub-image and the central crop of its ground truth that the
/// valid forward pass is compared against.
struct TrainSample {
  Tensor input;
  Tensor target;
};

struct TrainConfig {
  int scale = 3;
  int f_sub = 33;
  int stride = 14;
  int batch_size = 128;
  double momentum = 0.9;
  std::vector<double> learning_rates;  // one per layer; empty = default_learning_rates()
  std::uint64_t total_backprops = 10'000'000;
  std::uint64_t seed = 1;
  std::vector<double> channel_weights;  // empty = all ones
  DegradeMode degrade = BicubicDownUp{};
  std::uint64_t validation_every = 500'000;
  std::uint64_t checkpoint_every = 0;  // 0 = only at the end
  std::uint64_t pretrain_backprops = 0;

  /// Fills defaulted fields for `net` and checks every invariant.
  [[nodiscard]] TrainConfig resolved(const NetworkConfig& net) const;
};

/// 1e-4 for every layer except the last, which gets 1e-5, multiplied by
/// out^2 / 2 (out = f_sub - shrink). The loss here is a per-pixel mean, so the
/// factor restores the step size of a per-sample half sum of squares.
std::vector<double> default_learning_rates(const NetworkConfig& net, int f_sub);

/// Output side of the valid forward pass on an f_sub crop.
int target_size(const NetworkConfig& net, int f_sub);

using WarningSink = std::function<void(const std::string&)>;

/// Grid crops at `stride` (positions 0, s, 2s, ... while pos + f_sub <= extent).
/// Each image is modcropped and degraded as a whole, then the input crop and the
/// central target crop are cut out. Images smaller than f_sub are skipped.
std::vector<TrainSample> extract_subimages(const std::vector<Tensor>& hr_images, const TrainConfig& config,
                                           const NetworkConfig& net, const WarningSink& warn = {});

/// Sum_ch w_ch * mean_px (pred - target)^2 / sum_ch w_ch.
double loss_mse(const Tensor& pred, const Tensor& target, std::span<const double> channel_weights);

/// d loss_mse / d pred.
template <typename T>
BasicTensor<T> loss_mse_gradient(const BasicTensor<T>& pred, const BasicTensor<T>& target,
                                 std::span<const double> channel_weights);

/// Batch loss and parameter gradients, averaged over the batch.
template <typename T>
std::pair<double, NetworkGradients<T>> batch_gradients(const BasicNetwork<T>& net,
                                                       std::span<const TrainSample> batch,
                                                       std::span<const double> channel_weights);

/// delta = momentum * delta - lr * grad; param += delta (elementwise).
template <typename T>
void momentum_update(std::span<T> param, std::span<T> delta, std::span<const T> grad, T lr, T momentum);

/// One momentum step on `batch`: delta = momentum * delta - lr_layer * grad,
/// param += delta, for weights and biases alike. Returns the batch loss
/// measured before the update. `config` must be resolved.
double sgd_step(Network& net, MomentumState& state, std::span<const TrainSample> batch,
                const TrainConfig& config);

struct LogRow {
  std::uint64_t backprops = 0;
  std::uint64_t epoch = 0;
  double train_loss = 0.0;
  double val_psnr = 0.0;
  double elapsed_seconds = 0.0;
};

struct TrainHooks {
  std::function<void(std::uint64_t backprops, double loss)> on_step;
  /// Called after each validation event; returning false stops training.
  std::function<bool(const LogRow&)> on_validation;
};

struct TrainLoopOptions {
  std::filesystem::path log_path;         // empty = no CSV log
  std::filesystem::path checkpoint_path;  // empty = no checkpoint files
  ColorSpace space = ColorSpace::YCbCr;   // for validation PSNR of 3-channel nets
  TrainHooks hooks;
};

/// Sample index visited at global position `k` (epoch k / n, seeded shuffle per epoch).
std::size_t sample_at(std::uint64_t k, std::size_t n, std::uint64_t seed);

/// The permutation used for `epoch`.
std::vector<std::size_t> epoch_permutation(std::size_t n, std::uint64_t seed, std::uint64_t epoch);

/// Trains from `start` until config.total_backprops (or a hook stops it).
/// Validation runs every config.validation_every backprops and at the end;
/// each appends a CSV row. Checkpoints are written atomically.
Checkpoint train_loop(Checkpoint start, std::span<const TrainSample> samples,
                      const std::vector<ValidationPair>& validation, const TrainConfig& config,
                      const TrainLoopOptions& options = {});

inline constexpr const char* kLogHeader = "backprops,epoch,train_loss,val_psnr,elapsed_seconds";

enum class Strategy { YOnly, YCbCr, YPretrain, CbCrPretrain, RGB };

Strategy parse_strategy(const std::string& s);
std::string to_string(Strategy s);

/// Channel count, color space and phase-1 loss weights of a strategy.
struct StrategyPlan {
  int channels = 1;
  ColorSpace space = ColorSpace::YCbCr;
  std::vector<double> phase1_weights;  // empty when there is no pre-training phase
};
StrategyPlan plan_strategy(Strategy s);

/// Converts RGB [0,1] images into the strategy's training space.
std::vector<Tensor> strategy_images(Strategy s, const std::vector<Tensor>& rgb_images);

/// Runs the strategy's schedule from `start`: while start.backprops is below
/// config.pretrain_backprops and the plan has phase-1 weights, trains with those
/// weights; then trains all channels until total_backprops.
Checkpoint train_phases(const StrategyPlan& plan, Checkpoint start, std::span<const TrainSample> samples,
                        const std::vector<ValidationPair>& validation, const TrainConfig& config,
                        const TrainLoopOptions& options = {});

/// Builds samples for the strategy, trains (phase 1 for config.pretrain_backprops
/// with masked weights, then all channels until total_backprops) and returns the
/// final checkpoint. `widths` are the filter counts of all but the last layer.
Checkpoint run_strategy(Strategy strategy, const std::vector<Tensor>& rgb_images,
                        const std::vector<std::pair<std::string, Tensor>>& validation_rgb,
                        const std::string& layer_sizes, const std::vector<int>& widths,
                        const TrainConfig& config, const TrainLoopOptions& options = {});

}  // namespace srlab
