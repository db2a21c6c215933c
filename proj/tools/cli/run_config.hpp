#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "srlab/eval.hpp"
#include "srlab/train.hpp"

namespace srlab::cli {

/// Flat key=value run description. Blank lines and lines starting with '#'
/// are ignored; unknown or repeated keys are errors.
///
///   layers, widths, strategy
///   scale, f_sub, stride, batch_size, momentum, learning_rates, total_backprops,
///   seed, degrade, validation_every, checkpoint_every, pretrain_backprops,
///   validation_dir
///   shave, metrics, eval_channel, quantize
///
/// `scale` and `degrade` apply to both training and evaluation.
struct RunConfig {
  std::string layers = "9-1-5";
  std::vector<int> widths{64, 32};
  Strategy strategy = Strategy::YOnly;
  TrainConfig train;
  EvalProtocol eval;
  std::filesystem::path validation_dir;

  [[nodiscard]] NetworkConfig network() const;
  /// Throws ConfigError if any field breaks its module's invariants.
  void validate() const;
};

RunConfig parse_run_config(std::istream& in, const std::string& source = "config");
RunConfig load_run_config(const std::filesystem::path& path);

/// Every key with its current value, in a form parse_run_config reads back.
void write_run_config(std::ostream& out, const RunConfig& cfg);

}  // namespace srlab::cli
