// Desk-scale training run: 9-1-5 at scale 3 on $SRLAB_DATA_DIR/T91, validated
// on $SRLAB_DATA_DIR/Set5. Takes CPU-hours, so it only runs when
// SRLAB_RUN_LONG=1; otherwise, or without the data, it exits 77 (skip).
//
// SRLAB_TRAIN_BACKPROPS overrides the 1e7 budget. SRLAB_TRAIN_LOG keeps the
// CSV log at the given path.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

#include "datasets.hpp"
#include "report.hpp"
#include "srlab/eval.hpp"
#include "srlab/image_io.hpp"
#include "srlab/train.hpp"
#include "temp_dir.hpp"

using namespace srlab;

namespace {

constexpr double kBicubicX3 = 30.39;
constexpr std::uint64_t kBudget = 10'000'000;
constexpr std::uint64_t kValidationEvery = 500'000;
constexpr std::size_t kMinTrainImages = 30;
// Moving average over this many consecutive validation points (2.5e6 backprops).
constexpr std::size_t kWindow = 5;
// Allowed dip between consecutive moving averages, in dB.
constexpr double kMonotoneSlack = 0.0;

std::vector<std::pair<std::string, Tensor>> load_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::string, Tensor>> out;
  for (const auto& f : files) out.emplace_back(f.filename().string(), to_float(load_image(f)));
  return out;
}

std::string fixed(double v, int precision) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

int main() {
  const char* long_flag = std::getenv("SRLAB_RUN_LONG");
  const auto t91 = acceptance::dataset_dir("T91");
  const auto set5 = acceptance::dataset_dir("Set5");
  if (long_flag == nullptr || std::string(long_flag) != "1" || !t91 || !set5) {
    std::printf("SKIP criterion 4: needs SRLAB_RUN_LONG=1 and SRLAB_DATA_DIR with T91/ and Set5/\n");
    std::printf("SKIP criterion 5: runs on the criterion 4 training log\n");
    return acceptance::kSkip;
  }

  TrainConfig cfg;
  cfg.total_backprops = kBudget;
  if (const char* b = std::getenv("SRLAB_TRAIN_BACKPROPS")) cfg.total_backprops = std::stoull(b);
  cfg.validation_every = kValidationEvery;

  const auto train_named = load_dir(*t91);
  std::vector<Tensor> train;
  for (const auto& [name, t] : train_named) train.push_back(t);
  const auto val = load_dir(*set5);

  const NetworkConfig net_cfg = basic_config();
  const auto samples = extract_subimages(strategy_images(Strategy::YOnly, train), cfg, net_cfg);
  std::printf("training 9-1-5 on %zu samples from %zu images for %llu backprops\n", samples.size(), train.size(),
              static_cast<unsigned long long>(cfg.total_backprops));
  const auto validation = make_validation_set(val, cfg.scale, cfg.degrade, 1, ColorSpace::YCbCr);

  srlab::testing::TempDir dir;
  TrainLoopOptions opts;
  const char* keep = std::getenv("SRLAB_TRAIN_LOG");
  opts.log_path = keep ? std::filesystem::path(keep) : dir.path / "log.csv";
  std::vector<LogRow> rows;
  opts.hooks.on_validation = [&](const LogRow& row) {
    rows.push_back(row);
    std::printf("  %10llu backprops  val %.3f dB  %.0fs\n", static_cast<unsigned long long>(row.backprops),
                row.val_psnr, row.elapsed_seconds);
    std::fflush(stdout);
    return true;
  };
  const Checkpoint ckpt = train_phases(plan_strategy(Strategy::YOnly), {init_network(net_cfg, cfg.seed), std::nullopt, 0},
                                       samples, validation, cfg, opts);

  EvalProtocol protocol;
  const auto report = evaluate_dataset(NetworkMethod{ckpt.net, ColorSpace::YCbCr, "9-1-5"}, *set5, protocol);
  const double final_psnr = report.averages.at(Metric::PSNR);
  double best = 0.0;
  std::uint64_t first_above = 0;
  for (const auto& r : rows) {
    best = std::max(best, r.val_psnr);
    if (first_above == 0 && r.val_psnr > kBicubicX3) first_above = r.backprops;
  }

  acceptance::Report out;
  std::ostringstream s4;
  s4 << train.size() << " training images, " << samples.size() << " samples; Set5 x3 Y-PSNR after "
     << ckpt.backprops << " backprops: " << fixed(final_psnr, 2) << " dB (want > " << fixed(kBicubicX3, 2)
     << "), first above bicubic at " << first_above << ", best " << fixed(best, 2);
  out.line(4, train.size() >= kMinTrainImages && ckpt.backprops <= kBudget && final_psnr > kBicubicX3, s4.str());

  // Substitute for the long run: the moving average of validation PSNR never drops.
  std::vector<double> ma;
  for (std::size_t i = 0; i + kWindow <= rows.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < kWindow; ++k) sum += rows[i + k].val_psnr;
    ma.push_back(sum / kWindow);
  }
  double worst_dip = 0.0;
  for (std::size_t i = 1; i < ma.size(); ++i) worst_dip = std::max(worst_dip, ma[i - 1] - ma[i]);
  std::ostringstream s5;
  s5 << ma.size() << " moving averages of " << kWindow << " validation points, largest dip " << fixed(worst_dip, 4)
     << " dB (allowed " << fixed(kMonotoneSlack, 2) << ")";
  out.line(5, ma.size() >= 2 && worst_dip <= kMonotoneSlack, s5.str());
  return out.exit_code();
}
