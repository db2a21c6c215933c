#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "srlab/image_io.hpp"
#include "srlab/model.hpp"
#include "srlab/resample.hpp"

namespace srlab {

/// PSNR in dB on a 0..255 scale; inputs are [0,1] tensors. Identical inputs
/// return +infinity.
double psnr(const Tensor& a, const Tensor& b);

/// Mean SSIM (11x11 Gaussian window, sigma 1.5, K1 = 0.01, K2 = 0.03, L = 255)
/// over the valid window positions, averaged across channels.
double ssim(const Tensor& a, const Tensor& b);

struct MsssimResult {
  double value = 0.0;
  int levels = 0;
  bool reduced = false;  // fewer than the requested levels fit the image
};

/// Multi-scale SSIM with the standard five weights and 2x2 mean downsampling.
/// Small images use as many levels as fit, with renormalized weights.
MsssimResult msssim(const Tensor& a, const Tensor& b, int max_levels = 5);

Tensor shave_border(const Tensor& img, int pixels);

enum class Metric { PSNR, SSIM, MSSSIM };
enum class EvalChannel { Y, RGB, Cb, Cr };

std::string to_string(Metric m);
std::string to_string(EvalChannel c);
Metric parse_metric(const std::string& s);
EvalChannel parse_channel(const std::string& s);

struct EvalProtocol {
  int scale = 3;
  int shave = -1;  // negative means "same as scale"
  std::vector<Metric> metrics{Metric::PSNR};
  EvalChannel channel = EvalChannel::Y;
  DegradeMode degrade = BicubicDownUp{};
  bool quantize = false;  // round evaluated channels to 8-bit levels first

  [[nodiscard]] int effective_shave() const { return shave < 0 ? scale : shave; }
  void validate() const;
};

/// Bicubic baseline: the degraded image is the output.
struct BicubicMethod {};

/// A trained network. Single-channel networks act on Y with Cb/Cr upscaled
/// bicubically; three-channel networks act on all channels of `space`.
struct NetworkMethod {
  Network net;
  ColorSpace space = ColorSpace::YCbCr;
  std::string label = "network";
};

using EvalMethod = std::variant<BicubicMethod, NetworkMethod>;

struct ImageResult {
  std::string image;
  bool failed = false;
  std::string error;
  std::map<Metric, double> values;
  bool msssim_reduced = false;
};

struct EvalReport {
  std::string method;
  std::string dataset;
  std::vector<ImageResult> images;
  std::map<Metric, double> averages;  // over non-failed images
  int failed = 0;

  void recompute_averages();
};

/// Super-resolves one ground-truth RGB or gray image (already in [0,1]) and scores it.
ImageResult evaluate_image(const EvalMethod& method, const std::string& name, const Tensor& hr,
                           const EvalProtocol& protocol);

/// Runs the protocol over every image in `hr_dir`, in filename order. Unreadable
/// images are recorded as failed entries.
EvalReport evaluate_dataset(const EvalMethod& method, const std::filesystem::path& hr_dir,
                            const EvalProtocol& protocol);

/// Rows of image,metric,value; failed images get value "failed".
void write_report_csv(std::ostream& out, const EvalReport& report);
void print_report_table(std::ostream& out, const EvalReport& report);

/// A degraded network input paired with its ground truth, both in the network's
/// channel space.
struct ValidationPair {
  std::string name;
  Tensor input;
  Tensor target;
};

/// Builds validation pairs from RGB/gray [0,1] images for a network with
/// `channels` channels operating in `space`.
std::vector<ValidationPair> make_validation_set(const std::vector<std::pair<std::string, Tensor>>& hr,
                                                int scale, const DegradeMode& mode, int channels,
                                                ColorSpace space);

/// Average Y-channel PSNR of predict_full over the pairs, shaving `shave` pixels.
double validation_psnr(const Network& net, const std::vector<ValidationPair>& pairs, ColorSpace space,
                       int shave);

}  // namespace srlab
