#include "srlab/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace srlab {
namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
constexpr std::array<double, 5> kMsssimWeights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

struct Plane {
  int h = 0;
  int w = 0;
  std::vector<double> v;
  double& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
  double at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

Plane plane_255(const Tensor& t, int c) {
  Plane p{t.height(), t.width(), {}};
  auto src = t.channel(c);
  p.v.resize(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) p.v[i] = 255.0 * src[i];
  return p;
}

const std::array<double, kWindow>& gaussian_window() {
  static const auto w = [] {
    std::array<double, kWindow> k{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
      const double d = i - kWindow / 2;
      k[i] = std::exp(-(d * d) / (2.0 * kWindowSigma * kWindowSigma));
      sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
  }();
  return w;
}

// Valid-region separable filtering with the SSIM window.
Plane filter_valid(const Plane& in) {
  const auto& k = gaussian_window();
  const int oh = in.h - kWindow + 1;
  const int ow = in.w - kWindow + 1;
  Plane tmp{in.h, ow, std::vector<double>(static_cast<std::size_t>(in.h) * ow)};
  for (int y = 0; y < in.h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += k[i] * in.at(y, x + i);
      tmp.at(y, x) = acc;
    }
  }
  Plane out{oh, ow, std::vector<double>(static_cast<std::size_t>(oh) * ow)};
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += k[i] * tmp.at(y + i, x);
      out.at(y, x) = acc;
    }
  }
  return out;
}

Plane product(const Plane& a, const Plane& b) {
  Plane p{a.h, a.w, std::vector<double>(a.v.size())};
  for (std::size_t i = 0; i < a.v.size(); ++i) p.v[i] = a.v[i] * b.v[i];
  return p;
}

struct SsimStats {
  double ssim = 0.0;  // mean of l * cs
  double cs = 0.0;    // mean of contrast-structure term
};

SsimStats ssim_stats(const Plane& a, const Plane& b) {
  if (a.h < kWindow || a.w < kWindow) {
    throw ShapeError("SSIM needs images of at least " + std::to_string(kWindow) + "x" +
                     std::to_string(kWindow));
  }
  const Plane mu1 = filter_valid(a);
  const Plane mu2 = filter_valid(b);
  const Plane s11 = filter_valid(product(a, a));
  const Plane s22 = filter_valid(product(b, b));
  const Plane s12 = filter_valid(product(a, b));
  double sum_ssim = 0.0;
  double sum_cs = 0.0;
  for (std::size_t i = 0; i < mu1.v.size(); ++i) {
    const double m1 = mu1.v[i];
    const double m2 = mu2.v[i];
    const double m12 = m1 * m2;
    const double m11 = m1 * m1;
    const double m22 = m2 * m2;
    const double v1 = s11.v[i] - m11;
    const double v2 = s22.v[i] - m22;
    const double cov = s12.v[i] - m12;
    const double cs = (2.0 * cov + kC2) / (v1 + v2 + kC2);
    const double l = (2.0 * m12 + kC1) / (m11 + m22 + kC1);
    sum_cs += cs;
    sum_ssim += l * cs;
  }
  const auto n = static_cast<double>(mu1.v.size());
  return {sum_ssim / n, sum_cs / n};
}

Plane downsample2(const Plane& p) {
  Plane out{p.h / 2, p.w / 2, {}};
  out.v.resize(static_cast<std::size_t>(out.h) * out.w);
  for (int y = 0; y < out.h; ++y) {
    for (int x = 0; x < out.w; ++x) {
      out.at(y, x) = 0.25 * (p.at(2 * y, 2 * x) + p.at(2 * y, 2 * x + 1) + p.at(2 * y + 1, 2 * x) +
                             p.at(2 * y + 1, 2 * x + 1));
    }
  }
  return out;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shapes differ (" + to_string(a.shape()) + " vs " +
                     to_string(b.shape()) + ")");
  }
  if (a.empty()) throw ShapeError(std::string(what) + ": empty image");
}

Tensor quantized(Tensor t) {
  for (float& v : t.data()) v = static_cast<float>(std::round(std::clamp(v, 0.0f, 1.0f) * 255.0) / 255.0);
  return t;
}

Tensor single(const Tensor& t, int c) {
  const int which[] = {c};
  return select_channels(t, which);
}

// Super-resolves a degraded YCbCr image; returns the result in YCbCr.
Tensor super_resolve_ycc(const EvalMethod& method, const Tensor& degraded_ycc) {
  if (std::holds_alternative<BicubicMethod>(method)) return degraded_ycc;
  const auto& m = std::get<NetworkMethod>(method);
  const int c = m.net.config.channels;
  if (c == 1) {
    Tensor out = degraded_ycc;
    set_channel(out, 0, predict_full(m.net, single(degraded_ycc, 0)));
    return out;
  }
  if (c != 3) throw ConfigError("network must have 1 or 3 channels for evaluation");
  if (m.space == ColorSpace::RGB) {
    return rgb_to_ycbcr(predict_full(m.net, ycbcr_to_rgb(degraded_ycc)));
  }
  return predict_full(m.net, degraded_ycc);
}

}  // namespace

double psnr(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "psnr");
  auto x = a.data();
  auto y = b.data();
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = 255.0 * (static_cast<double>(x[i]) - static_cast<double>(y[i]));
    sse += d * d;
  }
  const double mse = sse / static_cast<double>(x.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "ssim");
  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) total += ssim_stats(plane_255(a, c), plane_255(b, c)).ssim;
  return total / a.channels();
}

MsssimResult msssim(const Tensor& a, const Tensor& b, int max_levels) {
  require_same_shape(a, b, "msssim");
  if (max_levels < 1 || max_levels > static_cast<int>(kMsssimWeights.size())) {
    throw ConfigError("MS-SSIM levels must be in [1, 5]");
  }
  int levels = 0;
  for (int extent = std::min(a.height(), a.width()); levels < max_levels && extent >= kWindow;
       extent /= 2) {
    ++levels;
  }
  if (levels == 0) throw ShapeError("image too small for MS-SSIM");

  double weight_sum = 0.0;
  for (int l = 0; l < levels; ++l) weight_sum += kMsssimWeights[l];

  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    Plane pa = plane_255(a, c);
    Plane pb = plane_255(b, c);
    double value = 1.0;
    for (int l = 0; l < levels; ++l) {
      const double w = levels == 1 ? 1.0 : kMsssimWeights[l] / weight_sum;
      const SsimStats s = ssim_stats(pa, pb);
      // Negative contrast terms would make the fractional power undefined.
      const double term = l + 1 == levels ? s.ssim : s.cs;
      value *= std::pow(std::max(term, 0.0), w);
      if (l + 1 < levels) {
        pa = downsample2(pa);
        pb = downsample2(pb);
      }
    }
    total += value;
  }
  return {total / a.channels(), levels, levels < max_levels};
}

Tensor shave_border(const Tensor& img, int pixels) {
  if (pixels < 0) throw ShapeError("negative shave");
  if (pixels == 0) return img;
  if (2 * pixels >= img.height() || 2 * pixels >= img.width()) {
    throw ShapeError("shaving " + std::to_string(pixels) + " pixels empties a " +
                     to_string(img.shape()) + " image");
  }
  return crop(img, pixels, pixels, img.height() - 2 * pixels, img.width() - 2 * pixels);
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::PSNR: return "psnr";
    case Metric::SSIM: return "ssim";
    case Metric::MSSSIM: return "msssim";
  }
  return "?";
}

std::string to_string(EvalChannel c) {
  switch (c) {
    case EvalChannel::Y: return "y";
    case EvalChannel::RGB: return "rgb";
    case EvalChannel::Cb: return "cb";
    case EvalChannel::Cr: return "cr";
  }
  return "?";
}

Metric parse_metric(const std::string& s) {
  if (s == "psnr") return Metric::PSNR;
  if (s == "ssim") return Metric::SSIM;
  if (s == "msssim") return Metric::MSSSIM;
  throw ConfigError("unknown metric '" + s + "' (psnr, ssim, msssim)");
}

EvalChannel parse_channel(const std::string& s) {
  if (s == "y") return EvalChannel::Y;
  if (s == "rgb") return EvalChannel::RGB;
  if (s == "cb") return EvalChannel::Cb;
  if (s == "cr") return EvalChannel::Cr;
  throw ConfigError("unknown channel '" + s + "' (y, rgb, cb, cr)");
}

void EvalProtocol::validate() const {
  if (scale < 1) throw ConfigError("scale must be >= 1");
  if (metrics.empty()) throw ConfigError("metric set must not be empty");
}

void EvalReport::recompute_averages() {
  averages.clear();
  failed = 0;
  std::map<Metric, int> counts;
  for (const auto& img : images) {
    if (img.failed) {
      ++failed;
      continue;
    }
    for (const auto& [m, v] : img.values) {
      averages[m] += v;
      ++counts[m];
    }
  }
  for (auto& [m, v] : averages) v /= counts[m];
}

ImageResult evaluate_image(const EvalMethod& method, const std::string& name, const Tensor& hr_in,
                           const EvalProtocol& protocol) {
  protocol.validate();
  ImageResult result;
  result.image = name;
  const Tensor hr = modcrop(hr_in, protocol.scale);
  const bool color = hr.channels() == 3;
  if (!color && protocol.channel != EvalChannel::Y) {
    throw ConfigError("channel " + to_string(protocol.channel) + " needs a color image");
  }
  const Tensor gt_ycc = color ? rgb_to_ycbcr(hr) : hr;

  Tensor sr_ycc;
  if (color) {
    sr_ycc = super_resolve_ycc(method, degrade(gt_ycc, protocol.scale, protocol.degrade));
  } else {
    const Tensor deg = degrade(gt_ycc, protocol.scale, protocol.degrade);
    if (const auto* m = std::get_if<NetworkMethod>(&method)) {
      if (m->net.config.channels != 1) throw ConfigError("gray image needs a single-channel network");
      sr_ycc = predict_full(m->net, deg);
    } else {
      sr_ycc = deg;
    }
  }

  Tensor sr;
  Tensor gt;
  switch (protocol.channel) {
    case EvalChannel::Y:
      sr = single(sr_ycc, 0);
      gt = single(gt_ycc, 0);
      break;
    case EvalChannel::Cb:
      sr = single(sr_ycc, 1);
      gt = single(gt_ycc, 1);
      break;
    case EvalChannel::Cr:
      sr = single(sr_ycc, 2);
      gt = single(gt_ycc, 2);
      break;
    case EvalChannel::RGB:
      sr = ycbcr_to_rgb(sr_ycc);
      gt = hr;
      break;
  }
  if (protocol.quantize) {
    sr = quantized(std::move(sr));
    gt = quantized(std::move(gt));
  }
  const int shave = protocol.effective_shave();
  sr = shave_border(sr, shave);
  gt = shave_border(gt, shave);
  for (Metric m : protocol.metrics) {
    switch (m) {
      case Metric::PSNR: result.values[m] = psnr(sr, gt); break;
      case Metric::SSIM: result.values[m] = ssim(sr, gt); break;
      case Metric::MSSSIM: {
        const auto r = msssim(sr, gt);
        result.values[m] = r.value;
        result.msssim_reduced = r.reduced;
        break;
      }
    }
  }
  return result;
}

EvalReport evaluate_dataset(const EvalMethod& method, const std::filesystem::path& hr_dir,
                            const EvalProtocol& protocol) {
  protocol.validate();
  EvalReport report;
  report.method = std::holds_alternative<BicubicMethod>(method) ? "bicubic"
                                                                : std::get<NetworkMethod>(method).label;
  report.dataset = hr_dir.filename().empty() ? hr_dir.parent_path().filename().string()
                                             : hr_dir.filename().string();
  for (const auto& path : list_images(hr_dir)) {
    const std::string name = path.filename().string();
    try {
      report.images.push_back(evaluate_image(method, name, to_float(load_image(path)), protocol));
    } catch (const Error& e) {
      ImageResult failed;
      failed.image = name;
      failed.failed = true;
      failed.error = e.what();
      report.images.push_back(std::move(failed));
    }
  }
  report.recompute_averages();
  return report;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "image,metric,value\n";
  std::ostringstream num;
  num << std::setprecision(10);
  for (const auto& img : report.images) {
    if (img.failed) {
      out << img.image << ",all,failed\n";
      continue;
    }
    for (const auto& [m, v] : img.values) {
      num.str("");
      if (std::isinf(v)) {
        num << "inf";
      } else {
        num << v;
      }
      out << img.image << ',' << to_string(m) << ',' << num.str() << '\n';
    }
  }
  for (const auto& [m, v] : report.averages) {
    num.str("");
    num << v;
    out << "average," << to_string(m) << ',' << num.str() << '\n';
  }
}

void print_report_table(std::ostream& out, const EvalReport& report) {
  std::vector<Metric> metrics;
  for (const auto& img : report.images) {
    for (const auto& [m, v] : img.values) {
      if (std::find(metrics.begin(), metrics.end(), m) == metrics.end()) metrics.push_back(m);
    }
  }
  std::sort(metrics.begin(), metrics.end());
  std::size_t name_w = 7;
  for (const auto& img : report.images) name_w = std::max(name_w, img.image.size());
  out << report.method << " on " << report.dataset << '\n';
  out << std::left << std::setw(static_cast<int>(name_w) + 2) << "image";
  for (Metric m : metrics) out << std::right << std::setw(12) << to_string(m);
  out << '\n';
  auto row = [&](const std::string& name, const std::map<Metric, double>& values) {
    out << std::left << std::setw(static_cast<int>(name_w) + 2) << name;
    for (Metric m : metrics) {
      out << std::right << std::setw(12);
      const auto it = values.find(m);
      if (it == values.end()) {
        out << "-";
      } else if (std::isinf(it->second)) {
        out << "inf";
      } else {
        out << std::fixed << std::setprecision(m == Metric::PSNR ? 2 : 4) << it->second;
      }
    }
    out << '\n';
  };
  for (const auto& img : report.images) {
    if (img.failed) {
      out << std::left << std::setw(static_cast<int>(name_w) + 2) << img.image << "failed: " << img.error
          << '\n';
    } else {
      row(img.image, img.values);
    }
  }
  row("average", report.averages);
  out.unsetf(std::ios::fixed);
}

std::vector<ValidationPair> make_validation_set(const std::vector<std::pair<std::string, Tensor>>& hr,
                                                int scale, const DegradeMode& mode, int channels,
                                                ColorSpace space) {
  std::vector<ValidationPair> pairs;
  for (const auto& [name, img] : hr) {
    const Tensor gt = modcrop(img, scale);
    Tensor target;
    if (channels == 1) {
      target = luminance(gt);
    } else if (gt.channels() != 3) {
      throw ConfigError("'" + name + "': three-channel network needs color validation images");
    } else {
      target = space == ColorSpace::RGB ? gt : rgb_to_ycbcr(gt);
    }
    Tensor input = degrade(target, scale, mode);
    pairs.push_back({name, std::move(input), std::move(target)});
  }
  return pairs;
}

double validation_psnr(const Network& net, const std::vector<ValidationPair>& pairs, ColorSpace space,
                       int shave) {
  if (pairs.empty()) throw ConfigError("empty validation set");
  double total = 0.0;
  for (const auto& p : pairs) {
    Tensor sr = predict_full(net, p.input);
    Tensor gt = p.target;
    if (sr.channels() == 3) {
      if (space == ColorSpace::RGB) {
        sr = rgb_to_ycbcr(sr);
        gt = rgb_to_ycbcr(gt);
      }
      sr = single(sr, 0);
      gt = single(gt, 0);
    }
    total += psnr(shave_border(sr, shave), shave_border(gt, shave));
  }
  return total / static_cast<double>(pairs.size());
}

}  // namespace srlab
