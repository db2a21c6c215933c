#include "srlab/resample.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace srlab {
namespace {

struct Taps {
  int first = 0;                // source index of the first tap (may be out of range)
  std::vector<double> weights;  // normalized
};

std::vector<Taps> resize_taps(int out_len, double scale, bool antialias) {
  const bool widen = antialias && scale < 1.0;
  const double kernel_width = widen ? 4.0 / scale : 4.0;
  const int tap_count = static_cast<int>(std::ceil(kernel_width)) + 2;
  std::vector<Taps> taps(out_len);
  for (int i = 0; i < out_len; ++i) {
    const double u = (i + 0.5) / scale - 0.5;
    const int left = static_cast<int>(std::floor(u - kernel_width / 2.0));
    Taps& t = taps[i];
    t.first = left;
    t.weights.resize(tap_count);
    double sum = 0.0;
    for (int p = 0; p < tap_count; ++p) {
      const double d = u - (left + p);
      const double w = widen ? scale * cubic_kernel(scale * d) : cubic_kernel(d);
      t.weights[p] = w;
      sum += w;
    }
    for (double& w : t.weights) w /= sum;
  }
  return taps;
}

Tensor resize_rows(const Tensor& img, int out_h, double scale, bool antialias) {
  const auto taps = resize_taps(out_h, scale, antialias);
  Tensor out(img.channels(), out_h, img.width());
  std::vector<double> acc(img.width());
  const int last = img.height() - 1;
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < out_h; ++y) {
      std::fill(acc.begin(), acc.end(), 0.0);
      const Taps& t = taps[y];
      for (std::size_t p = 0; p < t.weights.size(); ++p) {
        const double w = t.weights[p];
        if (w == 0.0) continue;
        const int sy = std::clamp(t.first + static_cast<int>(p), 0, last);
        const float* row = &img.at(c, sy, 0);
        for (int x = 0; x < img.width(); ++x) acc[x] += w * row[x];
      }
      float* dst = &out.at(c, y, 0);
      for (int x = 0; x < img.width(); ++x) dst[x] = static_cast<float>(acc[x]);
    }
  }
  return out;
}

Tensor resize_cols(const Tensor& img, int out_w, double scale, bool antialias) {
  const auto taps = resize_taps(out_w, scale, antialias);
  Tensor out(img.channels(), img.height(), out_w);
  const int last = img.width() - 1;
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y) {
      const float* row = &img.at(c, y, 0);
      float* dst = &out.at(c, y, 0);
      for (int x = 0; x < out_w; ++x) {
        const Taps& t = taps[x];
        double acc = 0.0;
        for (std::size_t p = 0; p < t.weights.size(); ++p) {
          acc += t.weights[p] * row[std::clamp(t.first + static_cast<int>(p), 0, last)];
        }
        dst[x] = static_cast<float>(acc);
      }
    }
  }
  return out;
}

Tensor resize_impl(const Tensor& img, int out_h, int out_w, double scale_h, double scale_w,
                   bool antialias) {
  if (img.empty()) throw ShapeError("cannot resize an empty image");
  if (out_h <= 0 || out_w <= 0) {
    throw ShapeError("resize to zero output dimension (" + std::to_string(out_h) + "x" +
                     std::to_string(out_w) + ")");
  }
  // Height first, then width; both passes accumulate in double.
  Tensor tmp = resize_rows(img, out_h, scale_h, antialias);
  return resize_cols(tmp, out_w, scale_w, antialias);
}

}  // namespace

double cubic_kernel(double x) {
  constexpr double a = -0.5;
  const double ax = std::abs(x);
  const double ax2 = ax * ax;
  const double ax3 = ax2 * ax;
  if (ax <= 1.0) return (a + 2.0) * ax3 - (a + 3.0) * ax2 + 1.0;
  if (ax < 2.0) return a * ax3 - 5.0 * a * ax2 + 8.0 * a * ax - 4.0 * a;
  return 0.0;
}

Tensor resize_bicubic(const Tensor& img, const ResizeSpec& spec) {
  if (!(spec.scale > 0.0)) throw ConfigError("resize scale must be positive");
  const int out_h = static_cast<int>(std::lround(img.height() * spec.scale));
  const int out_w = static_cast<int>(std::lround(img.width() * spec.scale));
  return resize_impl(img, out_h, out_w, spec.scale, spec.scale, spec.antialias);
}

Tensor resize_bicubic(const Tensor& img, int out_height, int out_width, bool antialias) {
  if (img.empty()) throw ShapeError("cannot resize an empty image");
  return resize_impl(img, out_height, out_width,
                     static_cast<double>(out_height) / img.height(),
                     static_cast<double>(out_width) / img.width(), antialias);
}

Tensor gaussian_blur(const Tensor& img, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;

  const int h = img.height();
  const int w = img.width();
  Tensor tmp(img.shape());
  Tensor out(img.shape());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          acc += k[i + radius] * img.at(c, y, std::clamp(x + i, 0, w - 1));
        }
        tmp.at(c, y, x) = static_cast<float>(acc);
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          acc += k[i + radius] * tmp.at(c, std::clamp(y + i, 0, h - 1), x);
        }
        out.at(c, y, x) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

Tensor modcrop(const Tensor& img, int scale) {
  if (scale < 1) throw ConfigError("modcrop scale must be >= 1");
  const int h = img.height() - img.height() % scale;
  const int w = img.width() - img.width() % scale;
  if (h == 0 || w == 0) throw ShapeError("modcrop leaves an empty image");
  if (h == img.height() && w == img.width()) return img;
  return crop(img, 0, 0, h, w);
}

Tensor degrade(const Tensor& hr, int scale, const DegradeMode& mode) {
  if (scale < 1) throw ConfigError("scale must be >= 1");
  if (hr.height() % scale != 0 || hr.width() % scale != 0) {
    throw ShapeError("image " + to_string(hr.shape()) + " not divisible by scale " +
                     std::to_string(scale) + "; modcrop first");
  }
  if (scale == 1) return hr;
  const int lh = hr.height() / scale;
  const int lw = hr.width() / scale;
  Tensor lr;
  if (std::holds_alternative<BicubicDownUp>(mode)) {
    lr = resize_bicubic(hr, lh, lw, /*antialias=*/true);
  } else {
    const double sigma = std::get<GaussianDecimateUp>(mode).sigma;
    const Tensor blurred = gaussian_blur(hr, sigma);
    lr = Tensor(hr.channels(), lh, lw);
    for (int c = 0; c < hr.channels(); ++c) {
      for (int y = 0; y < lh; ++y) {
        for (int x = 0; x < lw; ++x) lr.at(c, y, x) = blurred.at(c, y * scale, x * scale);
      }
    }
  }
  return resize_bicubic(lr, hr.height(), hr.width(), /*antialias=*/false);
}

DegradeMode parse_degrade_mode(const std::string& text) {
  if (text == "bicubic") return BicubicDownUp{};
  const std::string prefix = "gaussian:";
  if (text.rfind(prefix, 0) == 0) {
    double sigma = 0.0;
    try {
      std::size_t used = 0;
      sigma = std::stod(text.substr(prefix.size()), &used);
      if (used != text.size() - prefix.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw ConfigError("bad gaussian sigma in degrade mode '" + text + "'");
    }
    if (!(sigma > 0.0)) throw ConfigError("gaussian sigma must be positive");
    return GaussianDecimateUp{sigma};
  }
  throw ConfigError("unknown degrade mode '" + text + "' (expected bicubic or gaussian:<sigma>)");
}

std::string to_string(const DegradeMode& mode) {
  if (std::holds_alternative<BicubicDownUp>(mode)) return "bicubic";
  return "gaussian:" + std::to_string(std::get<GaussianDecimateUp>(mode).sigma);
}

}  // namespace srlab
