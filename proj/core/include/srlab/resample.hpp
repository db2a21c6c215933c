#pragma once

#include <variant>

#include "srlab/tensor.hpp"

namespace srlab {

/// Cubic-convolution kernel with a = -0.5.
double cubic_kernel(double x);

struct ResizeSpec {
  double scale = 1.0;     // output / input
  bool antialias = true;  // widens the kernel when scale < 1
};

/// Separable bicubic resize. Output extent is round(extent * scale); output pixel i
/// samples source coordinate (i + 0.5) / scale - 0.5; out-of-range taps replicate the edge.
Tensor resize_bicubic(const Tensor& img, const ResizeSpec& spec);

/// Same, with an explicit output size (the scale is then height/width specific).
Tensor resize_bicubic(const Tensor& img, int out_height, int out_width, bool antialias = true);

/// Separable Gaussian blur with radius ceil(3 sigma) and edge replication.
Tensor gaussian_blur(const Tensor& img, double sigma);

/// Crops bottom/right so both dimensions are multiples of `scale`.
Tensor modcrop(const Tensor& img, int scale);

struct BicubicDownUp {};
struct GaussianDecimateUp {
  double sigma = 0.55;
};
using DegradeMode = std::variant<BicubicDownUp, GaussianDecimateUp>;

/// HR -> LR -> HR-sized network input. `hr` must already be modcropped.
Tensor degrade(const Tensor& hr, int scale, const DegradeMode& mode);

/// Parses "bicubic" or "gaussian:<sigma>".
DegradeMode parse_degrade_mode(const std::string& text);
std::string to_string(const DegradeMode& mode);

}  // namespace srlab
