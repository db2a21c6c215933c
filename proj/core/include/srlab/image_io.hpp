#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "srlab/tensor.hpp"

namespace srlab {

/// 8-bit image with interleaved samples (1 = gray, 3 = RGB).
struct ImageU8 {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  ImageU8() = default;
  ImageU8(int channels, int height, int width);

  [[nodiscard]] std::uint8_t& at(int y, int x, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  [[nodiscard]] std::uint8_t at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  friend bool operator==(const ImageU8&, const ImageU8&) = default;
};

enum class ColorSpace { Gray, RGB, YCbCr };

/// Reads PNG, binary PPM (P6), PGM (P5) or uncompressed BMP, detected from the
/// leading bytes. Alpha is dropped and palettes are expanded. Throws FormatError,
/// TruncatedError or IoError.
ImageU8 load_image(const std::filesystem::path& path);

/// Writes by extension: .png, .ppm or .pgm. PPM requires 3 channels, PGM 1.
void save_image(const std::filesystem::path& path, const ImageU8& img);

/// Planar float tensor in [0,1].
Tensor to_float(const ImageU8& img);

/// Clamps to [0,1], scales by 255 and rounds half away from zero.
ImageU8 to_u8(const Tensor& t);

/// BT.601 studio-swing conversion on [0,1] values; channel order Y, Cb, Cr.
Tensor rgb_to_ycbcr(const Tensor& rgb);
Tensor ycbcr_to_rgb(const Tensor& ycbcr);

/// Luminance of an RGB tensor, or the tensor itself when it is single-channel.
Tensor luminance(const Tensor& img);

/// Images in a directory with a supported extension, sorted by filename.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

}  // namespace srlab
