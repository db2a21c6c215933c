#include "srlab/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace srlab {
namespace {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return bytes;
}

void write_file(const fs::path& path, const std::uint8_t* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
  out.close();
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

bool is_png(const std::vector<std::uint8_t>& b) {
  static constexpr std::array<std::uint8_t, 8> sig{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return b.size() >= sig.size() && std::equal(sig.begin(), sig.end(), b.begin());
}

ImageU8 decode_png(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("'" + path.string() + "': " + msg);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  ImageU8 img(color ? 3 : 1, static_cast<int>(image.height), static_cast<int>(image.width));
  if (!png_image_finish_read(&image, nullptr, img.data.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    // libpng reports a short buffer as a read/CRC failure on the missing chunk.
    if (msg.find("EOF") != std::string::npos || msg.find("end") != std::string::npos ||
        msg.find("Not enough") != std::string::npos || msg.find("Read Error") != std::string::npos) {
      throw TruncatedError("'" + path.string() + "' is truncated: " + msg);
    }
    throw FormatError("'" + path.string() + "': " + msg);
  }
  return img;
}

// Reads one whitespace-delimited header integer, skipping '#' comments.
int pnm_header_int(const std::vector<std::uint8_t>& b, std::size_t& pos, const fs::path& path) {
  while (pos < b.size()) {
    if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (std::isspace(b[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= b.size()) throw TruncatedError("'" + path.string() + "': header ends early");
  if (!std::isdigit(b[pos])) throw FormatError("'" + path.string() + "': malformed PNM header");
  long value = 0;
  while (pos < b.size() && std::isdigit(b[pos])) {
    value = value * 10 + (b[pos] - '0');
    if (value > (1 << 24)) throw FormatError("'" + path.string() + "': PNM header value too large");
    ++pos;
  }
  return static_cast<int>(value);
}

ImageU8 decode_pnm(const std::vector<std::uint8_t>& b, const fs::path& path) {
  const int channels = b[1] == '6' ? 3 : 1;
  std::size_t pos = 2;
  const int width = pnm_header_int(b, pos, path);
  const int height = pnm_header_int(b, pos, path);
  const int maxval = pnm_header_int(b, pos, path);
  if (width <= 0 || height <= 0) throw FormatError("'" + path.string() + "': zero image dimension");
  if (maxval <= 0 || maxval > 255) {
    throw FormatError("'" + path.string() + "': unsupported PNM maxval " + std::to_string(maxval));
  }
  if (pos >= b.size() || !std::isspace(b[pos])) {
    throw TruncatedError("'" + path.string() + "': missing raster after header");
  }
  ++pos;
  ImageU8 img(channels, height, width);
  if (b.size() - pos < img.data.size()) {
    throw TruncatedError("'" + path.string() + "': raster has " + std::to_string(b.size() - pos) +
                         " bytes, expected " + std::to_string(img.data.size()));
  }
  std::copy_n(b.begin() + static_cast<std::ptrdiff_t>(pos), img.data.size(), img.data.begin());
  if (maxval != 255) {
    for (auto& v : img.data) v = static_cast<std::uint8_t>(std::lround(v * 255.0 / maxval));
  }
  return img;
}

std::uint32_t le_u32(const std::vector<std::uint8_t>& b, std::size_t pos) {
  return static_cast<std::uint32_t>(b[pos]) | (static_cast<std::uint32_t>(b[pos + 1]) << 8) |
         (static_cast<std::uint32_t>(b[pos + 2]) << 16) | (static_cast<std::uint32_t>(b[pos + 3]) << 24);
}

std::uint16_t le_u16(const std::vector<std::uint8_t>& b, std::size_t pos) {
  return static_cast<std::uint16_t>(b[pos] | (b[pos + 1] << 8));
}

// Uncompressed 8-bit paletted, 24-bit and 32-bit BMP (read only).
ImageU8 decode_bmp(const std::vector<std::uint8_t>& b, const fs::path& path) {
  const std::string name = "'" + path.string() + "'";
  if (b.size() < 14 + 40) throw TruncatedError(name + ": BMP header ends early");
  const std::uint32_t offset = le_u32(b, 10);
  const std::uint32_t info_size = le_u32(b, 14);
  if (info_size < 40) throw FormatError(name + ": unsupported BMP header version");
  const auto width = static_cast<std::int32_t>(le_u32(b, 18));
  const auto raw_height = static_cast<std::int32_t>(le_u32(b, 22));
  const int bpp = le_u16(b, 28);
  const std::uint32_t compression = le_u32(b, 30);
  if (width <= 0 || raw_height == 0 || width > (1 << 24) || std::abs(raw_height) > (1 << 24)) {
    throw FormatError(name + ": bad BMP dimensions");
  }
  if (!(compression == 0 || (compression == 3 && bpp == 32)) || (bpp != 8 && bpp != 24 && bpp != 32)) {
    throw FormatError(name + ": only uncompressed 8/24/32-bit BMP is supported");
  }
  const bool bottom_up = raw_height > 0;
  const int height = std::abs(raw_height);

  std::vector<std::array<std::uint8_t, 3>> palette;
  bool gray_palette = true;
  if (bpp == 8) {
    std::uint32_t colors = le_u32(b, 46);
    if (colors == 0 || colors > 256) colors = 256;
    const std::size_t start = 14 + info_size;
    if (b.size() < start + 4 * colors) throw TruncatedError(name + ": BMP palette ends early");
    for (std::uint32_t i = 0; i < colors; ++i) {
      const std::size_t p = start + 4 * i;
      palette.push_back({b[p + 2], b[p + 1], b[p]});
      gray_palette = gray_palette && b[p] == b[p + 1] && b[p + 1] == b[p + 2];
    }
  }
  const std::size_t row_bytes = (static_cast<std::size_t>(width) * bpp / 8 + 3) & ~std::size_t{3};
  if (offset > b.size() || b.size() - offset < row_bytes * height) {
    throw TruncatedError(name + ": BMP pixel data ends early");
  }
  const int channels = bpp == 8 && gray_palette ? 1 : 3;
  ImageU8 img(channels, height, width);
  for (int y = 0; y < height; ++y) {
    const std::size_t row = offset + row_bytes * static_cast<std::size_t>(bottom_up ? height - 1 - y : y);
    for (int x = 0; x < width; ++x) {
      if (bpp == 8) {
        const std::uint8_t idx = b[row + x];
        if (idx >= palette.size()) throw FormatError(name + ": BMP palette index out of range");
        for (int c = 0; c < channels; ++c) img.at(y, x, c) = palette[idx][c];
      } else {
        const std::size_t p = row + static_cast<std::size_t>(x) * (bpp / 8);
        img.at(y, x, 0) = b[p + 2];
        img.at(y, x, 1) = b[p + 1];
        img.at(y, x, 2) = b[p];
      }
    }
  }
  return img;
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

void check_image(const ImageU8& img) {
  if ((img.channels != 1 && img.channels != 3) || img.height <= 0 || img.width <= 0 ||
      img.data.size() != static_cast<std::size_t>(img.channels) * img.height * img.width) {
    throw ConfigError("malformed 8-bit image");
  }
}

// Rows: Y, Cb, Cr. Columns: R, G, B. Offsets added before dividing by 255.
constexpr std::array<std::array<double, 3>, 3> kForward{{
    {65.481, 128.553, 24.966},
    {-37.797, -74.203, 112.0},
    {112.0, -93.786, -18.214},
}};
constexpr std::array<double, 3> kOffset{16.0, 128.0, 128.0};

std::array<std::array<double, 3>, 3> invert(const std::array<std::array<double, 3>, 3>& m) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  std::array<std::array<double, 3>, 3> r{};
  r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return r;
}

void require_three_channels(const Tensor& t, const char* what) {
  if (t.channels() != 3) {
    throw ConfigError(std::string(what) + " expects 3 channels, got " + std::to_string(t.channels()));
  }
}

}  // namespace

ImageU8::ImageU8(int c, int h, int w)
    : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, 0) {}

ImageU8 load_image(const fs::path& path) {
  const auto bytes = read_file(path);
  if (bytes.empty()) throw TruncatedError("'" + path.string() + "' is empty");
  if (is_png(bytes)) return decode_png(bytes, path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return decode_pnm(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M') return decode_bmp(bytes, path);
  throw FormatError("'" + path.string() + "': unrecognized image format");
}

void save_image(const fs::path& path, const ImageU8& img) {
  check_image(img);
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.data.data(), 0, nullptr)) {
      throw FormatError(std::string("PNG encode failed: ") + image.message);
    }
    std::vector<std::uint8_t> buffer(size);
    if (!png_image_write_to_memory(&image, buffer.data(), &size, 0, img.data.data(), 0, nullptr)) {
      throw FormatError(std::string("PNG encode failed: ") + image.message);
    }
    write_file(path, buffer.data(), size);
    return;
  }
  if (ext == ".ppm" || ext == ".pgm") {
    const int want = ext == ".ppm" ? 3 : 1;
    if (img.channels != want) {
      throw ConfigError("'" + path.string() + "' needs a " + std::to_string(want) + "-channel image");
    }
    const std::string header = std::string(want == 3 ? "P6" : "P5") + "\n" +
                               std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> buffer(header.begin(), header.end());
    buffer.insert(buffer.end(), img.data.begin(), img.data.end());
    write_file(path, buffer.data(), buffer.size());
    return;
  }
  throw FormatError("'" + path.string() + "': unsupported output extension");
}

Tensor to_float(const ImageU8& img) {
  check_image(img);
  Tensor t(img.channels, img.height, img.width);
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) t.at(c, y, x) = img.at(y, x, c) / 255.0f;
    }
  }
  return t;
}

ImageU8 to_u8(const Tensor& t) {
  if (t.channels() != 1 && t.channels() != 3) {
    throw ConfigError("to_u8 expects 1 or 3 channels, got " + std::to_string(t.channels()));
  }
  ImageU8 img(t.channels(), t.height(), t.width());
  for (int c = 0; c < t.channels(); ++c) {
    for (int y = 0; y < t.height(); ++y) {
      for (int x = 0; x < t.width(); ++x) {
        const double v = std::clamp(static_cast<double>(t.at(c, y, x)), 0.0, 1.0);
        img.at(y, x, c) = static_cast<std::uint8_t>(std::round(v * 255.0));
      }
    }
  }
  return img;
}

Tensor rgb_to_ycbcr(const Tensor& rgb) {
  require_three_channels(rgb, "rgb_to_ycbcr");
  Tensor out(rgb.shape());
  const std::size_t n = rgb.plane_size();
  auto r = rgb.channel(0), g = rgb.channel(1), b = rgb.channel(2);
  for (int k = 0; k < 3; ++k) {
    auto dst = out.channel(k);
    const auto& m = kForward[k];
    for (std::size_t i = 0; i < n; ++i) {
      dst[i] = static_cast<float>((kOffset[k] + m[0] * r[i] + m[1] * g[i] + m[2] * b[i]) / 255.0);
    }
  }
  return out;
}

Tensor ycbcr_to_rgb(const Tensor& ycbcr) {
  require_three_channels(ycbcr, "ycbcr_to_rgb");
  static const auto inverse = invert(kForward);
  Tensor out(ycbcr.shape());
  const std::size_t n = ycbcr.plane_size();
  auto y = ycbcr.channel(0), cb = ycbcr.channel(1), cr = ycbcr.channel(2);
  for (int k = 0; k < 3; ++k) {
    auto dst = out.channel(k);
    const auto& m = inverse[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double a = 255.0 * y[i] - kOffset[0];
      const double b = 255.0 * cb[i] - kOffset[1];
      const double c = 255.0 * cr[i] - kOffset[2];
      dst[i] = static_cast<float>(m[0] * a + m[1] * b + m[2] * c);
    }
  }
  return out;
}

Tensor luminance(const Tensor& img) {
  if (img.channels() == 1) return img;
  const Tensor ycc = rgb_to_ycbcr(img);
  const int first[] = {0};
  return select_channels(ycc, first);
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("'" + dir.string() + "' is not a readable directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower_extension(entry.path());
    if (ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm" || ext == ".bmp") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

}  // namespace srlab
