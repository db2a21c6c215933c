#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "temp_dir.hpp"
#include "srlab/image_io.hpp"

using namespace srlab;
namespace fs = std::filesystem;
using srlab::testing::TempDir;

namespace {

ImageU8 random_image(int c, int h, int w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ImageU8 img(c, h, w);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(rng() & 0xff);
  return img;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("save/load round trips bit-exactly") {
  TempDir dir;
  const auto rgb = random_image(3, 17, 23, 1);
  const auto gray = random_image(1, 9, 4, 2);
  for (const char* name : {"a.png", "a.ppm"}) {
    save_image(dir.path / name, rgb);
    CHECK(load_image(dir.path / name) == rgb);
  }
  for (const char* name : {"g.png", "g.pgm"}) {
    save_image(dir.path / name, gray);
    CHECK(load_image(dir.path / name) == gray);
  }
}

TEST_CASE("1x1 PGM with value 128") {
  TempDir dir;
  write_bytes(dir.path / "one.pgm", std::string("P5\n# comment\n1 1\n255\n") + static_cast<char>(128));
  const auto img = load_image(dir.path / "one.pgm");
  CHECK(img.channels == 1);
  CHECK(img.height == 1);
  CHECK(img.width == 1);
  CHECK(img.data[0] == 128);
}

TEST_CASE("distinct load errors") {
  TempDir dir;
  write_bytes(dir.path / "bad.png", "GIF89a not an image");
  CHECK_THROWS_AS(load_image(dir.path / "bad.png"), FormatError);
  write_bytes(dir.path / "empty.pgm", "");
  CHECK_THROWS_AS(load_image(dir.path / "empty.pgm"), TruncatedError);
  write_bytes(dir.path / "short.pgm", "P5\n4 4\n255\nabc");
  CHECK_THROWS_AS(load_image(dir.path / "short.pgm"), TruncatedError);
  write_bytes(dir.path / "head.ppm", "P6\n4 ");
  CHECK_THROWS_AS(load_image(dir.path / "head.ppm"), TruncatedError);
  write_bytes(dir.path / "deep.pgm", "P5\n1 1\n65535\nab");
  CHECK_THROWS_AS(load_image(dir.path / "deep.pgm"), FormatError);
  CHECK_THROWS_AS(load_image(dir.path / "missing.png"), IoError);

  save_image(dir.path / "full.png", random_image(3, 40, 40, 3));
  const auto bytes = read_bytes(dir.path / "full.png");
  write_bytes(dir.path / "cut.png", bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(load_image(dir.path / "cut.png"), TruncatedError);
  write_bytes(dir.path / "cut_header.png", bytes.substr(0, 12));
  CHECK_THROWS_AS(load_image(dir.path / "cut_header.png"), FormatError);
}

TEST_CASE("save errors") {
  TempDir dir;
  CHECK_THROWS_AS(save_image(dir.path / "x.jpg", random_image(3, 2, 2, 1)), FormatError);
  CHECK_THROWS_AS(save_image(dir.path / "x.pgm", random_image(3, 2, 2, 1)), ConfigError);
  CHECK_THROWS_AS(save_image(dir.path / "no" / "such" / "x.png", random_image(3, 2, 2, 1)), IoError);
}

TEST_CASE("BMP input") {
  TempDir dir;
  // 2x2 24-bit bottom-up BMP; rows padded to 4 bytes.
  std::string px;
  auto le32 = [](std::uint32_t v) {
    std::string s(4, '\0');
    for (int i = 0; i < 4; ++i) s[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    return s;
  };
  auto le16 = [](std::uint16_t v) { return std::string{static_cast<char>(v & 0xff), static_cast<char>(v >> 8)}; };
  // Bottom row first: (B,G,R) pixels.
  px += std::string("\x03\x02\x01\x06\x05\x04", 6) + std::string(2, '\0');
  px += std::string("\x09\x08\x07\x0c\x0b\x0a", 6) + std::string(2, '\0');
  std::string info = le32(40) + le32(2) + le32(2) + le16(1) + le16(24) + le32(0) + le32(px.size()) +
                     le32(2835) + le32(2835) + le32(0) + le32(0);
  std::string file = "BM" + le32(14 + 40 + px.size()) + le32(0) + le32(54) + info + px;
  write_bytes(dir.path / "t.bmp", file);
  const auto img = load_image(dir.path / "t.bmp");
  REQUIRE(img.channels == 3);
  CHECK(img.at(0, 0, 0) == 7);
  CHECK(img.at(0, 0, 2) == 9);
  CHECK(img.at(1, 0, 0) == 1);
  CHECK(img.at(1, 1, 2) == 6);
  write_bytes(dir.path / "short.bmp", file.substr(0, 60));
  CHECK_THROWS_AS(load_image(dir.path / "short.bmp"), TruncatedError);
}

TEST_CASE("to_float / to_u8") {
  ImageU8 img(1, 1, 3);
  img.data = {0, 128, 255};
  const auto t = to_float(img);
  CHECK(t.at(0, 0, 2) == 1.0f);
  CHECK(to_u8(t) == img);
  Tensor v(1, 1, 4, std::vector<float>{1.7f, 0.5f, -0.2f, 127.5f / 255.0f});
  const auto q = to_u8(v);
  CHECK(q.data[0] == 255);
  CHECK(q.data[1] == 128);
  CHECK(q.data[2] == 0);
  CHECK(q.data[3] == 128);

  ImageU8 all(1, 16, 16);
  for (int i = 0; i < 256; ++i) all.data[i] = static_cast<std::uint8_t>(i);
  CHECK(to_u8(to_float(all)) == all);
}

TEST_CASE("rgb_to_ycbcr constants") {
  Tensor white(3, 1, 1, 1.0f);
  const auto w = rgb_to_ycbcr(white);
  CHECK(w.at(0, 0, 0) == doctest::Approx(235.0 / 255.0).epsilon(1e-7));
  CHECK(w.at(1, 0, 0) == doctest::Approx(128.0 / 255.0).epsilon(1e-7));
  CHECK(w.at(2, 0, 0) == doctest::Approx(128.0 / 255.0).epsilon(1e-7));
  const auto k = rgb_to_ycbcr(Tensor(3, 1, 1, 0.0f));
  CHECK(k.at(0, 0, 0) == doctest::Approx(16.0 / 255.0).epsilon(1e-7));
  CHECK(k.at(1, 0, 0) == doctest::Approx(128.0 / 255.0).epsilon(1e-7));
  CHECK(k.at(2, 0, 0) == doctest::Approx(128.0 / 255.0).epsilon(1e-7));
  // Pure red, checked against the published coefficients.
  Tensor red(3, 1, 1, std::vector<float>{1, 0, 0});
  const auto r = rgb_to_ycbcr(red);
  CHECK(r.at(0, 0, 0) == doctest::Approx((16 + 65.481) / 255.0).epsilon(1e-7));
  CHECK(r.at(1, 0, 0) == doctest::Approx((128 - 37.797) / 255.0).epsilon(1e-7));
  CHECK(r.at(2, 0, 0) == doctest::Approx((128 + 112.0) / 255.0).epsilon(1e-7));
  CHECK_THROWS_AS(rgb_to_ycbcr(Tensor(1, 2, 2)), ConfigError);
  CHECK_THROWS_AS(ycbcr_to_rgb(Tensor(2, 2, 2)), ConfigError);
}

TEST_CASE("color round trip") {
  std::mt19937_64 rng(8);
  const auto rgb = oracle::random_tensor<float>(3, 20, 20, rng, 0.0, 1.0);
  const auto back = ycbcr_to_rgb(rgb_to_ycbcr(rgb));
  double worst = 0.0;
  for (std::size_t i = 0; i < rgb.size(); ++i) worst = std::max(worst, std::abs(double(back.data()[i]) - rgb.data()[i]));
  CHECK(worst < 1e-6);

  const auto img = random_image(3, 20, 20, 9);
  const auto q = to_u8(ycbcr_to_rgb(to_float(to_u8(rgb_to_ycbcr(to_float(img))))));
  int levels = 0;
  for (std::size_t i = 0; i < img.data.size(); ++i) levels = std::max(levels, std::abs(int(q.data[i]) - int(img.data[i])));
  CHECK(levels <= 1);
}

TEST_CASE("luminance") {
  Tensor gray(1, 2, 2, 0.3f);
  CHECK(luminance(gray) == gray);
  Tensor rgb(3, 2, 2, 1.0f);
  const auto y = luminance(rgb);
  CHECK(y.channels() == 1);
  CHECK(y.at(0, 1, 1) == doctest::Approx(235.0 / 255.0));
}

TEST_CASE("list_images is sorted and filtered") {
  TempDir dir;
  for (const char* n : {"b.png", "a.PPM", "c.txt", "d.bmp"}) write_bytes(dir.path / n, "x");
  const auto files = list_images(dir.path);
  REQUIRE(files.size() == 3);
  CHECK(files[0].filename() == "a.PPM");
  CHECK(files[1].filename() == "b.png");
  CHECK(files[2].filename() == "d.bmp");
  CHECK_THROWS_AS(list_images(dir.path / "nope"), IoError);
}
