#include "sample_archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "srlab/checkpoint.hpp"

namespace srlab::cli {
namespace {

constexpr char kMagic[4] = {'S', 'R', 'S', 'A'};

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

ArchiveHeader parse_header(const std::uint8_t* p, std::size_t n) {
  if (n < 4 || std::memcmp(p, kMagic, 4) != 0) throw FormatError("not a sample archive (bad magic)");
  if (n < kArchiveHeaderBytes) throw TruncatedError("sample archive header truncated");
  const std::uint32_t version = get_u32(p + 4);
  if (version != kArchiveVersion) {
    throw VersionError("sample archive version " + std::to_string(version) + " is not supported");
  }
  ArchiveHeader h;
  h.count = get_u64(p + 8);
  h.channels = get_u32(p + 16);
  h.f_sub = get_u32(p + 20);
  h.out = get_u32(p + 24);
  if (h.channels == 0 || h.f_sub == 0 || h.out == 0 || h.out > h.f_sub) {
    throw FormatError("sample archive header has an invalid geometry");
  }
  return h;
}

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open archive '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return bytes;
}

}  // namespace

std::vector<std::uint8_t> encode_archive(const std::vector<TrainSample>& samples) {
  if (samples.empty()) throw ShapeError("cannot write an empty sample archive");
  const Shape in_shape = samples.front().input.shape();
  const Shape out_shape = samples.front().target.shape();
  if (in_shape.height != in_shape.width || out_shape.height != out_shape.width ||
      in_shape.channels != out_shape.channels) {
    throw ShapeError("archive samples must be square with matching channels");
  }
  const std::size_t per = samples.front().input.size() + samples.front().target.size();
  std::vector<std::uint8_t> b;
  b.reserve(kArchiveHeaderBytes + samples.size() * per * 4);
  b.insert(b.end(), kMagic, kMagic + 4);
  put_u32(b, kArchiveVersion);
  put_u64(b, samples.size());
  put_u32(b, static_cast<std::uint32_t>(in_shape.channels));
  put_u32(b, static_cast<std::uint32_t>(in_shape.height));
  put_u32(b, static_cast<std::uint32_t>(out_shape.height));
  for (const auto& s : samples) {
    if (s.input.shape() != in_shape || s.target.shape() != out_shape) {
      throw ShapeError("archive samples differ in shape");
    }
    for (float v : s.input.data()) put_u32(b, std::bit_cast<std::uint32_t>(v));
    for (float v : s.target.data()) put_u32(b, std::bit_cast<std::uint32_t>(v));
  }
  return b;
}

std::vector<TrainSample> decode_archive(const std::vector<std::uint8_t>& bytes, ArchiveHeader* header) {
  const ArchiveHeader h = parse_header(bytes.data(), bytes.size());
  const int c = static_cast<int>(h.channels);
  const int f = static_cast<int>(h.f_sub);
  const int o = static_cast<int>(h.out);
  const std::size_t per = (static_cast<std::size_t>(c) * f * f + static_cast<std::size_t>(c) * o * o) * 4;
  const std::size_t payload = bytes.size() - kArchiveHeaderBytes;
  if (payload / per < h.count) {
    throw TruncatedError("sample archive holds " + std::to_string(payload / per) + " of " +
                         std::to_string(h.count) + " samples");
  }
  if (payload != h.count * per) throw FormatError("sample archive has trailing bytes");
  std::vector<TrainSample> samples;
  samples.reserve(h.count);
  const std::uint8_t* p = bytes.data() + kArchiveHeaderBytes;
  for (std::uint64_t i = 0; i < h.count; ++i) {
    TrainSample s{Tensor(c, f, f), Tensor(c, o, o)};
    for (float& v : s.input.data()) {
      v = std::bit_cast<float>(get_u32(p));
      p += 4;
    }
    for (float& v : s.target.data()) {
      v = std::bit_cast<float>(get_u32(p));
      p += 4;
    }
    samples.push_back(std::move(s));
  }
  if (header) *header = h;
  return samples;
}

void write_archive(const std::filesystem::path& path, const std::vector<TrainSample>& samples) {
  write_file_atomic(path, encode_archive(samples));
}

std::vector<TrainSample> read_archive(const std::filesystem::path& path, ArchiveHeader* header) {
  return decode_archive(read_all(path), header);
}

ArchiveHeader read_archive_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open archive '" + path.string() + "'");
  std::uint8_t buf[kArchiveHeaderBytes];
  in.read(reinterpret_cast<char*>(buf), sizeof buf);
  return parse_header(buf, static_cast<std::size_t>(in.gcount()));
}

}  // namespace srlab::cli
