#include "srlab/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <system_error>

namespace srlab {
namespace {

constexpr char kMagic[4] = {'S', 'R', 'C', 'N'};

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32s(const std::vector<float>& values) {
    for (float f : values) u32(std::bit_cast<std::uint32_t>(f));
  }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}
  std::uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b_[pos_++]) << (8 * i);
    return v;
  }
  void f32s(std::vector<float>& out) {
    need(out.size() * 4);
    for (float& f : out) f = std::bit_cast<float>(u32());
  }
  [[nodiscard]] std::size_t remaining() const { return b_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) {
      throw TruncatedError("checkpoint truncated at byte " + std::to_string(pos_) + " of " +
                           std::to_string(b_.size()));
    }
  }
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  check_network(ckpt.net);
  const auto& cfg = ckpt.net.config;
  Writer w;
  w.raw(kMagic, 4);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(cfg.channels));
  w.u32(static_cast<std::uint32_t>(cfg.layers.size()));
  for (const auto& l : cfg.layers) {
    w.u32(static_cast<std::uint32_t>(l.filter_size));
    w.u32(static_cast<std::uint32_t>(l.filters));
  }
  w.u8(ckpt.momentum ? 1 : 0);
  w.u64(ckpt.backprops);
  for (const auto& bank : ckpt.net.banks) {
    w.f32s(bank.weights);
    w.f32s(bank.biases);
  }
  if (ckpt.momentum) {
    const auto& m = *ckpt.momentum;
    if (m.weights.size() != ckpt.net.banks.size() || m.biases.size() != ckpt.net.banks.size()) {
      throw ConfigError("momentum buffers do not match the network");
    }
    for (std::size_t l = 0; l < ckpt.net.banks.size(); ++l) {
      if (m.weights[l].size() != ckpt.net.banks[l].weights.size() ||
          m.biases[l].size() != ckpt.net.banks[l].biases.size()) {
        throw ConfigError("momentum buffers do not match the network");
      }
      w.f32s(m.weights[l]);
      w.f32s(m.biases[l]);
    }
  }
  return w.take();
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4) throw TruncatedError("checkpoint shorter than its magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("not a checkpoint (bad magic)");
  Reader r(bytes);
  for (int i = 0; i < 4; ++i) r.u8();
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw VersionError("checkpoint version " + std::to_string(version) + ", expected " +
                       std::to_string(kCheckpointVersion));
  }
  NetworkConfig cfg;
  cfg.channels = static_cast<int>(r.u32());
  const std::uint32_t layers = r.u32();
  if (layers == 0 || layers > 64) throw FormatError("implausible layer count " + std::to_string(layers));
  for (std::uint32_t l = 0; l < layers; ++l) {
    LayerSpec spec;
    spec.filter_size = static_cast<int>(r.u32());
    spec.filters = static_cast<int>(r.u32());
    if (spec.filter_size > 1024 || spec.filters > (1 << 16)) throw FormatError("implausible layer shape");
    cfg.layers.push_back(spec);
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint holds an invalid config: ") + e.what());
  }
  const std::uint8_t flags = r.u8();
  if (flags & ~1u) throw FormatError("unknown checkpoint flags");
  Checkpoint ckpt;
  ckpt.backprops = r.u64();
  ckpt.net = zero_network<float>(cfg);
  for (auto& bank : ckpt.net.banks) {
    r.f32s(bank.weights);
    r.f32s(bank.biases);
  }
  if (flags & 1u) {
    MomentumState m = MomentumState::zeros_like(ckpt.net);
    for (std::size_t l = 0; l < ckpt.net.banks.size(); ++l) {
      r.f32s(m.weights[l]);
      r.f32s(m.biases[l]);
    }
    ckpt.momentum = std::move(m);
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after checkpoint payload");
  return ckpt;
}

void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("write failure on '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename onto '" + path.string() + "'");
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return decode_checkpoint(bytes);
}

}  // namespace srlab
