#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "srlab/model.hpp"

namespace srlab {

/// Momentum buffers (the Delta terms of the update), congruent to the parameters.
using MomentumState = NetworkGradients<float>;

struct Checkpoint {
  Network net;
  std::optional<MomentumState> momentum;
  std::uint64_t backprops = 0;

  friend bool operator==(const Checkpoint& a, const Checkpoint& b) {
    if (!(a.net == b.net) || a.backprops != b.backprops) return false;
    if (a.momentum.has_value() != b.momentum.has_value()) return false;
    return !a.momentum || (a.momentum->weights == b.momentum->weights &&
                           a.momentum->biases == b.momentum->biases);
  }
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, all little-endian:
///   "SRCN" | version u32 | channels u32 | layer count u32 | (f u32, n u32) per layer |
///   flags u8 (bit0 = momentum) | backprops u64 |
///   per layer: weights f32[], biases f32[] | then the same for momentum if flagged.
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

/// Writes to a temporary sibling and renames it over `path`.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Writes `bytes` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace srlab
