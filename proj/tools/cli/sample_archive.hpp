#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "srlab/train.hpp"

namespace srlab::cli {

/// Binary training set. Little endian throughout:
///
///   "SRSA"  u32 version  u64 count  u32 channels  u32 f_sub  u32 out
///   count x { f32[channels * f_sub * f_sub] input, f32[channels * out * out] target }
struct ArchiveHeader {
  std::uint64_t count = 0;
  std::uint32_t channels = 0;
  std::uint32_t f_sub = 0;
  std::uint32_t out = 0;

  friend bool operator==(const ArchiveHeader&, const ArchiveHeader&) = default;
};

inline constexpr std::uint32_t kArchiveVersion = 1;
inline constexpr std::size_t kArchiveHeaderBytes = 28;

/// Throws ShapeError if the samples do not share one geometry.
std::vector<std::uint8_t> encode_archive(const std::vector<TrainSample>& samples);
std::vector<TrainSample> decode_archive(const std::vector<std::uint8_t>& bytes, ArchiveHeader* header = nullptr);

/// Atomic: the file appears complete or not at all.
void write_archive(const std::filesystem::path& path, const std::vector<TrainSample>& samples);
std::vector<TrainSample> read_archive(const std::filesystem::path& path, ArchiveHeader* header = nullptr);
ArchiveHeader read_archive_header(const std::filesystem::path& path);

}  // namespace srlab::cli
