#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pairfeat/patches.hpp"

namespace pairfeat {

// PFV1 (little-endian):
//   "PFV1" | u32 dim | u32 count |
//   count x { u32 id_len | id bytes (UTF-8) | u32 point_index | f64 x | f64 y | dim x f32 }
// PFV2 is identical except for the magic "PFV2" and one u8 origin
// (0 = original, 1 = paired) written directly after point_index.
//
// Vectors are stored as f32; writers round, readers widen exactly.

enum class FeatureFormat { Pfv1, Pfv2 };

struct FeatureFile {
  FeatureFormat format = FeatureFormat::Pfv1;
  std::uint32_t dim = 0;
  std::vector<FeatureRecord> records;
};

std::vector<unsigned char> encode_features(std::span<const FeatureRecord> records, std::uint32_t dim,
                                           FeatureFormat format = FeatureFormat::Pfv1);
FeatureFile decode_features(std::span<const unsigned char> bytes);

void write_features(const std::filesystem::path& path, std::span<const FeatureRecord> records,
                    std::uint32_t dim, FeatureFormat format = FeatureFormat::Pfv1);
FeatureFile read_features(const std::filesystem::path& path);

using FeatureKey = std::pair<std::string, std::uint32_t>;

/// Reads a PFV1 file and returns exactly one record per expected key, in
/// the order of `expected`. Fails on missing or duplicated keys and when the
/// stored dim differs from `expected_dim`.
std::vector<FeatureRecord> import_features(const std::filesystem::path& path,
                                           std::span<const FeatureKey> expected,
                                           std::size_t expected_dim = kImportedDim);

}  // namespace pairfeat
