#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pairfeat/corners.hpp"
#include "pairfeat/image.hpp"

namespace pairfeat {

inline constexpr int kPatchSize = 40;

/// 40x40 block centred on an interest point. The centre pixel sits at
/// (kPatchSize / 2, kPatchSize / 2) inside the block.
struct Patch {
  std::string image_id;
  std::uint32_t point_index = 0;
  int cx = 0;
  int cy = 0;
  GrayImage pixels;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

enum class Origin : std::uint8_t { Original = 0, Paired = 1 };

struct FeatureRecord {
  std::string image_id;
  std::uint32_t point_index = 0;
  Point2 point;
  Origin origin = Origin::Original;
  std::vector<double> vector;
};

enum class DescriptorKind { Builtin, Imported };

struct DescriptorSource {
  DescriptorKind kind = DescriptorKind::Builtin;
  std::size_t dim = 128;
  std::string import_path;

  void validate() const;
};

inline constexpr std::size_t kImportedDim = 1000;

/// One edge-replicated patch per point, in input order. Works for patches of
/// any size; mesh_patches() fixes the size at 40.
std::vector<Patch> mesh_patches(const GrayImage& img, std::span<const InterestPoint> points,
                                const std::string& image_id = {});
GrayImage extract_patch(const GrayImage& img, int cx, int cy, int size);

inline constexpr std::size_t kIntensityCells = 64;
inline constexpr std::size_t kOrientationBins = 16;
inline constexpr std::size_t kDescriptorBlock = kIntensityCells + kOrientationBins;
inline constexpr std::array<std::size_t, 4> kBuiltinDims = {64, 128, 256, 1000};

/// Handcrafted 80-value block: 8x8 mean-pooled intensities (z-scored) and a
/// 16-bin magnitude-weighted gradient orientation histogram, each part scaled
/// to L2 norm 1/sqrt(2). The block is tiled cyclically to fill `dim`.
std::vector<double> builtin_descriptor(const GrayImage& patch, std::size_t dim);
FeatureRecord builtin_descriptor(const Patch& patch, std::size_t dim);

/// Orientation bin index of a gradient. Bin k is centred on k * 22.5 degrees.
std::size_t orientation_bin(double gx, double gy) noexcept;

}  // namespace pairfeat
