#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "pairfeat/image.hpp"

namespace pairfeat {

struct InterestPoint {
  int x = 0;
  int y = 0;
  double score = 0.0;

  bool operator==(const InterestPoint&) const = default;
};

/// Window-summed gradient products; the symmetric 2x2 matrix
/// [[sxx, sxy], [sxy, syy]].
struct StructureMatrix {
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;

  /// Smaller eigenvalue, closed form. Clamped to 0 when rounding makes it
  /// slightly negative.
  double min_eigenvalue() const noexcept;
};

struct CornerConfig {
  int max_points = 15;
  int min_points_target = 10;
  double quality_ratio = 0.01;
  double min_distance = 10.0;
  int window_radius = 1;

  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;
};

/// A real-valued field with the same layout as GrayImage.
struct Field {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

struct GradientFields {
  Field ix;
  Field iy;
};

/// 3x3 Sobel derivatives with edge replication at the border.
GradientFields gradients(const GrayImage& img);

/// Per-pixel Shi-Tomasi score: min eigenvalue of the structure matrix summed
/// over a uniform (2r+1)x(2r+1) window. Gradients outside the image are
/// taken from the nearest border pixel.
Field score_field(const GrayImage& img, const CornerConfig& cfg);

/// Top-scoring points above quality_ratio * max score, greedily thinned to
/// min_distance and capped at max_points. Sorted by descending score, ties by
/// (y, x).
std::vector<InterestPoint> detect(const GrayImage& img, const CornerConfig& cfg);

/// Selection step of detect() on a precomputed score field.
std::vector<InterestPoint> select_corners(const Field& scores, const CornerConfig& cfg);

/// CSV with header "x,y,score".
void write_points_csv(const std::filesystem::path& path, std::span<const InterestPoint> points);
std::vector<InterestPoint> read_points_csv(const std::filesystem::path& path);

}  // namespace pairfeat
