#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pairfeat/delaunay.hpp"
#include "pairfeat/patches.hpp"

namespace pairfeat {

enum class JoinMode {
  /// Originals followed by one averaged row per Delaunay edge.
  Paired,
  /// Originals only, one row per point.
  NonPaired,
  /// Originals concatenated into a single wide row (zero-padded to a fixed
  /// slot count so every image has the same width).
  Horizontal,
};

std::string_view to_string(JoinMode mode) noexcept;
std::optional<JoinMode> parse_join_mode(std::string_view name) noexcept;

struct JointFeatureMap {
  std::string image_id;
  std::size_t dim = 0;
  std::vector<FeatureRecord> rows;
};

Point2 midpoint(const Point2& a, const Point2& b) noexcept;

/// Element-wise mean of two descriptors placed at the midpoint of their points.
FeatureRecord pair_features(const FeatureRecord& a, const FeatureRecord& b);

/// Edge set used for pairing one image's points.
struct PairGraph {
  std::vector<Edge> edges;
  /// True when triangulation failed and the edges come from the fallback.
  bool degenerate = false;
};

/// Delaunay edges of the points. When triangulation is impossible (fewer
/// than three distinct or collinear points) and `fallback` is set, the points
/// are chained along their dominant axis instead; otherwise the edge set is
/// empty.
PairGraph build_pair_graph(std::span<const Point2> points, bool fallback = true);

/// Path graph through the points sorted along the axis of larger extent.
std::vector<Edge> path_graph(std::span<const Point2> points);

/// Joint map of one image's original records. `horizontal_slots` sets the
/// number of D-wide slots of the horizontal row (>= records.size()).
JointFeatureMap build_joint_map(std::span<const FeatureRecord> records, std::span<const Edge> edges,
                                JoinMode mode, std::size_t horizontal_slots = 0);
JointFeatureMap build_joint_map(std::span<const FeatureRecord> records, const Triangulation& tri,
                                JoinMode mode, std::size_t horizontal_slots = 0);

}  // namespace pairfeat
