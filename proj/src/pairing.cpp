#include "pairfeat/pairing.hpp"

#include <algorithm>
#include <numeric>

#include "pairfeat/error.hpp"

namespace pairfeat {

std::string_view to_string(JoinMode mode) noexcept {
  switch (mode) {
    case JoinMode::Paired: return "paired";
    case JoinMode::NonPaired: return "non_paired";
    case JoinMode::Horizontal: return "horizontal";
  }
  return "unknown";
}

std::optional<JoinMode> parse_join_mode(std::string_view name) noexcept {
  if (name == "paired") return JoinMode::Paired;
  if (name == "non_paired") return JoinMode::NonPaired;
  if (name == "horizontal") return JoinMode::Horizontal;
  return std::nullopt;
}

Point2 midpoint(const Point2& a, const Point2& b) noexcept {
  return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
}

FeatureRecord pair_features(const FeatureRecord& a, const FeatureRecord& b) {
  if (a.vector.size() != b.vector.size()) {
    throw Error(ErrorCode::DimensionMismatch, "cannot pair descriptors of different dimension");
  }
  if (a.image_id != b.image_id) {
    throw Error(ErrorCode::CrossImagePairing, "cannot pair features of " + a.image_id + " and " + b.image_id);
  }
  FeatureRecord out;
  out.image_id = a.image_id;
  out.point_index = 0;
  out.point = midpoint(a.point, b.point);
  out.origin = Origin::Paired;
  out.vector.resize(a.vector.size());
  for (std::size_t i = 0; i < a.vector.size(); ++i) out.vector[i] = (a.vector[i] + b.vector[i]) / 2.0;
  return out;
}

std::vector<Edge> path_graph(std::span<const Point2> points) {
  if (points.size() < 2) return {};
  const auto [min_x, max_x] = std::minmax_element(points.begin(), points.end(),
                                                  [](const Point2& a, const Point2& b) { return a.x < b.x; });
  const auto [min_y, max_y] = std::minmax_element(points.begin(), points.end(),
                                                  [](const Point2& a, const Point2& b) { return a.y < b.y; });
  const bool along_x = (max_x->x - min_x->x) >= (max_y->y - min_y->y);

  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ka = along_x ? points[a].x : points[a].y;
    const double kb = along_x ? points[b].x : points[b].y;
    return ka < kb;
  });
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    edges.emplace_back(std::min(order[i], order[i + 1]), std::max(order[i], order[i + 1]));
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

PairGraph build_pair_graph(std::span<const Point2> points, bool fallback) {
  try {
    return {delaunay(points).edges, false};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooFewPoints && e.code() != ErrorCode::Collinear) throw;
  }
  return {fallback ? path_graph(points) : std::vector<Edge>{}, true};
}

JointFeatureMap build_joint_map(std::span<const FeatureRecord> records, std::span<const Edge> edges,
                                JoinMode mode, std::size_t horizontal_slots) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "joint map needs at least one record");
  const std::size_t dim = records.front().vector.size();
  for (const auto& r : records) {
    if (r.vector.size() != dim) throw Error(ErrorCode::DimensionMismatch, "records differ in dimension");
    if (r.image_id != records.front().image_id) {
      throw Error(ErrorCode::CrossImagePairing, "joint map records span several images");
    }
  }

  JointFeatureMap map;
  map.image_id = records.front().image_id;

  if (mode == JoinMode::Horizontal) {
    const std::size_t slots = std::max(horizontal_slots, records.size());
    if (horizontal_slots != 0 && records.size() > horizontal_slots) {
      throw Error(ErrorCode::CountMismatch, "more records than horizontal slots");
    }
    FeatureRecord row;
    row.image_id = map.image_id;
    row.point = records.front().point;
    row.vector.assign(slots * dim, 0.0);
    for (std::size_t k = 0; k < records.size(); ++k) {
      std::copy(records[k].vector.begin(), records[k].vector.end(), row.vector.begin() + k * dim);
    }
    map.dim = slots * dim;
    map.rows.push_back(std::move(row));
    return map;
  }

  map.dim = dim;
  map.rows.assign(records.begin(), records.end());
  if (mode == JoinMode::NonPaired) return map;

  std::vector<Edge> sorted(edges.begin(), edges.end());
  std::sort(sorted.begin(), sorted.end());
  const int n = static_cast<int>(records.size());
  for (const auto& [i, j] : sorted) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw Error(ErrorCode::CountMismatch, "edge refers to a point without a record");
    }
    auto row = pair_features(records[i], records[j]);
    row.point_index = static_cast<std::uint32_t>(map.rows.size());
    map.rows.push_back(std::move(row));
  }
  return map;
}

JointFeatureMap build_joint_map(std::span<const FeatureRecord> records, const Triangulation& tri,
                                JoinMode mode, std::size_t horizontal_slots) {
  if (records.size() != tri.points.size()) {
    throw Error(ErrorCode::CountMismatch, "record count " + std::to_string(records.size()) +
                                              " does not match triangulation point count " +
                                              std::to_string(tri.points.size()));
  }
  return build_joint_map(records, tri.edges, mode, horizontal_slots);
}

}  // namespace pairfeat
