#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "pairfeat/patches.hpp"

namespace pairfeat {

using Edge = std::pair<int, int>;

struct Triangulation {
  std::vector<Point2> points;
  /// Counter-clockwise vertex triples (indices into points).
  std::vector<std::array<int, 3>> triangles;
  /// Unique undirected edges, lower index first, sorted.
  std::vector<Edge> edges;
};

/// Twice the signed area of (a, b, c); positive when counter-clockwise.
long double orient2d(const Point2& a, const Point2& b, const Point2& c) noexcept;

/// Positive when d lies inside the circumcircle of the counter-clockwise
/// triangle (a, b, c). `permanent` receives the sum of absolute term
/// magnitudes, the scale for relative tolerances.
long double in_circle(const Point2& a, const Point2& b, const Point2& c, const Point2& d,
                      long double* permanent = nullptr) noexcept;

inline constexpr long double kInCircleTolerance = 1e-9L;

/// Bowyer-Watson Delaunay triangulation, points inserted in input order.
/// Exactly repeated points are ignored after their first occurrence. Near-
/// cocircular configurations (|det| within tolerance) keep the existing
/// triangles. Throws TooFewPoints (< 3 distinct) or Collinear.
Triangulation delaunay(std::span<const Point2> points);

/// Each undirected edge of the triangles once, (i < j), lexicographic.
std::vector<Edge> unique_edges(const Triangulation& t);

}  // namespace pairfeat
