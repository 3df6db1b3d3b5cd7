#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "pairfeat/delaunay.hpp"
#include "pairfeat/error.hpp"
#include "pairfeat/random.hpp"

using namespace pairfeat;

namespace {

std::set<std::array<int, 3>> sorted_triangles(const Triangulation& t) {
  std::set<std::array<int, 3>> out;
  for (auto tri : t.triangles) {
    std::sort(tri.begin(), tri.end());
    out.insert(tri);
  }
  return out;
}

std::vector<Point2> random_points(Rng& rng, std::size_t n, double extent) {
  std::vector<Point2> pts(n);
  for (auto& p : pts) p = {rng.uniform() * extent, rng.uniform() * extent};
  return pts;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected pairfeat::Error";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Predicates, SignConventions) {
  EXPECT_GT(orient2d({0, 0}, {1, 0}, {0, 1}), 0);
  EXPECT_LT(orient2d({0, 0}, {0, 1}, {1, 0}), 0);
  EXPECT_EQ(orient2d({0, 0}, {1, 1}, {2, 2}), 0);
  EXPECT_GT(in_circle({0, 0}, {2, 0}, {0, 2}, {1, 1}), 0);
  EXPECT_LT(in_circle({0, 0}, {2, 0}, {0, 2}, {5, 5}), 0);
  long double perm = 0;
  EXPECT_EQ(in_circle({0, 0}, {2, 0}, {0, 2}, {2, 2}, &perm), 0);
  EXPECT_GT(perm, 0);
}

TEST(Delaunay, SingleTriangle) {
  const std::vector<Point2> pts = {{0, 0}, {1, 0}, {0, 1}};
  const auto t = delaunay(pts);
  ASSERT_EQ(t.triangles.size(), 1u);
  EXPECT_EQ(t.edges, (std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}}));
  EXPECT_GT(orient2d(pts[t.triangles[0][0]], pts[t.triangles[0][1]], pts[t.triangles[0][2]]), 0);
}

TEST(Delaunay, FourPointsMatchBruteForce) {
  const std::vector<Point2> pts = {{0, 0}, {4, 0}, {0, 4}, {1, 1}};
  const auto t = delaunay(pts);
  const auto expected = oracle::brute_force_delaunay(pts);
  EXPECT_EQ(sorted_triangles(t), expected);
  ASSERT_EQ(t.triangles.size(), 3u);
  for (const auto& tri : t.triangles) EXPECT_NE(std::find(tri.begin(), tri.end(), 3), tri.end());
  ASSERT_EQ(t.edges.size(), 6u);

  std::map<Edge, int> uses;
  for (const auto& tri : t.triangles)
    for (int e = 0; e < 3; ++e) ++uses[{std::min(tri[e], tri[(e + 1) % 3]), std::max(tri[e], tri[(e + 1) % 3])}];
  int interior = 0, hull = 0;
  for (const auto& [edge, n] : uses) (n == 2 ? interior : hull) += 1;
  EXPECT_EQ(interior, 3);
  EXPECT_EQ(hull, 3);
}

TEST(Delaunay, TwentyFivePointsPassOracle) {
  Rng rng(25);
  const auto pts = random_points(rng, 25, 100.0);
  const auto t = delaunay(pts);
  const auto check = oracle::check_triangulation(pts, t);
  EXPECT_TRUE(check.ccw);
  EXPECT_TRUE(check.empty_circles) << check.detail;
  EXPECT_TRUE(check.euler) << check.detail;
  EXPECT_LE(t.edges.size(), 69u);
}

TEST(Delaunay, RandomSetsSatisfyInvariants) {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + rng.below(48);
    const auto pts = random_points(rng, n, trial % 2 ? 1.0 : 480.0);
    const auto t = delaunay(pts);
    const auto check = oracle::check_triangulation(pts, t);
    ASSERT_TRUE(check.ccw) << "trial " << trial;
    ASSERT_TRUE(check.empty_circles) << "trial " << trial << ": " << check.detail;
    ASSERT_TRUE(check.euler) << "trial " << trial << ": " << check.detail;
    ASSERT_TRUE(check.edges_consistent) << "trial " << trial;
    EXPECT_EQ(t.edges, unique_edges(t));
  }
}

TEST(Delaunay, IntegerGridWithCocircularPoints) {
  // Pixel coordinates are integers, so four-on-a-circle is common.
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point2> pts;
    const std::size_t n = 4 + rng.below(30);
    for (std::size_t i = 0; i < n; ++i) pts.push_back({static_cast<double>(rng.below(12)), static_cast<double>(rng.below(12))});
    Triangulation t;
    try {
      t = delaunay(pts);
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::Collinear || e.code() == ErrorCode::TooFewPoints);
      continue;
    }
    const auto check = oracle::check_triangulation(pts, t);
    ASSERT_TRUE(check.ccw) << trial;
    ASSERT_TRUE(check.empty_circles) << trial << ": " << check.detail;
    ASSERT_TRUE(check.euler) << trial << ": " << check.detail;
  }
}

TEST(Delaunay, DuplicatesAreIgnored) {
  const std::vector<Point2> pts = {{0, 0}, {1, 0}, {1, 0}, {0, 1}};
  const auto t = delaunay(pts);
  ASSERT_EQ(t.triangles.size(), 1u);
  EXPECT_EQ(t.points.size(), 4u);
  EXPECT_EQ(t.edges, (std::vector<Edge>{{0, 1}, {0, 3}, {1, 3}}));
}

TEST(Delaunay, PermutationKeepsEdgeGeometry) {
  Rng rng(11);
  const auto pts = random_points(rng, 30, 200.0);
  std::vector<int> perm(pts.size());
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<int>(perm));
  std::vector<Point2> shuffled;
  for (int i : perm) shuffled.push_back(pts[i]);

  auto geometric = [](const std::vector<Point2>& p, const Triangulation& t) {
    std::set<std::pair<std::pair<double, double>, std::pair<double, double>>> out;
    for (const auto& [i, j] : t.edges) {
      auto a = std::pair(p[i].x, p[i].y), b = std::pair(p[j].x, p[j].y);
      out.insert({std::min(a, b), std::max(a, b)});
    }
    return out;
  };
  EXPECT_EQ(geometric(pts, delaunay(pts)), geometric(shuffled, delaunay(shuffled)));
}

TEST(Delaunay, Errors) {
  EXPECT_EQ(code_of([] { delaunay(std::vector<Point2>{{0, 0}, {1, 1}}); }), ErrorCode::TooFewPoints);
  EXPECT_EQ(code_of([] { delaunay(std::vector<Point2>{{0, 0}, {1, 1}, {1, 1}, {0, 0}}); }), ErrorCode::TooFewPoints);
  EXPECT_EQ(code_of([] { delaunay(std::vector<Point2>{{0, 0}, {1, 1}, {2, 2}, {5, 5}}); }), ErrorCode::Collinear);
  EXPECT_EQ(code_of([] { delaunay(std::vector<Point2>{{0, 0}, {1, 0}, {0, std::nan("")}}); }),
            ErrorCode::InvalidArgument);
}

TEST(UniqueEdges, SharedEdgeListedOnce) {
  Triangulation t;
  t.points = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  t.triangles = {{0, 1, 2}, {1, 3, 2}};
  EXPECT_EQ(unique_edges(t), (std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}}));
}
