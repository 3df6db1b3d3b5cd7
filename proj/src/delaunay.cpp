#include "pairfeat/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "pairfeat/error.hpp"

namespace pairfeat {

long double orient2d(const Point2& a, const Point2& b, const Point2& c) noexcept {
  const long double acx = static_cast<long double>(a.x) - c.x;
  const long double bcx = static_cast<long double>(b.x) - c.x;
  const long double acy = static_cast<long double>(a.y) - c.y;
  const long double bcy = static_cast<long double>(b.y) - c.y;
  return acx * bcy - acy * bcx;
}

long double in_circle(const Point2& a, const Point2& b, const Point2& c, const Point2& d,
                      long double* permanent) noexcept {
  const long double adx = static_cast<long double>(a.x) - d.x, ady = static_cast<long double>(a.y) - d.y;
  const long double bdx = static_cast<long double>(b.x) - d.x, bdy = static_cast<long double>(b.y) - d.y;
  const long double cdx = static_cast<long double>(c.x) - d.x, cdy = static_cast<long double>(c.y) - d.y;

  const long double alift = adx * adx + ady * ady;
  const long double blift = bdx * bdx + bdy * bdy;
  const long double clift = cdx * cdx + cdy * cdy;

  const long double bc = bdx * cdy - cdx * bdy;
  const long double ca = cdx * ady - adx * cdy;
  const long double ab = adx * bdy - bdx * ady;

  if (permanent) {
    *permanent = alift * (std::fabs(bdx * cdy) + std::fabs(cdx * bdy)) +
                 blift * (std::fabs(cdx * ady) + std::fabs(adx * cdy)) +
                 clift * (std::fabs(adx * bdy) + std::fabs(bdx * ady));
  }
  return alift * bc + blift * ca + clift * ab;
}

namespace {

constexpr int kGhost = -1;
constexpr long double kOrientTolerance = 1e-12L;

struct Tri {
  std::array<int, 3> v;
  bool alive = true;

  bool ghost() const noexcept { return v[2] == kGhost; }
};

class BowyerWatson {
 public:
  explicit BowyerWatson(std::span<const Point2> pts) : pts_(pts) {}

  void seed(int a, int b, int c) {
    if (orient(a, b, c) < 0) std::swap(b, c);
    add({a, b, c});
    add({b, a, kGhost});
    add({c, b, kGhost});
    add({a, c, kGhost});
  }

  void insert(int p) {
    const int start = locate(p);
    std::vector<int> cavity{start};
    std::set<int> in_cavity{start};
    std::deque<int> frontier{start};
    while (!frontier.empty()) {
      const int t = frontier.front();
      frontier.pop_front();
      for (int e = 0; e < 3; ++e) {
        const int u = tris_[t].v[e];
        const int v = tris_[t].v[(e + 1) % 3];
        const int nb = neighbor_across(v, u);
        if (nb < 0 || in_cavity.count(nb) || !conflicts(nb, p)) continue;
        in_cavity.insert(nb);
        cavity.push_back(nb);
        frontier.push_back(nb);
      }
    }

    std::vector<std::pair<int, int>> boundary;
    for (int t : cavity) {
      for (int e = 0; e < 3; ++e) {
        const int u = tris_[t].v[e];
        const int v = tris_[t].v[(e + 1) % 3];
        const int nb = neighbor_across(v, u);
        if (nb < 0 || !in_cavity.count(nb)) boundary.emplace_back(u, v);
      }
    }
    for (int t : cavity) retire(t);
    for (const auto& [u, v] : boundary) {
      // Rotate so a ghost vertex, if any, comes last.
      if (u == kGhost) {
        add({v, p, kGhost});
      } else if (v == kGhost) {
        add({p, u, kGhost});
      } else {
        add({u, v, p});
      }
    }
  }

  std::vector<std::array<int, 3>> real_triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (t.alive && !t.ghost()) out.push_back(t.v);
    }
    return out;
  }

 private:
  long double orient(int a, int b, int c) const {
    return orient2d(pts_[a], pts_[b], pts_[c]);
  }

  bool collinear(int a, int b, int c) const {
    const auto& pa = pts_[a];
    const auto& pb = pts_[b];
    const auto& pc = pts_[c];
    const long double scale = std::fabs((static_cast<long double>(pa.x) - pc.x) * (pb.y - pc.y)) +
                              std::fabs((static_cast<long double>(pa.y) - pc.y) * (pb.x - pc.x));
    return std::fabs(orient(a, b, c)) <= kOrientTolerance * scale;
  }

  bool strictly_between(int a, int b, int p) const {
    const auto& pa = pts_[a];
    const auto& pb = pts_[b];
    const auto& pp = pts_[p];
    const double t1 = (pp.x - pa.x) * (pb.x - pa.x) + (pp.y - pa.y) * (pb.y - pa.y);
    const double t2 = (pp.x - pb.x) * (pa.x - pb.x) + (pp.y - pb.y) * (pa.y - pb.y);
    return t1 > 0.0 && t2 > 0.0;
  }

  bool conflicts(int t, int p) const {
    const auto& v = tris_[t].v;
    if (tris_[t].ghost()) {
      if (collinear(v[0], v[1], p)) return strictly_between(v[0], v[1], p);
      return orient(v[0], v[1], p) > 0;
    }
    long double permanent = 0;
    const long double det = in_circle(pts_[v[0]], pts_[v[1]], pts_[v[2]], pts_[p], &permanent);
    return det > kInCircleTolerance * permanent;
  }

  // A triangle whose region contains p: a real triangle when p is inside the
  // hull, otherwise the ghost facing p.
  int locate(int p) const {
    int best_ghost = -1;
    long double best_orient = 0;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!tris_[t].alive) continue;
      const auto& v = tris_[t].v;
      if (tris_[t].ghost()) {
        const long double o = orient(v[0], v[1], p);
        if (best_ghost < 0 || o > best_orient) {
          best_ghost = t;
          best_orient = o;
        }
        continue;
      }
      if (orient(v[0], v[1], p) >= 0 && orient(v[1], v[2], p) >= 0 && orient(v[2], v[0], p) >= 0) {
        return t;
      }
    }
    return best_ghost;
  }

  int neighbor_across(int u, int v) const {
    const auto it = directed_.find({u, v});
    return it == directed_.end() ? -1 : it->second;
  }

  void add(std::array<int, 3> v) {
    const int id = static_cast<int>(tris_.size());
    tris_.push_back({v, true});
    for (int e = 0; e < 3; ++e) directed_[{v[e], v[(e + 1) % 3]}] = id;
  }

  void retire(int t) {
    tris_[t].alive = false;
    const auto& v = tris_[t].v;
    for (int e = 0; e < 3; ++e) {
      const auto it = directed_.find({v[e], v[(e + 1) % 3]});
      if (it != directed_.end() && it->second == t) directed_.erase(it);
    }
  }

  std::span<const Point2> pts_;
  std::vector<Tri> tris_;
  std::map<std::pair<int, int>, int> directed_;
};

}  // namespace

Triangulation delaunay(std::span<const Point2> points) {
  Triangulation out;
  out.points.assign(points.begin(), points.end());

  std::vector<int> order;
  {
    std::set<std::pair<double, double>> seen;
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
      if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y)) {
        throw Error(ErrorCode::InvalidArgument, "non-finite point coordinate");
      }
      if (seen.emplace(points[i].x, points[i].y).second) order.push_back(i);
    }
  }
  if (order.size() < 3) {
    throw Error(ErrorCode::TooFewPoints, "delaunay needs at least 3 distinct points");
  }

  BowyerWatson bw(points);
  std::size_t third = 0;
  for (std::size_t k = 2; k < order.size(); ++k) {
    const long double o = orient2d(points[order[0]], points[order[1]], points[order[k]]);
    const auto& a = points[order[0]];
    const auto& b = points[order[1]];
    const auto& c = points[order[k]];
    const long double scale = std::fabs((static_cast<long double>(a.x) - c.x) * (b.y - c.y)) +
                              std::fabs((static_cast<long double>(a.y) - c.y) * (b.x - c.x));
    if (std::fabs(o) > kOrientTolerance * scale) {
      third = k;
      break;
    }
  }
  if (third == 0) throw Error(ErrorCode::Collinear, "all points are collinear");

  bw.seed(order[0], order[1], order[third]);
  for (std::size_t k = 2; k < order.size(); ++k) {
    if (k != third) bw.insert(order[k]);
  }
  out.triangles = bw.real_triangles();
  out.edges = unique_edges(out);
  return out;
}

std::vector<Edge> unique_edges(const Triangulation& t) {
  std::vector<Edge> edges;
  edges.reserve(t.triangles.size() * 3);
  for (const auto& tri : t.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e];
      const int b = tri[(e + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace pairfeat
