#include "pairfeat/corners.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "pairfeat/error.hpp"

namespace pairfeat {

double StructureMatrix::min_eigenvalue() const noexcept {
  const double half_trace = 0.5 * (sxx + syy);
  const double half_diff = 0.5 * (sxx - syy);
  const double s = half_trace - std::sqrt(half_diff * half_diff + sxy * sxy);
  return s > 0.0 ? s : 0.0;
}

void CornerConfig::validate() const {
  if (!(quality_ratio > 0.0 && quality_ratio < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "corner quality_ratio must lie in (0, 1)");
  }
  if (min_points_target < 1 || max_points < min_points_target) {
    throw Error(ErrorCode::InvalidArgument, "corner config requires max_points >= min_points_target >= 1");
  }
  if (window_radius < 0) throw Error(ErrorCode::InvalidArgument, "window_radius must be >= 0");
  if (!(min_distance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "min_distance must be >= 0");
}

GradientFields gradients(const GrayImage& img) {
  if (img.width() < 3 || img.height() < 3) {
    throw Error(ErrorCode::ImageTooSmall, "gradients need an image of at least 3x3");
  }
  const int w = img.width();
  const int h = img.height();
  GradientFields g{{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)},
                   {w, h, std::vector<double>(static_cast<std::size_t>(w) * h)}};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double tl = img.clamped(x - 1, y - 1), tc = img.clamped(x, y - 1), tr = img.clamped(x + 1, y - 1);
      const double ml = img.clamped(x - 1, y), mr = img.clamped(x + 1, y);
      const double bl = img.clamped(x - 1, y + 1), bc = img.clamped(x, y + 1), br = img.clamped(x + 1, y + 1);
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      g.ix.values[i] = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
      g.iy.values[i] = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
    }
  }
  return g;
}

namespace {

// Separable box sum with clamped (replicated) borders.
Field box_sum(const Field& in, int radius) {
  const int w = in.width;
  const int h = in.height;
  Field rows{w, h, std::vector<double>(in.values.size())};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) acc += in.at(std::clamp(x + d, 0, w - 1), y);
      rows.values[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  Field out{w, h, std::vector<double>(in.values.size())};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) acc += rows.at(x, std::clamp(y + d, 0, h - 1));
      out.values[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  return out;
}

}  // namespace

Field score_field(const GrayImage& img, const CornerConfig& cfg) {
  cfg.validate();
  const int min_side = 2 * cfg.window_radius + 3;
  if (img.width() < min_side || img.height() < min_side) {
    throw Error(ErrorCode::ImageTooSmall, "image too small for the corner window");
  }
  const auto g = gradients(img);
  const std::size_t n = g.ix.values.size();
  Field xx{img.width(), img.height(), std::vector<double>(n)};
  Field xy = xx;
  Field yy = xx;
  for (std::size_t i = 0; i < n; ++i) {
    const double gx = g.ix.values[i];
    const double gy = g.iy.values[i];
    xx.values[i] = gx * gx;
    xy.values[i] = gx * gy;
    yy.values[i] = gy * gy;
  }
  const Field sxx = box_sum(xx, cfg.window_radius);
  const Field sxy = box_sum(xy, cfg.window_radius);
  const Field syy = box_sum(yy, cfg.window_radius);

  Field scores{img.width(), img.height(), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    scores.values[i] = StructureMatrix{sxx.values[i], sxy.values[i], syy.values[i]}.min_eigenvalue();
  }
  return scores;
}

std::vector<InterestPoint> select_corners(const Field& scores, const CornerConfig& cfg) {
  cfg.validate();
  const double max_score =
      scores.values.empty() ? 0.0 : *std::max_element(scores.values.begin(), scores.values.end());
  if (!(max_score > 0.0)) return {};
  const double threshold = cfg.quality_ratio * max_score;

  std::vector<InterestPoint> candidates;
  for (int y = 0; y < scores.height; ++y) {
    for (int x = 0; x < scores.width; ++x) {
      const double s = scores.at(x, y);
      if (s > 0.0 && s >= threshold) candidates.push_back({x, y, s});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const InterestPoint& a, const InterestPoint& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });

  const double min_d2 = cfg.min_distance * cfg.min_distance;
  std::vector<InterestPoint> picked;
  for (const auto& c : candidates) {
    if (static_cast<int>(picked.size()) >= cfg.max_points) break;
    const bool clear = std::none_of(picked.begin(), picked.end(), [&](const InterestPoint& p) {
      const double dx = p.x - c.x;
      const double dy = p.y - c.y;
      return dx * dx + dy * dy < min_d2;
    });
    if (clear) picked.push_back(c);
  }
  return picked;
}

std::vector<InterestPoint> detect(const GrayImage& img, const CornerConfig& cfg) {
  return select_corners(score_field(img, cfg), cfg);
}

void write_points_csv(const std::filesystem::path& path, std::span<const InterestPoint> points) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  out << "x,y,score\n";
  out.precision(17);
  for (const auto& p : points) out << p.x << ',' << p.y << ',' << p.score << '\n';
}

std::vector<InterestPoint> read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,y", 0) != 0) {
    throw Error(ErrorCode::CorruptHeader, "corner CSV lacks the x,y,score header: " + path.string());
  }
  std::vector<InterestPoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    InterestPoint p;
    char c1 = 0, c2 = 0;
    if (!(row >> p.x >> c1 >> p.y >> c2 >> p.score) || c1 != ',' || c2 != ',') {
      throw Error(ErrorCode::CorruptHeader, "malformed corner CSV row in " + path.string());
    }
    points.push_back(p);
  }
  return points;
}

}  // namespace pairfeat
