#include "pairfeat/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "pairfeat/error.hpp"
#include "pairfeat/random.hpp"

namespace pairfeat {

void SyntheticConfig::validate() const {
  if (classes < 1 || images_per_class < 1) {
    throw Error(ErrorCode::InvalidArgument, "synthetic dataset needs at least one class and one image");
  }
  if (min_radius <= 0.0 || max_radius < min_radius) {
    throw Error(ErrorCode::InvalidArgument, "synthetic radius range is invalid");
  }
  const double span = 2.0 * (max_radius + 10.0);
  if (width < span || height < span) {
    throw Error(ErrorCode::ImageTooSmall, "synthetic canvas cannot hold the largest polygon");
  }
}

namespace {

struct Vertex {
  double x;
  double y;
};

bool inside_convex(const std::vector<Vertex>& poly, double px, double py) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    if ((b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x) < 0.0) return false;
  }
  return true;
}

}  // namespace

GrayImage synthetic_image(const SyntheticConfig& cfg, int label, int index) {
  cfg.validate();
  if (label < 0 || label >= cfg.classes) throw Error(ErrorCode::InvalidArgument, "synthetic label out of range");
  Rng rng(mix_seed(cfg.seed ^ mix_seed(static_cast<std::uint64_t>(label) * 1000003ULL +
                                       static_cast<std::uint64_t>(index))));
  constexpr double kPi = std::numbers::pi;

  const int sides = 3 + label;
  const double radius = cfg.min_radius + (cfg.max_radius - cfg.min_radius) * rng.uniform();
  const double margin = radius + 10.0;
  const double cx = margin + (cfg.width - 2.0 * margin) * rng.uniform();
  const double cy = margin + (cfg.height - 2.0 * margin) * rng.uniform();
  const double rotation = 2.0 * kPi * rng.uniform();

  // Vertices follow increasing angle, so interior points lie on the positive
  // side of every edge.
  std::vector<Vertex> poly;
  for (int k = 0; k < sides; ++k) {
    const double a = rotation + 2.0 * kPi * k / sides;
    poly.push_back({cx + radius * std::cos(a), cy + radius * std::sin(a)});
  }

  // Stripe texture: angle and period depend on the class, phase on the image.
  const double stripe_angle = kPi * label / cfg.classes;
  const double period = 9.0 + 3.0 * label;
  const double phase = 2.0 * kPi * rng.uniform();
  const double ux = std::cos(stripe_angle);
  const double uy = std::sin(stripe_angle);
  const double fill = 175.0 + 10.0 * rng.uniform();

  std::vector<double> pixels(static_cast<std::size_t>(cfg.width) * cfg.height);
  for (int y = 0; y < cfg.height; ++y) {
    for (int x = 0; x < cfg.width; ++x) {
      double v = cfg.background;
      if (inside_convex(poly, x, y)) {
        v = fill + 45.0 * std::sin(2.0 * kPi * (x * ux + y * uy) / period + phase);
      }
      v += cfg.noise_sigma * rng.normal();
      pixels[static_cast<std::size_t>(y) * cfg.width + x] = std::clamp(v, 0.0, 255.0);
    }
  }
  return GrayImage(cfg.width, cfg.height, std::move(pixels));
}

std::string synthetic_class_name(int label) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "class_%02d", label);
  return buf;
}

std::vector<std::filesystem::path> write_synthetic_dataset(const std::filesystem::path& root,
                                                           const SyntheticConfig& cfg) {
  cfg.validate();
  std::vector<std::filesystem::path> written;
  for (int c = 0; c < cfg.classes; ++c) {
    const auto dir = root / synthetic_class_name(c);
    std::filesystem::create_directories(dir);
    for (int i = 0; i < cfg.images_per_class; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "img_%03d.pgm", i);
      write_pgm(dir / name, synthetic_image(cfg, c, i));
      written.push_back(dir / name);
    }
  }
  return written;
}

GrayImage white_square_image(int size, int side, int x0, int y0) {
  if (side < 1 || x0 < 0 || y0 < 0 || x0 + side > size || y0 + side > size) {
    throw Error(ErrorCode::OutOfBounds, "square does not fit in the image");
  }
  GrayImage img(size, size, 0.0);
  for (int y = y0; y < y0 + side; ++y) {
    for (int x = x0; x < x0 + side; ++x) img.at(x, y) = 255.0;
  }
  return img;
}

}  // namespace pairfeat
