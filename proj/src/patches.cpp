#include "pairfeat/patches.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pairfeat/error.hpp"

namespace pairfeat {

void DescriptorSource::validate() const {
  if (kind == DescriptorKind::Imported) {
    if (import_path.empty()) {
      throw Error(ErrorCode::InvalidArgument, "imported descriptor source requires import_path");
    }
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "descriptor dim must be positive");
    return;
  }
  if (std::find(kBuiltinDims.begin(), kBuiltinDims.end(), dim) == kBuiltinDims.end()) {
    throw Error(ErrorCode::UnsupportedOption,
                "builtin descriptor dim must be one of 64, 128, 256, 1000 (got " + std::to_string(dim) + ")");
  }
}

GrayImage extract_patch(const GrayImage& img, int cx, int cy, int size) {
  GrayImage out(size, size);
  const int origin_x = cx - size / 2;
  const int origin_y = cy - size / 2;
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < size; ++i) out.at(i, j) = img.clamped(origin_x + i, origin_y + j);
  }
  return out;
}

std::vector<Patch> mesh_patches(const GrayImage& img, std::span<const InterestPoint> points,
                                const std::string& image_id) {
  std::vector<Patch> patches;
  patches.reserve(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    patches.push_back({image_id, static_cast<std::uint32_t>(k), p.x, p.y,
                       extract_patch(img, p.x, p.y, kPatchSize)});
  }
  return patches;
}

std::size_t orientation_bin(double gx, double gy) noexcept {
  constexpr double kBinWidth = 2.0 * std::numbers::pi / kOrientationBins;
  double angle = std::atan2(gy, gx);
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  const auto bin = static_cast<std::size_t>(std::floor(angle / kBinWidth + 0.5));
  return bin % kOrientationBins;
}

namespace {

constexpr double kVarianceFloor = 1e-8;

void scale_to_norm(std::span<double> v, double target) {
  const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  if (norm <= 0.0) return;
  for (double& x : v) x *= target / norm;
}

}  // namespace

std::vector<double> builtin_descriptor(const GrayImage& patch, std::size_t dim) {
  if (std::find(kBuiltinDims.begin(), kBuiltinDims.end(), dim) == kBuiltinDims.end()) {
    throw Error(ErrorCode::UnsupportedOption, "unsupported builtin descriptor dim " + std::to_string(dim));
  }
  if (patch.width() < 8 || patch.height() < 8) {
    throw Error(ErrorCode::ImageTooSmall, "descriptor patch must be at least 8x8");
  }
  const double part_norm = 1.0 / std::numbers::sqrt2;
  std::array<double, kDescriptorBlock> block{};

  // Intensity part: 8x8 grid of cells, z-scored. Equal-sized cells use raw
  // sums (z-scoring is scale-free) so integer offsets cancel exactly.
  const int w = patch.width();
  const int h = patch.height();
  const bool equal_cells = w % 8 == 0 && h % 8 == 0;
  for (int cy = 0; cy < 8; ++cy) {
    const int y0 = cy * h / 8, y1 = (cy + 1) * h / 8;
    for (int cx = 0; cx < 8; ++cx) {
      const int x0 = cx * w / 8, x1 = (cx + 1) * w / 8;
      double sum = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) sum += patch.at(x, y);
      }
      block[static_cast<std::size_t>(cy) * 8 + cx] = equal_cells ? sum : sum / ((y1 - y0) * (x1 - x0));
    }
  }
  const std::span<double> cells(block.data(), kIntensityCells);
  const double mean = std::accumulate(cells.begin(), cells.end(), 0.0) / kIntensityCells;
  double var = 0.0;
  for (double& c : cells) {
    c -= mean;
    var += c * c;
  }
  var /= kIntensityCells;
  // The floor is defined on cell means; sums carry an extra factor area^2.
  const double cell_area = static_cast<double>(w / 8) * (h / 8);
  const double floor = equal_cells ? kVarianceFloor * cell_area * cell_area : kVarianceFloor;
  if (var < floor) {
    std::fill(cells.begin(), cells.end(), 0.0);
  } else {
    const double inv_sd = 1.0 / std::sqrt(var);
    for (double& c : cells) c *= inv_sd;
    scale_to_norm(cells, part_norm);
  }

  // Orientation part: Sobel gradients inside the patch, replicated borders.
  const std::span<double> hist(block.data() + kIntensityCells, kOrientationBins);
  const auto g = gradients(patch);
  for (std::size_t i = 0; i < g.ix.values.size(); ++i) {
    const double gx = g.ix.values[i];
    const double gy = g.iy.values[i];
    const double mag = std::hypot(gx, gy);
    if (mag > 0.0) hist[orientation_bin(gx, gy)] += mag;
  }
  scale_to_norm(hist, part_norm);

  std::vector<double> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = block[i % kDescriptorBlock];
  return out;
}

FeatureRecord builtin_descriptor(const Patch& patch, std::size_t dim) {
  return {patch.image_id, patch.point_index,
          Point2{static_cast<double>(patch.cx), static_cast<double>(patch.cy)}, Origin::Original,
          builtin_descriptor(patch.pixels, dim)};
}

}  // namespace pairfeat
