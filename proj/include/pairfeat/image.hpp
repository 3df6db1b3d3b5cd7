#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace pairfeat {

/// Row-major grayscale raster. Intensities are kept as doubles in [0, 255]
/// so filtering stages never re-quantize.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  GrayImage(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  double at(int x, int y) const { return data_[index(x, y)]; }
  double& at(int x, int y) { return data_[index(x, y)]; }

  /// Edge-replicated access: coordinates outside the raster are clamped.
  double clamped(int x, int y) const;

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool operator==(const GrayImage&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

struct CropRect {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;
};

/// Loads PGM (P2/P5, maxval <= 255) or 8-bit PNG (gray, gray+alpha, RGB,
/// RGBA, palette). Color is reduced with BT.601 weights rounded to nearest.
GrayImage load_image(const std::filesystem::path& path);

/// Parses an in-memory PGM stream.
GrayImage decode_pgm(std::span<const unsigned char> bytes);

/// round(0.299 r + 0.587 g + 0.114 b)
double luminance(unsigned char r, unsigned char g, unsigned char b) noexcept;

GrayImage crop(const GrayImage& img, const CropRect& rect);

/// Bilinear resize with corner-aligned sampling: output corners map exactly
/// onto input corners.
GrayImage resize(const GrayImage& img, int width, int height);

/// Writes a binary PGM. Values are rounded and clamped to [0, 255].
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

/// Linearly rescales an arbitrary real field into [0, 255] (for debug dumps).
GrayImage rescale_to_gray(int width, int height, std::span<const double> field);

}  // namespace pairfeat
