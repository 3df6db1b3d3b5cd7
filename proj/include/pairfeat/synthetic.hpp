#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pairfeat/image.hpp"

namespace pairfeat {

/// Generator for labelled test images: class c is a regular polygon with
/// 3 + c sides filled with a class-specific stripe texture, placed with a
/// random size, rotation and position on a noisy background.
struct SyntheticConfig {
  int classes = 5;
  int images_per_class = 20;
  int width = 480;
  int height = 360;
  std::uint64_t seed = 0;
  double background = 70.0;
  double noise_sigma = 6.0;
  double min_radius = 70.0;
  double max_radius = 110.0;

  void validate() const;
};

/// Image `index` of class `label`. A pure function of (cfg, label, index).
GrayImage synthetic_image(const SyntheticConfig& cfg, int label, int index);

/// Directory name used for class `label`.
std::string synthetic_class_name(int label);

/// Writes root/<class>/img_<index>.pgm for every image and returns the
/// written paths in class-then-index order.
std::vector<std::filesystem::path> write_synthetic_dataset(const std::filesystem::path& root,
                                                           const SyntheticConfig& cfg);

/// Black `size` x `size` image with a white `side` x `side` square whose top
/// left pixel is (x0, y0).
GrayImage white_square_image(int size, int side, int x0, int y0);

}  // namespace pairfeat
