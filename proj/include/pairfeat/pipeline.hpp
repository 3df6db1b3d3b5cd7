#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pairfeat/corners.hpp"
#include "pairfeat/image.hpp"
#include "pairfeat/patches.hpp"
#include "pairfeat/protocol.hpp"

namespace pairfeat {

struct DatasetEntry {
  std::string image_id;  // "<class dir>/<file name>"
  std::filesystem::path path;
  int label = 0;
};

struct DatasetIndex {
  std::vector<std::string> class_names;
  std::vector<DatasetEntry> entries;
};

/// One subdirectory per class; labels follow the sorted directory names and
/// images (.pgm, .png) are listed in sorted file-name order. Throws
/// UnreadableFile when the root is missing and EmptyInput when no image is
/// found.
DatasetIndex scan_dataset(const std::filesystem::path& root);

struct PrepareConfig {
  int width = 480;
  int height = 360;
  std::optional<CropRect> crop;
};

/// Optional crop, then resize to the configured size.
GrayImage prepare_image(const GrayImage& img, const PrepareConfig& cfg);

struct DetectedPoints {
  std::vector<InterestPoint> points;
  /// Set when detection found nothing and the image centre stands in.
  bool fallback = false;
};

/// detect() plus a single centre point when no corner qualifies, so every
/// image still contributes one feature row.
DetectedPoints detect_or_centre(const GrayImage& img, const CornerConfig& cfg);

std::vector<Point2> to_points(std::span<const InterestPoint> points);

/// Builtin descriptors for every point, in point order.
std::vector<FeatureRecord> describe(const GrayImage& img, std::span<const InterestPoint> points,
                                    const std::string& image_id, std::size_t dim);

struct PipelineConfig {
  PrepareConfig prepare;
  CornerConfig corners;
  DescriptorSource descriptor;
  /// Fall back to a path graph when the points cannot be triangulated.
  bool pairing_fallback = true;
};

/// Per-image detection outcome kept for reports.
struct ImageDetection {
  std::string image_id;
  int label = 0;
  std::vector<InterestPoint> points;
  bool fallback = false;
};

/// Loads, prepares and detects every image of the index.
std::vector<ImageDetection> detect_dataset(const DatasetIndex& index, const PipelineConfig& cfg);

/// Descriptors (builtin or imported) plus pairing graphs for detected images.
FeatureDataset build_feature_dataset(const DatasetIndex& index, std::span<const ImageDetection> detections,
                                     const PipelineConfig& cfg);

}  // namespace pairfeat
