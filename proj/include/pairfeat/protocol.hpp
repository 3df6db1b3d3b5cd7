#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pairfeat/classifiers.hpp"
#include "pairfeat/metrics.hpp"
#include "pairfeat/pairing.hpp"

namespace pairfeat {

struct ProtocolConfig {
  int repeats = 50;
  /// Fraction of each class's images used for training.
  double split = 0.5;
  std::uint64_t seed = 0;
  bool stratified = true;
  Aggregation aggregation = Aggregation::MajorityVote;
  /// Zero all timing fields so results compare byte-for-byte.
  bool canonical = false;

  void validate() const;
};

/// Joint feature maps with one class label per image.
struct LabeledDataset {
  std::vector<JointFeatureMap> maps;
  std::vector<int> labels;
  std::size_t class_count = 0;

  /// Labels in range, maps nonempty, one row width throughout.
  void validate() const;
  std::size_t dim() const noexcept { return maps.empty() ? 0 : maps.front().dim; }
};

/// Original features of one image plus its pairing graph: everything needed
/// to build the joint map in any mode.
struct ImageSample {
  std::string image_id;
  int label = 0;
  std::vector<FeatureRecord> records;
  PairGraph graph;
};

struct FeatureDataset {
  std::vector<ImageSample> samples;
  std::size_t class_count = 0;
  std::vector<std::string> class_names;
  /// Slots of the horizontal layout; 0 uses the largest record count.
  std::size_t horizontal_slots = 0;

  LabeledDataset joint(JoinMode mode) const;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Image-level split for one repeat, drawn from seed + repeat. Stratified
/// splits take floor(split * n_c) training images per class (at least one
/// image on each side).
SplitIndices split_images(std::span<const int> labels, std::size_t class_count, const ProtocolConfig& proto,
                          int repeat);

struct ProtocolResult {
  JoinMode mode = JoinMode::Paired;
  std::string classifier;
  MetricsReport average;
  MetricsReport maximum;
  std::vector<ConfusionMatrix> matrices;
  std::vector<MetricsReport> repeats;
  /// Mean raw counts over repeats (K x K, row-major) and its row-normalised form.
  std::vector<double> mean_confusion;
  std::vector<double> mean_confusion_row_normalized;
};

/// Repeated split/train/test. Throws InsufficientClassImages when a class
/// has fewer than two images.
ProtocolResult run_protocol(const LabeledDataset& ds, JoinMode mode, const ClassifierConfig& clf,
                            const ProtocolConfig& proto);

struct ModeComparison {
  std::string classifier;
  std::vector<ProtocolResult> results;  // one per mode, in request order
  /// Paired minus non-paired, when both modes ran.
  MetricValues delta_average;
  MetricValues delta_maximum;
  bool has_delta = false;

  const ProtocolResult* find(JoinMode mode) const noexcept;
};

struct ComparisonReport {
  std::vector<JoinMode> modes;
  std::vector<ModeComparison> classifiers;
  /// Rows per image in each requested mode, in dataset order.
  std::vector<std::vector<std::size_t>> rows_per_image;
  std::vector<std::string> image_ids;
  /// Images whose pairing graph came from the degenerate fallback.
  std::vector<std::string> degenerate_images;
};

ComparisonReport compare_modes(const FeatureDataset& ds, std::span<const ClassifierConfig> classifiers,
                               const ProtocolConfig& proto,
                               std::vector<JoinMode> modes = {JoinMode::NonPaired, JoinMode::Paired});

}  // namespace pairfeat
