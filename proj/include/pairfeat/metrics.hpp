#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace pairfeat {

/// K x K count grid; entry (true class, predicted class).
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes) : k_(classes), counts_(classes * classes, 0) {}
  ConfusionMatrix(std::size_t classes, std::vector<std::uint64_t> counts);

  std::size_t classes() const noexcept { return k_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * k_ + predicted]; }
  void add(std::size_t truth, std::size_t predicted, std::uint64_t n = 1);
  std::uint64_t total() const noexcept;
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t k_ = 0;
  std::vector<std::uint64_t> counts_;
};

struct MetricValues {
  double accuracy = 0.0;
  double f1 = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double specificity = 0.0;

  static constexpr std::array<std::string_view, 5> kNames = {"accuracy", "f1", "recall", "precision",
                                                             "specificity"};
  static constexpr std::size_t size() noexcept { return kNames.size(); }
  double& operator[](std::size_t i) noexcept;
  double operator[](std::size_t i) const noexcept;

  bool operator==(const MetricValues&) const = default;
};

/// One-vs-rest reduction for one class.
struct ClassMetrics {
  std::uint64_t tp = 0, fn = 0, fp = 0, tn = 0;
  MetricValues values;
  /// No true instances: recall and f1 reported as 0.
  bool no_positives = false;
  /// Never predicted: precision reported as 0.
  bool no_predictions = false;
  /// TN + FP = 0: specificity reported as 1.
  bool specificity_undefined = false;
};

struct MetricsReport {
  /// Macro averages over the per-class reductions.
  MetricValues macro;
  std::vector<ClassMetrics> per_class;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
  /// Set when any class hit one of the degenerate cases above.
  bool degenerate = false;
};

/// Acc = (TP+TN)/(TP+FP+TN+FN), Spec = TN/(TN+FP), F1 = 2TP/(2TP+FP+FN),
/// Recall = TP/(TP+FN), Prec = TP/(TP+FP) per class, then macro-averaged.
/// Throws EmptyInput on an all-zero matrix.
MetricsReport metrics_from_confusion(const ConfusionMatrix& cm);

}  // namespace pairfeat
