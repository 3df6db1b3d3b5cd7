#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pairfeat/pairing.hpp"

namespace pairfeat {

namespace internal {
class ByteWriter;
class ByteReader;
}  // namespace internal

/// Dense row-major training/query matrix with one integer label per row.
struct RowSet {
  std::size_t dim = 0;
  std::vector<double> values;
  std::vector<int> labels;

  RowSet() = default;
  explicit RowSet(std::size_t d) : dim(d) {}

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
  std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(values).subspan(i * dim, dim);
  }
  void add(std::span<const double> v, int label);
};

/// Per-dimension affine map to zero mean / unit variance fitted on training
/// rows. Dimensions with (near) zero spread keep scale 1.
class Standardizer {
 public:
  Standardizer() = default;
  static Standardizer fit(const RowSet& rows);
  static Standardizer identity(std::size_t dim);

  std::vector<double> apply(std::span<const double> row) const;
  RowSet apply(const RowSet& rows) const;
  std::size_t dim() const noexcept { return mean_.size(); }

  void save(internal::ByteWriter& w) const;
  static Standardizer load(internal::ByteReader& r);

 private:
  std::vector<double> mean_;
  std::vector<double> inv_scale_;
};

struct Prediction {
  int label = 0;
  /// Non-negative, sums to 1.
  std::vector<double> scores;
};

enum class ModelKind : std::uint8_t { Knn = 1, LinearSvm = 2, RandomForest = 3 };

class Model {
 public:
  virtual ~Model() = default;

  virtual ModelKind kind() const noexcept = 0;
  virtual std::size_t dim() const noexcept = 0;
  virtual std::size_t class_count() const noexcept = 0;
  virtual Prediction predict(std::span<const double> row) const = 0;

  /// Validates dims; empty input yields empty output.
  std::vector<Prediction> predict_rows(std::span<const std::vector<double>> rows) const;
  std::vector<Prediction> predict_rows(const RowSet& rows) const;

  /// Throws DimensionMismatch unless n == dim().
  void check_dim(std::size_t n) const;

  virtual void save_payload(internal::ByteWriter& w) const = 0;
};

/// Throws EmptyInput for no rows and InvalidArgument for labels outside
/// [0, class_count).
void validate_rows(const RowSet& rows, std::size_t class_count);

/// argmax with ties resolved to the lowest class index.
int argmax_label(std::span<const double> scores) noexcept;

enum class Aggregation { MajorityVote, MeanScore };

struct ImagePrediction {
  int label = 0;
  double confidence = 0.0;
};

/// Image-level label from row predictions. Majority vote breaks ties by the
/// larger summed score, then the lower class index; confidence is the
/// winner's vote share. MeanScore takes the argmax of the mean score vector.
ImagePrediction aggregate_predictions(std::span<const Prediction> rows,
                                      Aggregation aggregation = Aggregation::MajorityVote);
ImagePrediction predict_image(const Model& model, const JointFeatureMap& map,
                              Aggregation aggregation = Aggregation::MajorityVote);

}  // namespace pairfeat
