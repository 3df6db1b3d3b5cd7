#include "pairfeat/model.hpp"

#include <algorithm>
#include <cmath>

#include "internal/binary_io.hpp"
#include "pairfeat/error.hpp"

namespace pairfeat {

void RowSet::add(std::span<const double> v, int label) {
  if (v.size() != dim) throw Error(ErrorCode::DimensionMismatch, "row dimension differs from row set");
  values.insert(values.end(), v.begin(), v.end());
  labels.push_back(label);
}

Standardizer Standardizer::fit(const RowSet& rows) {
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "cannot standardize an empty row set");
  const std::size_t d = rows.dim;
  const auto n = static_cast<double>(rows.size());
  Standardizer s;
  s.mean_.assign(d, 0.0);
  s.inv_scale_.assign(d, 1.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows.row(i);
    for (std::size_t j = 0; j < d; ++j) s.mean_[j] += r[j];
  }
  for (double& m : s.mean_) m /= n;
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double c = r[j] - s.mean_[j];
      var[j] += c * c;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / n);
    s.inv_scale_[j] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
  return s;
}

Standardizer Standardizer::identity(std::size_t dim) {
  Standardizer s;
  s.mean_.assign(dim, 0.0);
  s.inv_scale_.assign(dim, 1.0);
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  if (row.size() != mean_.size()) throw Error(ErrorCode::DimensionMismatch, "standardizer dimension mismatch");
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean_[j]) * inv_scale_[j];
  return out;
}

RowSet Standardizer::apply(const RowSet& rows) const {
  RowSet out(rows.dim);
  out.values.reserve(rows.values.size());
  out.labels = rows.labels;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows.row(i);
    for (std::size_t j = 0; j < rows.dim; ++j) out.values.push_back((r[j] - mean_[j]) * inv_scale_[j]);
  }
  return out;
}

void Standardizer::save(internal::ByteWriter& w) const {
  w.put_vector<double>(mean_);
  w.put_vector<double>(inv_scale_);
}

Standardizer Standardizer::load(internal::ByteReader& r) {
  Standardizer s;
  s.mean_ = r.get_vector<double>();
  s.inv_scale_ = r.get_vector<double>();
  if (s.mean_.size() != s.inv_scale_.size()) throw Error(ErrorCode::CorruptModel, "standardizer size mismatch");
  return s;
}

void Model::check_dim(std::size_t n) const {
  if (n != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "query dim " + std::to_string(n) + " != model dim " +
                                                  std::to_string(dim()));
  }
}

std::vector<Prediction> Model::predict_rows(std::span<const std::vector<double>> rows) const {
  std::vector<Prediction> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    check_dim(r.size());
    out.push_back(predict(r));
  }
  return out;
}

std::vector<Prediction> Model::predict_rows(const RowSet& rows) const {
  if (rows.empty()) return {};
  check_dim(rows.dim);
  std::vector<Prediction> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.push_back(predict(rows.row(i)));
  return out;
}

void validate_rows(const RowSet& rows, std::size_t class_count) {
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "training set is empty");
  if (rows.dim == 0) throw Error(ErrorCode::InvalidArgument, "training rows have dimension 0");
  if (rows.values.size() != rows.size() * rows.dim) {
    throw Error(ErrorCode::DimensionMismatch, "row set storage does not match its dimension");
  }
  for (int label : rows.labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= class_count) {
      throw Error(ErrorCode::InvalidArgument, "label " + std::to_string(label) + " outside [0, " +
                                                  std::to_string(class_count) + ")");
    }
  }
  for (double v : rows.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite feature value");
  }
}

int argmax_label(std::span<const double> scores) noexcept {
  int best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = static_cast<int>(c);
  }
  return best;
}

ImagePrediction aggregate_predictions(std::span<const Prediction> rows, Aggregation aggregation) {
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "cannot aggregate an empty prediction list");
  std::size_t k = 0;
  for (const auto& p : rows) {
    k = std::max({k, p.scores.size(), static_cast<std::size_t>(p.label) + 1});
  }
  std::vector<double> votes(k, 0.0);
  std::vector<double> score_sum(k, 0.0);
  for (const auto& p : rows) {
    votes[p.label] += 1.0;
    for (std::size_t c = 0; c < p.scores.size(); ++c) score_sum[c] += p.scores[c];
  }
  const auto n = static_cast<double>(rows.size());

  if (aggregation == Aggregation::MeanScore) {
    const int label = argmax_label(score_sum);
    return {label, score_sum[label] / n};
  }
  int best = 0;
  for (std::size_t c = 1; c < k; ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && score_sum[c] > score_sum[best])) {
      best = static_cast<int>(c);
    }
  }
  return {best, votes[best] / n};
}

ImagePrediction predict_image(const Model& model, const JointFeatureMap& map, Aggregation aggregation) {
  if (map.rows.empty()) throw Error(ErrorCode::EmptyInput, "cannot classify an empty feature map " + map.image_id);
  std::vector<Prediction> preds;
  preds.reserve(map.rows.size());
  for (const auto& row : map.rows) {
    model.check_dim(row.vector.size());
    preds.push_back(model.predict(row.vector));
  }
  return aggregate_predictions(preds, aggregation);
}

}  // namespace pairfeat
