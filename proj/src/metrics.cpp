#include "pairfeat/metrics.hpp"

#include <numeric>

#include "pairfeat/error.hpp"

namespace pairfeat {

ConfusionMatrix::ConfusionMatrix(std::size_t classes, std::vector<std::uint64_t> counts)
    : k_(classes), counts_(std::move(counts)) {
  if (counts_.size() != k_ * k_) throw Error(ErrorCode::DimensionMismatch, "confusion matrix must be K x K");
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::uint64_t n) {
  if (truth >= k_ || predicted >= k_) throw Error(ErrorCode::OutOfBounds, "confusion matrix class out of range");
  counts_[truth * k_ + predicted] += n;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

double& MetricValues::operator[](std::size_t i) noexcept {
  switch (i) {
    case 0: return accuracy;
    case 1: return f1;
    case 2: return recall;
    case 3: return precision;
    default: return specificity;
  }
}

double MetricValues::operator[](std::size_t i) const noexcept {
  return const_cast<MetricValues&>(*this)[i];
}

MetricsReport metrics_from_confusion(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (cm.classes() == 0 || total == 0) throw Error(ErrorCode::EmptyInput, "confusion matrix is all zero");
  const std::size_t k = cm.classes();

  MetricsReport report;
  report.per_class.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::uint64_t row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += cm.at(c, j);
      col += cm.at(j, c);
    }
    auto& m = report.per_class[c];
    m.tp = cm.at(c, c);
    m.fn = row - m.tp;
    m.fp = col - m.tp;
    m.tn = total - m.tp - m.fn - m.fp;

    const auto tp = static_cast<double>(m.tp);
    const auto fn = static_cast<double>(m.fn);
    const auto fp = static_cast<double>(m.fp);
    const auto tn = static_cast<double>(m.tn);

    m.values.accuracy = (tp + tn) / static_cast<double>(total);
    m.no_positives = m.tp + m.fn == 0;
    m.no_predictions = m.tp + m.fp == 0;
    m.specificity_undefined = m.tn + m.fp == 0;
    m.values.recall = m.no_positives ? 0.0 : tp / (tp + fn);
    m.values.precision = m.no_predictions ? 0.0 : tp / (tp + fp);
    m.values.f1 = m.no_positives ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
    m.values.specificity = m.specificity_undefined ? 1.0 : tn / (tn + fp);
    report.degenerate = report.degenerate || m.no_positives || m.no_predictions || m.specificity_undefined;

    for (std::size_t i = 0; i < MetricValues::size(); ++i) report.macro[i] += m.values[i];
  }
  for (std::size_t i = 0; i < MetricValues::size(); ++i) report.macro[i] /= static_cast<double>(k);
  return report;
}

}  // namespace pairfeat
