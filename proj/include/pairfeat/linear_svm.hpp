#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pairfeat/model.hpp"

namespace pairfeat {

struct LinearSvmConfig {
  double c = 1.0;
  double tolerance = 1e-3;
  int max_epochs = 200;
  std::uint64_t seed = 0;
  bool standardize = true;

  void validate() const;
};

/// One binary hinge-loss head: decision value w . x + b.
struct SvmHead {
  std::vector<double> weights;
  double bias = 0.0;
  /// Objective after every accepted epoch, starting with the zero model.
  std::vector<double> objective_history;
  int epochs_run = 0;
};

/// One-vs-rest linear SVM. Each head minimises
///   lambda/2 |w|^2 + mean_i max(0, 1 - y_i (w . x_i + b)),  lambda = 1/(C n)
/// (the bias is carried as a constant input feature and regularised with w)
/// by stochastic subgradient steps of size 1/(lambda t) over seeded epoch
/// shuffles. The candidate of each epoch is the mean iterate over that epoch;
/// it replaces the current model only if it lowers the objective, and
/// training stops once an epoch lowers it by less than `tolerance`.
class LinearSvmModel final : public Model {
 public:
  LinearSvmModel(LinearSvmConfig cfg, Standardizer scaler, std::vector<SvmHead> heads, std::size_t dim);

  ModelKind kind() const noexcept override { return ModelKind::LinearSvm; }
  std::size_t dim() const noexcept override { return dim_; }
  std::size_t class_count() const noexcept override { return heads_.size(); }
  Prediction predict(std::span<const double> row) const override;
  void save_payload(internal::ByteWriter& w) const override;

  /// Raw per-class decision values.
  std::vector<double> decision_values(std::span<const double> row) const;
  const std::vector<SvmHead>& heads() const noexcept { return heads_; }

  static std::unique_ptr<LinearSvmModel> load_payload(internal::ByteReader& r);

 private:
  LinearSvmConfig cfg_;
  Standardizer scaler_;
  std::vector<SvmHead> heads_;
  std::size_t dim_;
};

/// Requires at least two distinct labels among the rows.
std::unique_ptr<LinearSvmModel> train_linear_svm(const RowSet& rows, const LinearSvmConfig& cfg,
                                                 std::size_t class_count);

}  // namespace pairfeat
