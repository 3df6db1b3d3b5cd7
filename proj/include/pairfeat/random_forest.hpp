#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pairfeat/model.hpp"

namespace pairfeat {

struct ForestConfig {
  int trees = 200;
  int max_depth = 21;
  /// Candidate features per split; 0 selects floor(sqrt(dim)).
  int features_per_split = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Flat CART tree. Internal nodes send x[feature] <= threshold left.
struct DecisionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int distribution = -1;  // leaf: offset into class_fractions
  };

  std::vector<Node> nodes;
  std::vector<double> class_fractions;
  std::size_t classes = 0;

  std::span<const double> leaf_distribution(std::span<const double> row) const;
  int depth() const;
};

/// Gini CART trees on bootstrap samples with per-node random feature subsets.
/// Rows are put into a canonical (label, vector) order before sampling, so a
/// given seed yields the same forest for any ordering of the training rows.
class ForestModel final : public Model {
 public:
  ForestModel(ForestConfig cfg, std::vector<DecisionTree> trees, std::size_t dim, std::size_t class_count,
              double oob_accuracy);

  ModelKind kind() const noexcept override { return ModelKind::RandomForest; }
  std::size_t dim() const noexcept override { return dim_; }
  std::size_t class_count() const noexcept override { return classes_; }
  Prediction predict(std::span<const double> row) const override;
  void save_payload(internal::ByteWriter& w) const override;

  /// Fraction of training rows classified correctly by the trees that did
  /// not see them; NaN when no row was ever out of bag.
  double oob_accuracy() const noexcept { return oob_accuracy_; }
  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

  static std::unique_ptr<ForestModel> load_payload(internal::ByteReader& r);

 private:
  ForestConfig cfg_;
  std::vector<DecisionTree> trees_;
  std::size_t dim_;
  std::size_t classes_;
  double oob_accuracy_;
};

std::unique_ptr<ForestModel> train_forest(const RowSet& rows, const ForestConfig& cfg, std::size_t class_count);

}  // namespace pairfeat
