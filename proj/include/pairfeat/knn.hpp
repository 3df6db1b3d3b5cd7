#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pairfeat/model.hpp"

namespace pairfeat {

struct Neighbor {
  std::size_t index = 0;
  double dist2 = 0.0;

  bool operator==(const Neighbor&) const = default;
};

/// Orders neighbors by squared distance, then by index.
inline bool neighbor_less(const Neighbor& a, const Neighbor& b) noexcept {
  return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
}

/// Exact k-nearest-neighbour index over a fixed point set (Euclidean).
/// Splits on the dimension of largest spread at the median.
class KdTree {
 public:
  KdTree() = default;
  KdTree(std::span<const double> points, std::size_t dim, std::size_t leaf_size = 8);

  /// The k nearest points sorted by (dist2, index); fewer if the tree holds
  /// fewer than k points.
  std::vector<Neighbor> query(std::span<const double> q, std::size_t k) const;

  std::size_t size() const noexcept { return dim_ ? points_.size() / dim_ : 0; }
  std::size_t dim() const noexcept { return dim_; }

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    int split_dim = -1;  // -1 marks a leaf
    double split_value = 0.0;
    int left = -1;
    int right = -1;
  };

  int build(std::size_t begin, std::size_t end, std::size_t leaf_size);
  void search(int node, std::span<const double> q, std::size_t k, std::vector<Neighbor>& heap) const;
  double dist2(std::size_t idx, std::span<const double> q) const noexcept;

  std::vector<double> points_;
  std::size_t dim_ = 0;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

/// Linear scan with the same ordering contract as KdTree::query.
std::vector<Neighbor> brute_force_neighbors(std::span<const double> points, std::size_t dim,
                                            std::span<const double> q, std::size_t k);

enum class KnnIndex { Auto, KdTree, BruteForce };

struct KnnConfig {
  int k = 21;
  /// kd-tree up to this dimension in Auto mode, brute force above.
  std::size_t kd_tree_max_dim = 32;
  KnnIndex index = KnnIndex::Auto;
  bool standardize = true;

  void validate() const;
};

/// Inverse-distance weighted k-NN. A neighbour at distance zero outweighs all
/// others: only exact matches vote when any exist.
class KnnModel final : public Model {
 public:
  KnnModel(KnnConfig cfg, Standardizer scaler, RowSet rows, std::size_t class_count);

  ModelKind kind() const noexcept override { return ModelKind::Knn; }
  std::size_t dim() const noexcept override { return rows_.dim; }
  std::size_t class_count() const noexcept override { return classes_; }
  Prediction predict(std::span<const double> row) const override;
  void save_payload(internal::ByteWriter& w) const override;

  /// Neighbours of a raw (unstandardized) query in the model's index.
  std::vector<Neighbor> neighbors(std::span<const double> row) const;
  bool uses_kd_tree() const noexcept { return use_tree_; }
  const KnnConfig& config() const noexcept { return cfg_; }

  static std::unique_ptr<KnnModel> load_payload(internal::ByteReader& r);

 private:
  KnnConfig cfg_;
  Standardizer scaler_;
  RowSet rows_;  // standardized
  std::size_t classes_;
  bool use_tree_;
  KdTree tree_;
};

std::unique_ptr<KnnModel> train_knn(const RowSet& rows, const KnnConfig& cfg, std::size_t class_count);

}  // namespace pairfeat
