#include "pairfeat/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "internal/binary_io.hpp"
#include "pairfeat/error.hpp"
#include "pairfeat/random.hpp"

namespace pairfeat {

void ForestConfig::validate() const {
  if (trees < 1) throw Error(ErrorCode::InvalidArgument, "forest needs at least one tree");
  if (max_depth < 1) throw Error(ErrorCode::InvalidArgument, "forest max_depth must be >= 1");
  if (features_per_split < 0) throw Error(ErrorCode::InvalidArgument, "features_per_split must be >= 0");
}

std::span<const double> DecisionTree::leaf_distribution(std::span<const double> row) const {
  int id = 0;
  while (nodes[id].feature >= 0) {
    const auto& n = nodes[id];
    id = row[n.feature] <= n.threshold ? n.left : n.right;
  }
  return std::span<const double>(class_fractions).subspan(nodes[id].distribution, classes);
}

int DecisionTree::depth() const {
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes[i].feature >= 0) {
      level[nodes[i].left] = level[i] + 1;
      level[nodes[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const RowSet& rows, std::size_t classes, int max_depth, std::size_t mtry, Rng& rng)
      : rows_(rows), classes_(classes), max_depth_(max_depth), mtry_(mtry), rng_(rng),
        features_(rows.dim) {
    std::iota(features_.begin(), features_.end(), 0);
    tree_.classes = classes;
  }

  DecisionTree build(std::vector<std::size_t> sample) {
    sample_ = std::move(sample);
    grow(0, sample_.size(), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
  };

  std::vector<std::size_t> counts(std::size_t begin, std::size_t end) const {
    std::vector<std::size_t> c(classes_, 0);
    for (std::size_t i = begin; i < end; ++i) ++c[rows_.labels[sample_[i]]];
    return c;
  }

  // Weighted Gini of a partition, scaled by node size: sum_side (n_side - sum c^2 / n_side).
  static double side_impurity(double n, double sum_sq) noexcept { return n > 0 ? n - sum_sq / n : 0.0; }

  Split best_split_on(int feature, std::size_t begin, std::size_t end,
                      const std::vector<std::size_t>& node_counts) {
    scratch_.clear();
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t r = sample_[i];
      scratch_.emplace_back(rows_.values[r * rows_.dim + feature], rows_.labels[r]);
    }
    std::sort(scratch_.begin(), scratch_.end());
    Split best;
    if (scratch_.front().first == scratch_.back().first) return best;

    std::vector<double> left(classes_, 0.0);
    std::vector<double> right(node_counts.begin(), node_counts.end());
    double left_sq = 0.0;
    double right_sq = 0.0;
    for (double c : right) right_sq += c * c;
    const auto n = static_cast<double>(scratch_.size());
    for (std::size_t i = 0; i + 1 < scratch_.size(); ++i) {
      const int label = scratch_[i].second;
      left_sq += 2.0 * left[label] + 1.0;
      left[label] += 1.0;
      right_sq -= 2.0 * right[label] - 1.0;
      right[label] -= 1.0;
      if (scratch_[i].first == scratch_[i + 1].first) continue;
      const double nl = static_cast<double>(i + 1);
      const double impurity = side_impurity(nl, left_sq) + side_impurity(n - nl, right_sq);
      if (impurity < best.impurity) {
        best.feature = feature;
        best.impurity = impurity;
        best.threshold = 0.5 * (scratch_[i].first + scratch_[i + 1].first);
        // Guard against the midpoint rounding onto the upper value.
        if (!(best.threshold < scratch_[i + 1].first)) best.threshold = scratch_[i].first;
      }
    }
    return best;
  }

  int make_leaf(const std::vector<std::size_t>& c, std::size_t n) {
    const int id = static_cast<int>(tree_.nodes.size());
    DecisionTree::Node node;
    node.distribution = static_cast<int>(tree_.class_fractions.size());
    for (std::size_t k = 0; k < classes_; ++k) {
      tree_.class_fractions.push_back(static_cast<double>(c[k]) / static_cast<double>(n));
    }
    tree_.nodes.push_back(node);
    return id;
  }

  int grow(std::size_t begin, std::size_t end, int depth) {
    const std::size_t n = end - begin;
    const auto node_counts = counts(begin, end);
    const bool pure = std::count_if(node_counts.begin(), node_counts.end(),
                                    [](std::size_t c) { return c > 0; }) <= 1;
    if (pure || n < 2 || depth >= max_depth_) return make_leaf(node_counts, n);

    // Visit features in a fresh random order; stop after mtry features that
    // can split this node (constant features do not count).
    Split best;
    std::size_t informative = 0;
    for (std::size_t k = 0; k < features_.size() && informative < mtry_; ++k) {
      const auto j = k + static_cast<std::size_t>(rng_.below(features_.size() - k));
      std::swap(features_[k], features_[j]);
      const Split s = best_split_on(features_[k], begin, end, node_counts);
      if (s.feature < 0) continue;
      ++informative;
      if (s.impurity < best.impurity) best = s;
    }
    if (best.feature < 0) return make_leaf(node_counts, n);

    const auto mid_it = std::stable_partition(
        sample_.begin() + static_cast<std::ptrdiff_t>(begin), sample_.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::size_t r) { return rows_.values[r * rows_.dim + best.feature] <= best.threshold; });
    const auto mid = static_cast<std::size_t>(mid_it - sample_.begin());

    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const int left = grow(begin, mid, depth + 1);
    const int right = grow(mid, end, depth + 1);
    auto& node = tree_.nodes[id];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  const RowSet& rows_;
  std::size_t classes_;
  int max_depth_;
  std::size_t mtry_;
  Rng& rng_;
  std::vector<int> features_;
  std::vector<std::size_t> sample_;
  std::vector<std::pair<double, int>> scratch_;
  DecisionTree tree_;
};

RowSet canonical_order(const RowSet& rows) {
  std::vector<std::size_t> idx(rows.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (rows.labels[a] != rows.labels[b]) return rows.labels[a] < rows.labels[b];
    const auto ra = rows.row(a);
    const auto rb = rows.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  RowSet out(rows.dim);
  out.values.reserve(rows.values.size());
  for (std::size_t i : idx) out.add(rows.row(i), rows.labels[i]);
  return out;
}

}  // namespace

ForestModel::ForestModel(ForestConfig cfg, std::vector<DecisionTree> trees, std::size_t dim,
                         std::size_t class_count, double oob_accuracy)
    : cfg_(cfg), trees_(std::move(trees)), dim_(dim), classes_(class_count), oob_accuracy_(oob_accuracy) {}

Prediction ForestModel::predict(std::span<const double> row) const {
  check_dim(row.size());
  Prediction p;
  p.scores.assign(classes_, 0.0);
  for (const auto& t : trees_) {
    const auto dist = t.leaf_distribution(row);
    for (std::size_t c = 0; c < classes_; ++c) p.scores[c] += dist[c];
  }
  for (double& s : p.scores) s /= static_cast<double>(trees_.size());
  p.label = argmax_label(p.scores);
  return p;
}

void ForestModel::save_payload(internal::ByteWriter& w) const {
  w.put<std::int32_t>(cfg_.trees);
  w.put<std::int32_t>(cfg_.max_depth);
  w.put<std::int32_t>(cfg_.features_per_split);
  w.put<std::uint64_t>(cfg_.seed);
  w.put<std::uint64_t>(dim_);
  w.put<std::uint64_t>(classes_);
  w.put<double>(oob_accuracy_);
  for (const auto& t : trees_) {
    w.put<std::uint64_t>(t.nodes.size());
    for (const auto& n : t.nodes) {
      w.put<std::int32_t>(n.feature);
      w.put<double>(n.threshold);
      w.put<std::int32_t>(n.left);
      w.put<std::int32_t>(n.right);
      w.put<std::int32_t>(n.distribution);
    }
    w.put_vector<double>(t.class_fractions);
  }
}

std::unique_ptr<ForestModel> ForestModel::load_payload(internal::ByteReader& r) {
  ForestConfig cfg;
  cfg.trees = r.get<std::int32_t>();
  cfg.max_depth = r.get<std::int32_t>();
  cfg.features_per_split = r.get<std::int32_t>();
  cfg.seed = r.get<std::uint64_t>();
  cfg.validate();
  const auto dim = r.get<std::uint64_t>();
  const auto classes = r.get<std::uint64_t>();
  const double oob = r.get<double>();
  std::vector<DecisionTree> trees(static_cast<std::size_t>(cfg.trees));
  for (auto& t : trees) {
    t.classes = classes;
    const auto count = r.get<std::uint64_t>();
    if (count == 0 || count > (1ULL << 32)) throw Error(ErrorCode::CorruptModel, "implausible tree size");
    t.nodes.resize(count);
    for (auto& n : t.nodes) {
      n.feature = r.get<std::int32_t>();
      n.threshold = r.get<double>();
      n.left = r.get<std::int32_t>();
      n.right = r.get<std::int32_t>();
      n.distribution = r.get<std::int32_t>();
    }
    t.class_fractions = r.get_vector<double>();
    for (const auto& n : t.nodes) {
      const auto limit = static_cast<int>(count);
      const bool ok = n.feature >= 0
                          ? (n.feature < static_cast<int>(dim) && n.left > 0 && n.left < limit && n.right > 0 &&
                             n.right < limit)
                          : (n.distribution >= 0 &&
                             static_cast<std::size_t>(n.distribution) + classes <= t.class_fractions.size());
      if (!ok) throw Error(ErrorCode::CorruptModel, "tree node references out of range");
    }
  }
  return std::make_unique<ForestModel>(cfg, std::move(trees), dim, classes, oob);
}

std::unique_ptr<ForestModel> train_forest(const RowSet& rows_in, const ForestConfig& cfg, std::size_t class_count) {
  cfg.validate();
  validate_rows(rows_in, class_count);
  const RowSet rows = canonical_order(rows_in);
  const std::size_t n = rows.size();
  const std::size_t mtry =
      cfg.features_per_split > 0
          ? std::min<std::size_t>(static_cast<std::size_t>(cfg.features_per_split), rows.dim)
          : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(rows.dim)))));

  std::vector<DecisionTree> trees;
  trees.reserve(static_cast<std::size_t>(cfg.trees));
  std::vector<double> oob_votes(n * class_count, 0.0);
  std::vector<char> in_bag(n);

  for (int t = 0; t < cfg.trees; ++t) {
    Rng rng(mix_seed(cfg.seed ^ mix_seed(static_cast<std::uint64_t>(t))));
    std::vector<std::size_t> sample(n);
    std::fill(in_bag.begin(), in_bag.end(), 0);
    for (auto& s : sample) {
      s = static_cast<std::size_t>(rng.below(n));
      in_bag[s] = 1;
    }
    TreeBuilder builder(rows, class_count, cfg.max_depth, mtry, rng);
    trees.push_back(builder.build(std::move(sample)));
    for (std::size_t i = 0; i < n; ++i) {
      if (in_bag[i]) continue;
      const auto dist = trees.back().leaf_distribution(rows.row(i));
      for (std::size_t c = 0; c < class_count; ++c) oob_votes[i * class_count + c] += dist[c];
    }
  }

  std::size_t scored = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> votes(oob_votes.data() + i * class_count, class_count);
    if (std::all_of(votes.begin(), votes.end(), [](double v) { return v == 0.0; })) continue;
    ++scored;
    if (argmax_label(votes) == rows.labels[i]) ++correct;
  }
  const double oob = scored ? static_cast<double>(correct) / static_cast<double>(scored)
                            : std::numeric_limits<double>::quiet_NaN();
  return std::make_unique<ForestModel>(cfg, std::move(trees), rows.dim, class_count, oob);
}

}  // namespace pairfeat
