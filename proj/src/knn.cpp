#include "pairfeat/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "internal/binary_io.hpp"
#include "pairfeat/error.hpp"

namespace pairfeat {

KdTree::KdTree(std::span<const double> points, std::size_t dim, std::size_t leaf_size)
    : points_(points.begin(), points.end()), dim_(dim) {
  if (dim == 0 || points.size() % dim != 0) {
    throw Error(ErrorCode::DimensionMismatch, "kd-tree point buffer is not a multiple of dim");
  }
  order_.resize(points.size() / dim);
  std::iota(order_.begin(), order_.end(), 0);
  if (!order_.empty()) build(0, order_.size(), std::max<std::size_t>(leaf_size, 1));
}

int KdTree::build(std::size_t begin, std::size_t end, std::size_t leaf_size) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end});
  if (end - begin <= leaf_size) return id;

  std::size_t best_dim = 0;
  double best_spread = -1.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    double lo = points_[order_[begin] * dim_ + d];
    double hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
      const double v = points_[order_[i] * dim_ + d];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = d;
    }
  }
  if (best_spread <= 0.0) return id;  // all points identical

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     const double va = points_[a * dim_ + best_dim];
                     const double vb = points_[b * dim_ + best_dim];
                     return va < vb || (va == vb && a < b);
                   });
  const double split = points_[order_[mid] * dim_ + best_dim];
  // Left holds [begin, mid) with values <= split; right holds values >= split.
  const int left = build(begin, mid, leaf_size);
  const int right = build(mid, end, leaf_size);
  nodes_[id].split_dim = static_cast<int>(best_dim);
  nodes_[id].split_value = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double KdTree::dist2(std::size_t idx, std::span<const double> q) const noexcept {
  const double* p = points_.data() + idx * dim_;
  double acc = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    const double diff = p[d] - q[d];
    acc += diff * diff;
  }
  return acc;
}

void KdTree::search(int node_id, std::span<const double> q, std::size_t k,
                    std::vector<Neighbor>& heap) const {
  const Node& node = nodes_[node_id];
  if (node.split_dim < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const Neighbor cand{order_[i], dist2(order_[i], q)};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), neighbor_less);
      } else if (neighbor_less(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), neighbor_less);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), neighbor_less);
      }
    }
    return;
  }
  const double diff = q[node.split_dim] - node.split_value;
  const int near = diff <= 0.0 ? node.left : node.right;
  const int far = diff <= 0.0 ? node.right : node.left;
  search(near, q, k, heap);
  // Equal distances still matter for the index tie-break, hence <=.
  if (heap.size() < k || diff * diff <= heap.front().dist2) search(far, q, k, heap);
}

std::vector<Neighbor> KdTree::query(std::span<const double> q, std::size_t k) const {
  if (q.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "kd-tree query dimension mismatch");
  std::vector<Neighbor> heap;
  if (k == 0 || nodes_.empty()) return heap;
  heap.reserve(k + 1);
  search(0, q, k, heap);
  std::sort_heap(heap.begin(), heap.end(), neighbor_less);
  return heap;
}

std::vector<Neighbor> brute_force_neighbors(std::span<const double> points, std::size_t dim,
                                            std::span<const double> q, std::size_t k) {
  if (dim == 0 || points.size() % dim != 0 || q.size() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "brute-force neighbour search dimension mismatch");
  }
  const std::size_t n = points.size() / dim;
  std::vector<Neighbor> all(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = points[i * dim + d] - q[d];
      acc += diff * diff;
    }
    all[i] = {i, acc};
  }
  k = std::min(k, n);
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), neighbor_less);
  all.resize(k);
  return all;
}

void KnnConfig::validate() const {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k-NN requires k >= 1");
}

KnnModel::KnnModel(KnnConfig cfg, Standardizer scaler, RowSet rows, std::size_t class_count)
    : cfg_(cfg), scaler_(std::move(scaler)), rows_(std::move(rows)), classes_(class_count) {
  use_tree_ = cfg_.index == KnnIndex::KdTree ||
              (cfg_.index == KnnIndex::Auto && rows_.dim <= cfg_.kd_tree_max_dim);
  if (use_tree_) tree_ = KdTree(rows_.values, rows_.dim);
}

std::vector<Neighbor> KnnModel::neighbors(std::span<const double> row) const {
  check_dim(row.size());
  const auto q = scaler_.apply(row);
  const auto k = static_cast<std::size_t>(cfg_.k);
  return use_tree_ ? tree_.query(q, k) : brute_force_neighbors(rows_.values, rows_.dim, q, k);
}

Prediction KnnModel::predict(std::span<const double> row) const {
  const auto nbrs = neighbors(row);
  Prediction p;
  p.scores.assign(classes_, 0.0);
  const bool exact = !nbrs.empty() && nbrs.front().dist2 == 0.0;
  for (const auto& nb : nbrs) {
    const int label = rows_.labels[nb.index];
    if (exact) {
      if (nb.dist2 == 0.0) p.scores[label] += 1.0;
    } else {
      p.scores[label] += 1.0 / std::sqrt(nb.dist2);
    }
  }
  const double total = std::accumulate(p.scores.begin(), p.scores.end(), 0.0);
  for (double& s : p.scores) s /= total;
  p.label = argmax_label(p.scores);
  return p;
}

void KnnModel::save_payload(internal::ByteWriter& w) const {
  w.put<std::int32_t>(cfg_.k);
  w.put<std::uint64_t>(cfg_.kd_tree_max_dim);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg_.index));
  w.put<std::uint8_t>(cfg_.standardize ? 1 : 0);
  w.put<std::uint64_t>(classes_);
  scaler_.save(w);
  w.put<std::uint64_t>(rows_.dim);
  w.put_vector<double>(rows_.values);
  std::vector<std::int32_t> labels(rows_.labels.begin(), rows_.labels.end());
  w.put_vector<std::int32_t>(labels);
}

std::unique_ptr<KnnModel> KnnModel::load_payload(internal::ByteReader& r) {
  KnnConfig cfg;
  cfg.k = r.get<std::int32_t>();
  cfg.kd_tree_max_dim = r.get<std::uint64_t>();
  const auto index = r.get<std::uint8_t>();
  if (index > 2) throw Error(ErrorCode::CorruptModel, "bad k-NN index kind");
  cfg.index = static_cast<KnnIndex>(index);
  cfg.standardize = r.get<std::uint8_t>() != 0;
  cfg.validate();
  const auto classes = r.get<std::uint64_t>();
  auto scaler = Standardizer::load(r);
  RowSet rows(r.get<std::uint64_t>());
  rows.values = r.get_vector<double>();
  const auto labels = r.get_vector<std::int32_t>();
  rows.labels.assign(labels.begin(), labels.end());
  if (rows.dim == 0 || rows.values.size() != rows.size() * rows.dim || scaler.dim() != rows.dim) {
    throw Error(ErrorCode::CorruptModel, "k-NN payload dimensions are inconsistent");
  }
  return std::make_unique<KnnModel>(cfg, std::move(scaler), std::move(rows), classes);
}

std::unique_ptr<KnnModel> train_knn(const RowSet& rows, const KnnConfig& cfg, std::size_t class_count) {
  cfg.validate();
  validate_rows(rows, class_count);
  auto scaler = cfg.standardize ? Standardizer::fit(rows) : Standardizer::identity(rows.dim);
  auto scaled = scaler.apply(rows);
  return std::make_unique<KnnModel>(cfg, std::move(scaler), std::move(scaled), class_count);
}

}  // namespace pairfeat
