#include "pairfeat/linear_svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "internal/binary_io.hpp"
#include "pairfeat/error.hpp"
#include "pairfeat/random.hpp"

namespace pairfeat {

void LinearSvmConfig::validate() const {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "SVM regularization C must be > 0");
  if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "SVM tolerance must be > 0");
  if (max_epochs < 1) throw Error(ErrorCode::InvalidArgument, "SVM max_epochs must be >= 1");
}

namespace {

// Rows with a trailing constant 1 so the bias is the last weight.
struct AugmentedRows {
  std::size_t width = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * width, width);
  }
};

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double objective(std::span<const double> w, const AugmentedRows& x, std::span<const double> y,
                 double lambda) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) hinge += std::max(0.0, 1.0 - y[i] * dot(w, x.row(i)));
  return 0.5 * lambda * dot(w, w) + hinge / static_cast<double>(y.size());
}

SvmHead train_head(const AugmentedRows& x, std::span<const double> y, const LinearSvmConfig& cfg) {
  const std::size_t n = y.size();
  const std::size_t width = x.width;
  const double lambda = 1.0 / (cfg.c * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);

  SvmHead head;
  std::vector<double> model(width, 0.0);
  std::vector<double> w(width, 0.0);
  std::vector<double> mean(width);
  double best = objective(model, x, y, lambda);
  head.objective_history.push_back(best);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(cfg.seed));
  double t = 1.0;
  double previous = best;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t i : order) {
      const auto xi = x.row(i);
      const double margin = y[i] * dot(w, xi);
      const double eta = 1.0 / (lambda * t);
      const double shrink = 1.0 - 1.0 / t;
      for (double& v : w) v *= shrink;
      if (margin < 1.0) {
        const double step = eta * y[i];
        for (std::size_t j = 0; j < width; ++j) w[j] += step * xi[j];
      }
      const double norm = std::sqrt(dot(w, w));
      if (norm > radius) {
        for (double& v : w) v *= radius / norm;
      }
      for (std::size_t j = 0; j < width; ++j) mean[j] += w[j];
      t += 1.0;
    }
    for (double& v : mean) v /= static_cast<double>(n);

    // Early epochs take very large steps, so their averages can be worse
    // than the zero model. Convergence is judged on successive epoch
    // averages while the returned model is the best one seen.
    const double candidate = objective(mean, x, y, lambda);
    head.epochs_run = epoch + 1;
    if (candidate < best) {
      model = mean;
      best = candidate;
    }
    head.objective_history.push_back(best);
    if (epoch > 0 && std::abs(previous - candidate) < cfg.tolerance) break;
    previous = candidate;
  }

  head.bias = model.back();
  model.pop_back();
  head.weights = std::move(model);
  return head;
}

}  // namespace

LinearSvmModel::LinearSvmModel(LinearSvmConfig cfg, Standardizer scaler, std::vector<SvmHead> heads,
                               std::size_t dim)
    : cfg_(cfg), scaler_(std::move(scaler)), heads_(std::move(heads)), dim_(dim) {}

std::vector<double> LinearSvmModel::decision_values(std::span<const double> row) const {
  check_dim(row.size());
  const auto q = scaler_.apply(row);
  std::vector<double> out(heads_.size());
  for (std::size_t c = 0; c < heads_.size(); ++c) out[c] = dot(heads_[c].weights, q) + heads_[c].bias;
  return out;
}

Prediction LinearSvmModel::predict(std::span<const double> row) const {
  const auto f = decision_values(row);
  Prediction p;
  p.label = argmax_label(f);
  // Softmax of decision values, shifted for stability.
  const double top = f[p.label];
  p.scores.resize(f.size());
  double total = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c) {
    p.scores[c] = std::exp(f[c] - top);
    total += p.scores[c];
  }
  for (double& s : p.scores) s /= total;
  return p;
}

void LinearSvmModel::save_payload(internal::ByteWriter& w) const {
  w.put<double>(cfg_.c);
  w.put<double>(cfg_.tolerance);
  w.put<std::int32_t>(cfg_.max_epochs);
  w.put<std::uint64_t>(cfg_.seed);
  w.put<std::uint8_t>(cfg_.standardize ? 1 : 0);
  w.put<std::uint64_t>(dim_);
  scaler_.save(w);
  w.put<std::uint64_t>(heads_.size());
  for (const auto& h : heads_) {
    w.put_vector<double>(h.weights);
    w.put<double>(h.bias);
    w.put_vector<double>(h.objective_history);
    w.put<std::int32_t>(h.epochs_run);
  }
}

std::unique_ptr<LinearSvmModel> LinearSvmModel::load_payload(internal::ByteReader& r) {
  LinearSvmConfig cfg;
  cfg.c = r.get<double>();
  cfg.tolerance = r.get<double>();
  cfg.max_epochs = r.get<std::int32_t>();
  cfg.seed = r.get<std::uint64_t>();
  cfg.standardize = r.get<std::uint8_t>() != 0;
  cfg.validate();
  const auto dim = r.get<std::uint64_t>();
  auto scaler = Standardizer::load(r);
  const auto count = r.get<std::uint64_t>();
  if (count > 1'000'000) throw Error(ErrorCode::CorruptModel, "implausible SVM head count");
  std::vector<SvmHead> heads(count);
  for (auto& h : heads) {
    h.weights = r.get_vector<double>();
    h.bias = r.get<double>();
    h.objective_history = r.get_vector<double>();
    h.epochs_run = r.get<std::int32_t>();
    if (h.weights.size() != dim) throw Error(ErrorCode::CorruptModel, "SVM head dimension mismatch");
  }
  if (scaler.dim() != dim) throw Error(ErrorCode::CorruptModel, "SVM scaler dimension mismatch");
  return std::make_unique<LinearSvmModel>(cfg, std::move(scaler), std::move(heads), dim);
}

std::unique_ptr<LinearSvmModel> train_linear_svm(const RowSet& rows, const LinearSvmConfig& cfg,
                                                 std::size_t class_count) {
  cfg.validate();
  validate_rows(rows, class_count);
  const std::set<int> present(rows.labels.begin(), rows.labels.end());
  if (present.size() < 2) {
    throw Error(ErrorCode::SingleClass, "linear SVM needs at least two classes in the training rows");
  }

  auto scaler = cfg.standardize ? Standardizer::fit(rows) : Standardizer::identity(rows.dim);
  AugmentedRows x{rows.dim + 1, {}};
  x.values.reserve(rows.size() * x.width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto s = scaler.apply(rows.row(i));
    x.values.insert(x.values.end(), s.begin(), s.end());
    x.values.push_back(1.0);
  }

  std::vector<SvmHead> heads;
  heads.reserve(class_count);
  std::vector<double> y(rows.size());
  for (std::size_t c = 0; c < class_count; ++c) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      y[i] = rows.labels[i] == static_cast<int>(c) ? 1.0 : -1.0;
    }
    heads.push_back(train_head(x, y, cfg));
  }
  return std::make_unique<LinearSvmModel>(cfg, std::move(scaler), std::move(heads), rows.dim);
}

}  // namespace pairfeat
