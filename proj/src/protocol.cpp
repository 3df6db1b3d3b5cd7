#include "pairfeat/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pairfeat/error.hpp"
#include "pairfeat/random.hpp"

namespace pairfeat {

void ProtocolConfig::validate() const {
  if (repeats < 1) throw Error(ErrorCode::InvalidArgument, "protocol repeats must be >= 1");
  if (!(split > 0.0 && split < 1.0)) throw Error(ErrorCode::InvalidArgument, "protocol split must lie in (0, 1)");
}

void LabeledDataset::validate() const {
  if (maps.empty()) throw Error(ErrorCode::EmptyInput, "dataset has no images");
  if (maps.size() != labels.size()) throw Error(ErrorCode::CountMismatch, "one label per map required");
  const std::size_t d = maps.front().dim;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= class_count) {
      throw Error(ErrorCode::InvalidArgument, "label out of range for image " + maps[i].image_id);
    }
    if (maps[i].rows.empty()) throw Error(ErrorCode::EmptyInput, "empty feature map for " + maps[i].image_id);
    if (maps[i].dim != d) throw Error(ErrorCode::DimensionMismatch, "feature width differs for " + maps[i].image_id);
    for (const auto& r : maps[i].rows) {
      if (r.vector.size() != d) throw Error(ErrorCode::DimensionMismatch, "row width differs in " + maps[i].image_id);
    }
  }
}

LabeledDataset FeatureDataset::joint(JoinMode mode) const {
  std::size_t slots = horizontal_slots;
  if (slots == 0) {
    for (const auto& s : samples) slots = std::max(slots, s.records.size());
  }
  LabeledDataset ds;
  ds.class_count = class_count;
  ds.maps.reserve(samples.size());
  for (const auto& s : samples) {
    ds.maps.push_back(build_joint_map(s.records, s.graph.edges, mode, slots));
    ds.labels.push_back(s.label);
  }
  return ds;
}

SplitIndices split_images(std::span<const int> labels, std::size_t class_count, const ProtocolConfig& proto,
                          int repeat) {
  proto.validate();
  Rng rng(proto.seed + static_cast<std::uint64_t>(repeat));
  SplitIndices out;

  const auto take = [&](std::vector<std::size_t>& members) {
    rng.shuffle(std::span<std::size_t>(members));
    const auto n = members.size();
    auto n_train = static_cast<std::size_t>(std::floor(proto.split * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  };

  if (proto.stratified) {
    for (std::size_t c = 0; c < class_count; ++c) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == static_cast<int>(c)) members.push_back(i);
      }
      if (members.size() >= 2) take(members);
    }
  } else {
    std::vector<std::size_t> all(labels.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    if (all.size() >= 2) take(all);
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void accumulate_report(MetricsReport& sum, const MetricsReport& r) {
  if (sum.per_class.empty()) sum.per_class.resize(r.per_class.size());
  for (std::size_t i = 0; i < MetricValues::size(); ++i) sum.macro[i] += r.macro[i];
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    for (std::size_t i = 0; i < MetricValues::size(); ++i) sum.per_class[c].values[i] += r.per_class[c].values[i];
  }
  sum.train_seconds += r.train_seconds;
  sum.test_seconds += r.test_seconds;
  sum.degenerate = sum.degenerate || r.degenerate;
}

void max_report(MetricsReport& best, const MetricsReport& r, bool first) {
  if (first) {
    best = r;
    return;
  }
  for (std::size_t i = 0; i < MetricValues::size(); ++i) best.macro[i] = std::max(best.macro[i], r.macro[i]);
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    for (std::size_t i = 0; i < MetricValues::size(); ++i) {
      best.per_class[c].values[i] = std::max(best.per_class[c].values[i], r.per_class[c].values[i]);
    }
  }
  best.train_seconds = std::max(best.train_seconds, r.train_seconds);
  best.test_seconds = std::max(best.test_seconds, r.test_seconds);
  best.degenerate = best.degenerate || r.degenerate;
}

}  // namespace

ProtocolResult run_protocol(const LabeledDataset& ds, JoinMode mode, const ClassifierConfig& clf,
                            const ProtocolConfig& proto) {
  proto.validate();
  ds.validate();
  const std::size_t k = ds.class_count;
  std::vector<std::size_t> per_class(k, 0);
  for (int label : ds.labels) ++per_class[label];
  for (std::size_t c = 0; c < k; ++c) {
    if (per_class[c] < 2) {
      throw Error(ErrorCode::InsufficientClassImages,
                  "class " + std::to_string(c) + " has " + std::to_string(per_class[c]) + " image(s); need >= 2");
    }
  }

  ProtocolResult result;
  result.mode = mode;
  result.classifier = classifier_name(clf);
  MetricsReport sum;

  for (int r = 0; r < proto.repeats; ++r) {
    const auto split = split_images(ds.labels, k, proto, r);

    RowSet train_rows(ds.dim());
    for (std::size_t i : split.train) {
      for (const auto& row : ds.maps[i].rows) train_rows.add(row.vector, ds.labels[i]);
    }
    const auto train_start = Clock::now();
    const auto model = train(clf, train_rows, k);
    const double train_seconds = seconds_since(train_start);

    ConfusionMatrix cm(k);
    const auto test_start = Clock::now();
    for (std::size_t i : split.test) {
      const auto pred = predict_image(*model, ds.maps[i], proto.aggregation);
      cm.add(static_cast<std::size_t>(ds.labels[i]), static_cast<std::size_t>(pred.label));
    }
    const double test_seconds = seconds_since(test_start);

    auto report = metrics_from_confusion(cm);
    report.train_seconds = proto.canonical ? 0.0 : train_seconds;
    report.test_seconds = proto.canonical ? 0.0 : test_seconds;

    accumulate_report(sum, report);
    max_report(result.maximum, report, r == 0);
    result.repeats.push_back(std::move(report));
    result.matrices.push_back(std::move(cm));
  }

  const auto n = static_cast<double>(proto.repeats);
  result.average = sum;
  for (std::size_t i = 0; i < MetricValues::size(); ++i) result.average.macro[i] /= n;
  for (auto& pc : result.average.per_class) {
    for (std::size_t i = 0; i < MetricValues::size(); ++i) pc.values[i] /= n;
  }
  result.average.train_seconds /= n;
  result.average.test_seconds /= n;

  result.mean_confusion.assign(k * k, 0.0);
  for (const auto& cm : result.matrices) {
    for (std::size_t i = 0; i < k * k; ++i) result.mean_confusion[i] += static_cast<double>(cm.counts()[i]);
  }
  for (double& v : result.mean_confusion) v /= n;
  result.mean_confusion_row_normalized = result.mean_confusion;
  for (std::size_t t = 0; t < k; ++t) {
    double row = 0.0;
    for (std::size_t p = 0; p < k; ++p) row += result.mean_confusion[t * k + p];
    if (row > 0.0) {
      for (std::size_t p = 0; p < k; ++p) result.mean_confusion_row_normalized[t * k + p] /= row;
    }
  }
  return result;
}

const ProtocolResult* ModeComparison::find(JoinMode mode) const noexcept {
  for (const auto& r : results) {
    if (r.mode == mode) return &r;
  }
  return nullptr;
}

ComparisonReport compare_modes(const FeatureDataset& ds, std::span<const ClassifierConfig> classifiers,
                               const ProtocolConfig& proto, std::vector<JoinMode> modes) {
  proto.validate();
  if (modes.empty()) throw Error(ErrorCode::InvalidArgument, "compare_modes needs at least one mode");
  ComparisonReport report;
  report.modes = modes;
  for (const auto& s : ds.samples) {
    report.image_ids.push_back(s.image_id);
    if (s.graph.degenerate) report.degenerate_images.push_back(s.image_id);
  }

  std::vector<LabeledDataset> joint;
  joint.reserve(modes.size());
  for (JoinMode m : modes) {
    joint.push_back(ds.joint(m));
    std::vector<std::size_t> counts;
    for (const auto& map : joint.back().maps) counts.push_back(map.rows.size());
    report.rows_per_image.push_back(std::move(counts));
  }

  for (const auto& clf : classifiers) {
    ModeComparison cmp;
    cmp.classifier = classifier_name(clf);
    for (std::size_t m = 0; m < modes.size(); ++m) {
      cmp.results.push_back(run_protocol(joint[m], modes[m], clf, proto));
    }
    const auto* paired = cmp.find(JoinMode::Paired);
    const auto* plain = cmp.find(JoinMode::NonPaired);
    if (paired && plain) {
      cmp.has_delta = true;
      for (std::size_t i = 0; i < MetricValues::size(); ++i) {
        cmp.delta_average[i] = paired->average.macro[i] - plain->average.macro[i];
        cmp.delta_maximum[i] = paired->maximum.macro[i] - plain->maximum.macro[i];
      }
    }
    report.classifiers.push_back(std::move(cmp));
  }
  return report;
}

}  // namespace pairfeat
