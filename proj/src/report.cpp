#include "pairfeat/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pairfeat/error.hpp"

namespace pairfeat {

namespace {

using nlohmann::ordered_json;

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

constexpr int kMetricDecimals = 6;
// Fast cells finish in well under 10 ms, so two decimals would print zeros.
constexpr int kTimeDecimals = 6;

void append_metrics(std::ostringstream& out, const MetricValues& v) {
  for (std::size_t i = 0; i < MetricValues::size(); ++i) out << ',' << fixed(v[i], kMetricDecimals);
}

std::string metric_header() {
  std::string h;
  for (auto name : MetricValues::kNames) h += "," + std::string(name);
  return h;
}

ordered_json metrics_json(const MetricValues& v) {
  ordered_json j;
  for (std::size_t i = 0; i < MetricValues::size(); ++i) j[std::string(MetricValues::kNames[i])] = v[i];
  return j;
}

ordered_json report_json_object(const MetricsReport& r, std::span<const std::string> names) {
  ordered_json j;
  j["macro"] = metrics_json(r.macro);
  ordered_json classes = ordered_json::array();
  for (std::size_t c = 0; c < r.per_class.size(); ++c) {
    const auto& pc = r.per_class[c];
    ordered_json e;
    e["class"] = c < names.size() ? names[c] : std::to_string(c);
    e["tp"] = pc.tp;
    e["fn"] = pc.fn;
    e["fp"] = pc.fp;
    e["tn"] = pc.tn;
    e["metrics"] = metrics_json(pc.values);
    e["no_positives"] = pc.no_positives;
    e["no_predictions"] = pc.no_predictions;
    e["specificity_undefined"] = pc.specificity_undefined;
    classes.push_back(std::move(e));
  }
  j["per_class"] = std::move(classes);
  j["train_seconds"] = r.train_seconds;
  j["test_seconds"] = r.test_seconds;
  j["degenerate"] = r.degenerate;
  return j;
}

std::string file_stem(const std::string& run_id, const ProtocolResult& r) {
  return run_id + "_" + std::string(to_string(r.mode)) + "_" + r.classifier;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::UnreadableFile, "write failed for " + path.string());
}

}  // namespace

std::string metrics_csv(const ProtocolResult& result, std::span<const std::string> class_names) {
  std::ostringstream out;
  out << "statistic,class" << metric_header() << '\n';
  const std::pair<const char*, const MetricsReport*> stats[] = {{"average", &result.average},
                                                                 {"maximum", &result.maximum}};
  for (const auto& [label, report] : stats) {
    out << label << ",macro";
    append_metrics(out, report->macro);
    out << '\n';
    for (std::size_t c = 0; c < report->per_class.size(); ++c) {
      out << label << ',' << (c < class_names.size() ? class_names[c] : std::to_string(c));
      append_metrics(out, report->per_class[c].values);
      out << '\n';
    }
  }
  return out.str();
}

std::string confusion_csv(std::span<const double> grid, std::span<const std::string> class_names) {
  const std::size_t k = class_names.size();
  if (grid.size() != k * k) throw Error(ErrorCode::DimensionMismatch, "confusion grid must be K x K");
  std::ostringstream out;
  out << "true\\predicted";
  for (const auto& n : class_names) out << ',' << n;
  out << '\n';
  for (std::size_t t = 0; t < k; ++t) {
    out << class_names[t];
    for (std::size_t p = 0; p < k; ++p) out << ',' << fixed(grid[t * k + p], kMetricDecimals);
    out << '\n';
  }
  return out.str();
}

std::string summary_csv(const ComparisonReport& report, bool maximum) {
  std::ostringstream out;
  out << "classifier,mode" << metric_header() << '\n';
  for (const auto& cmp : report.classifiers) {
    for (const auto& r : cmp.results) {
      out << cmp.classifier << ',' << to_string(r.mode);
      append_metrics(out, maximum ? r.maximum.macro : r.average.macro);
      out << '\n';
    }
  }
  return out.str();
}

std::string deltas_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "classifier,statistic" << metric_header() << '\n';
  for (const auto& cmp : report.classifiers) {
    if (!cmp.has_delta) continue;
    out << cmp.classifier << ",average";
    append_metrics(out, cmp.delta_average);
    out << '\n' << cmp.classifier << ",maximum";
    append_metrics(out, cmp.delta_maximum);
    out << '\n';
  }
  return out.str();
}

std::string timing_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "phase,mode";
  for (const auto& cmp : report.classifiers) out << ',' << cmp.classifier;
  out << '\n';
  for (const bool train : {true, false}) {
    const char* phase = train ? "train_seconds" : "test_seconds";
    for (JoinMode mode : report.modes) {
      out << phase << ',' << to_string(mode);
      for (const auto& cmp : report.classifiers) {
        const auto* r = cmp.find(mode);
        const double v = r ? (train ? r->average.train_seconds : r->average.test_seconds) : 0.0;
        out << ',' << fixed(v, kTimeDecimals);
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string report_json(const ComparisonReport& report, std::span<const std::string> class_names,
                        const std::string& run_id) {
  ordered_json j;
  j["run_id"] = run_id;
  j["classes"] = std::vector<std::string>(class_names.begin(), class_names.end());
  ordered_json modes = ordered_json::array();
  for (JoinMode m : report.modes) modes.push_back(std::string(to_string(m)));
  j["modes"] = modes;

  ordered_json images = ordered_json::array();
  for (std::size_t i = 0; i < report.image_ids.size(); ++i) {
    ordered_json e;
    e["image_id"] = report.image_ids[i];
    ordered_json rows;
    for (std::size_t m = 0; m < report.modes.size(); ++m) {
      rows[std::string(to_string(report.modes[m]))] = report.rows_per_image[m][i];
    }
    e["rows"] = std::move(rows);
    images.push_back(std::move(e));
  }
  j["images"] = std::move(images);
  j["degenerate_pairing"] = report.degenerate_images;

  ordered_json classifiers = ordered_json::array();
  for (const auto& cmp : report.classifiers) {
    ordered_json c;
    c["classifier"] = cmp.classifier;
    ordered_json results = ordered_json::array();
    for (const auto& r : cmp.results) {
      ordered_json e;
      e["mode"] = std::string(to_string(r.mode));
      e["average"] = report_json_object(r.average, class_names);
      e["maximum"] = report_json_object(r.maximum, class_names);
      e["mean_confusion"] = r.mean_confusion;
      e["mean_confusion_row_normalized"] = r.mean_confusion_row_normalized;
      ordered_json matrices = ordered_json::array();
      for (const auto& cm : r.matrices) matrices.push_back(cm.counts());
      e["confusion_matrices"] = std::move(matrices);
      ordered_json repeats = ordered_json::array();
      for (const auto& rep : r.repeats) {
        ordered_json x = metrics_json(rep.macro);
        x["train_seconds"] = rep.train_seconds;
        x["test_seconds"] = rep.test_seconds;
        repeats.push_back(std::move(x));
      }
      e["repeats"] = std::move(repeats);
      results.push_back(std::move(e));
    }
    c["results"] = std::move(results);
    if (cmp.has_delta) {
      c["delta_average"] = metrics_json(cmp.delta_average);
      c["delta_maximum"] = metrics_json(cmp.delta_maximum);
    }
    classifiers.push_back(std::move(c));
  }
  j["classifiers"] = std::move(classifiers);
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir, const std::string& run_id,
                                                const ComparisonReport& report,
                                                std::span<const std::string> class_names) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const auto emit = [&](const std::string& name, const std::string& text) {
    written.push_back(dir / name);
    write_text(written.back(), text);
  };
  for (const auto& cmp : report.classifiers) {
    for (const auto& r : cmp.results) {
      const auto stem = file_stem(run_id, r);
      emit(stem + "_metrics.csv", metrics_csv(r, class_names));
      emit(stem + "_confusion_mean.csv", confusion_csv(r.mean_confusion, class_names));
      emit(stem + "_confusion_row_normalized.csv", confusion_csv(r.mean_confusion_row_normalized, class_names));
    }
  }
  emit(run_id + "_summary_avg.csv", summary_csv(report, false));
  emit(run_id + "_summary_max.csv", summary_csv(report, true));
  emit(run_id + "_deltas.csv", deltas_csv(report));
  emit(run_id + "_timing.csv", timing_csv(report));
  emit(run_id + "_report.json", report_json(report, class_names, run_id));
  return written;
}

}  // namespace pairfeat
