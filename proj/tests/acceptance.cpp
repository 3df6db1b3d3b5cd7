// Acceptance runner: prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pairfeat/classifiers.hpp"
#include "pairfeat/corners.hpp"
#include "pairfeat/delaunay.hpp"
#include "pairfeat/error.hpp"
#include "pairfeat/knn.hpp"
#include "pairfeat/linear_svm.hpp"
#include "pairfeat/metrics.hpp"
#include "pairfeat/pairing.hpp"
#include "pairfeat/pipeline.hpp"
#include "pairfeat/protocol.hpp"
#include "pairfeat/random_forest.hpp"
#include "pairfeat/report.hpp"
#include "pairfeat/synthetic.hpp"
#include "support.hpp"

using namespace pairfeat;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

// `prior_seconds` is work done for this criterion before the check ran.
void report(int id, const std::string& name, const std::function<Outcome()>& check, double limit_seconds = 0.0,
            double prior_seconds = 0.0) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = prior_seconds + std::chrono::duration<double>(Clock::now() - start).count();
  if (limit_seconds > 0.0 && secs >= limit_seconds) {
    o.pass = false;
    o.detail += "; exceeded " + std::to_string(limit_seconds) + " s";
  }
  failures += !o.pass;
  std::printf("criterion %d %s: %s (%s; %.2f s)\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// ---- criterion 4 helper ---------------------------------------------------

struct PairingCheck {
  std::size_t rows = 0;
  double worst = 0.0;
};

void check_paired_rows(const JointFeatureMap& map, std::span<const FeatureRecord> originals,
                       std::span<const Edge> edges, PairingCheck& acc) {
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& row = map.rows.at(originals.size() + e);
    const auto& a = originals[edges[e].first];
    const auto& b = originals[edges[e].second];
    for (std::size_t i = 0; i < row.vector.size(); ++i) {
      acc.worst = std::max(acc.worst, std::abs(row.vector[i] - (a.vector[i] + b.vector[i]) / 2.0));
    }
    const auto mid = midpoint(a.point, b.point);
    if (row.point.x != mid.x || row.point.y != mid.y) acc.worst = std::max(acc.worst, 1.0);
    ++acc.rows;
  }
}

PairingCheck pairing_totals;

// ---- criterion 7 / 8 / 9 shared state -------------------------------------

struct Benchmark {
  FeatureDataset dataset;
  ComparisonReport timed;
  double seconds = 0.0;
};

const std::vector<JoinMode> kAllModes = {JoinMode::NonPaired, JoinMode::Paired, JoinMode::Horizontal};

std::vector<ClassifierConfig> benchmark_classifiers() { return {KnnConfig{}, LinearSvmConfig{}, ForestConfig{}}; }

ProtocolConfig benchmark_protocol(bool canonical) {
  ProtocolConfig p;
  p.repeats = 10;
  p.split = 0.5;
  p.seed = 2024;
  p.canonical = canonical;
  return p;
}

FeatureDataset features_from_disk(const fs::path& root) {
  const PipelineConfig cfg;
  const auto index = scan_dataset(root);
  const auto det = detect_dataset(index, cfg);
  return build_feature_dataset(index, det, cfg);
}

std::map<std::string, std::string> report_files(const fs::path& dir, const ComparisonReport& r,
                                                const std::vector<std::string>& names) {
  std::map<std::string, std::string> out;
  for (const auto& p : write_report(dir, "bench", r, names)) {
    std::ifstream in(p, std::ios::binary);
    out[p.filename().string()] = {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
  return out;
}

void zero_timings(ComparisonReport& r) {
  auto clear = [](MetricsReport& m) { m.train_seconds = m.test_seconds = 0.0; };
  for (auto& c : r.classifiers) {
    for (auto& res : c.results) {
      clear(res.average);
      clear(res.maximum);
      for (auto& rep : res.repeats) clear(rep);
    }
  }
}

}  // namespace

int main() {
  std::printf("pairfeat acceptance run\n");

  report(1, "Shi-Tomasi score field matches brute-force oracle", [] {
    const CornerConfig cfg;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto img = testsupport::random_image(32, 32, 1000 + seed);
      const auto field = score_field(img, cfg);
      for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
          worst = std::max(worst, std::abs(field.at(x, y) - oracle::shi_tomasi(img, x, y, cfg.window_radius)));
    }
    return Outcome{worst <= 1e-6, fmt("100 images, max abs error %.3g, tolerance 1e-6", worst)};
  }, 10.0);

  report(2, "white square yields its four vertices", [] {
    Rng rng(77);
    int good = 0;
    std::string first_bad;
    for (int trial = 0; trial < 20; ++trial) {
      const int size = 120;
      const int side = 12 + static_cast<int>(rng.below(29));
      const int x0 = 10 + static_cast<int>(rng.below(static_cast<std::uint64_t>(size - side - 19)));
      const int y0 = 10 + static_cast<int>(rng.below(static_cast<std::uint64_t>(size - side - 19)));
      const auto pts = detect(white_square_image(size, side, x0, y0), {});
      const int x1 = x0 + side - 1, y1 = y0 + side - 1;
      const std::pair<int, int> verts[] = {{x0, y0}, {x1, y0}, {x0, y1}, {x1, y1}};
      bool ok = pts.size() == 4;
      for (const auto& [vx, vy] : verts) {
        ok = ok && std::any_of(pts.begin(), pts.end(),
                               [&](const InterestPoint& p) { return std::hypot(p.x - vx, p.y - vy) <= 2.0; });
      }
      good += ok;
      if (!ok && first_bad.empty()) first_bad = fmt("; trial %d found %zu points", trial, pts.size());
    }
    return Outcome{good == 20, fmt("%d/20 placements exact", good) + first_bad};
  });

  report(3, "Delaunay passes in-circle and Euler oracles", [] {
    Rng rng(3);
    int passed = 0;
    std::string first_bad;
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n = 3 + rng.below(48);
      std::vector<Point2> pts(n);
      const double extent = trial % 3 == 0 ? 1.0 : trial % 3 == 1 ? 100.0 : 480.0;
      for (auto& p : pts) p = {rng.uniform() * extent, rng.uniform() * extent};
      const auto t = delaunay(pts);
      const auto c = oracle::check_triangulation(pts, t);
      const bool ok = c.ccw && c.empty_circles && c.euler && c.edges_consistent;
      passed += ok;
      if (!ok && first_bad.empty()) first_bad = fmt("; set %d: ", trial) + c.detail;

      // Reuse the sets for criterion 4: random descriptors on every point.
      std::vector<FeatureRecord> recs;
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(8);
        for (auto& x : v) x = rng.normal() * 100.0;
        recs.push_back({"set", static_cast<std::uint32_t>(i), pts[i], Origin::Original, std::move(v)});
      }
      check_paired_rows(build_joint_map(recs, t, JoinMode::Paired), recs, t.edges, pairing_totals);
    }
    return Outcome{passed == 1000, fmt("%d/1000 random sets, n in [3, 50]", passed) + first_bad};
  }, 30.0);

  // Criterion 7 data. Built before criterion 4 so its paired rows are checked too.
  Benchmark bench;
  testsupport::TempDir work;
  std::string bench_error;
  {
    const auto start = Clock::now();
    try {
      write_synthetic_dataset(work / "synthetic", SyntheticConfig{});
      bench.dataset = features_from_disk(work / "synthetic");
      bench.timed = compare_modes(bench.dataset, benchmark_classifiers(), benchmark_protocol(false), kAllModes);
    } catch (const std::exception& e) {
      bench_error = e.what();
    }
    bench.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  }

  report(4, "paired rows equal endpoint means", [&] {
    for (const auto& s : bench.dataset.samples) {
      const auto map = build_joint_map(s.records, s.graph.edges, JoinMode::Paired);
      check_paired_rows(map, s.records, s.graph.edges, pairing_totals);
    }
    return Outcome{pairing_totals.rows > 0 && pairing_totals.worst <= 1e-12,
                   fmt("%zu paired rows (random sets and benchmark), max deviation %.3g, tolerance 1e-12",
                       pairing_totals.rows, pairing_totals.worst)};
  });

  report(5, "metrics agree with independent implementation", [] {
    const auto hand = metrics_from_confusion(ConfusionMatrix(2, {5, 5, 0, 10})).macro;
    const bool exact = hand.accuracy == 0.75 && hand.recall == 0.75 && hand.specificity == 0.75 &&
                       std::abs(hand.precision - 5.0 / 6.0) <= 1e-15 && std::abs(hand.f1 - 11.0 / 15.0) <= 1e-15;
    Rng rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t k = 1 + rng.below(10);
      std::vector<std::vector<std::uint64_t>> nested(k, std::vector<std::uint64_t>(k));
      std::vector<std::uint64_t> flat;
      for (auto& row : nested)
        for (auto& v : row) {
          v = rng.below(5) == 0 ? 0 : rng.below(100);
          flat.push_back(v);
        }
      nested[0][0] += 1;
      flat[0] += 1;
      const auto got = metrics_from_confusion(ConfusionMatrix(k, flat)).macro;
      const auto want = oracle::macro_metrics(nested);
      worst = std::max({worst, std::abs(got.accuracy - want.accuracy), std::abs(got.f1 - want.f1),
                        std::abs(got.recall - want.recall), std::abs(got.precision - want.precision),
                        std::abs(got.specificity - want.specificity)});
    }
    return Outcome{exact && worst <= 1e-12,
                   fmt("[[5,5],[0,10]] %s; 1000 random matrices max error %.3g, tolerance 1e-12",
                       exact ? "exact" : "MISMATCH", worst)};
  });

  report(6, "classifier sanity", [] {
    Rng rng(6);
    int kd_mismatch = 0, kd_queries = 0;
    for (std::size_t dim : {1u, 2u, 3u, 4u, 8u, 12u, 16u, 1000u}) {
      for (int trial = 0; trial < (dim == 1000 ? 5 : 25); ++trial) {
        const std::size_t n = 1 + rng.below(200);
        const bool grid = trial % 2 == 0;
        std::vector<double> pts(n * dim);
        for (auto& v : pts) v = grid ? static_cast<double>(rng.below(3)) : rng.normal();
        const KdTree tree(pts, dim);
        for (int q = 0; q < 20; ++q) {
          std::vector<double> query(dim);
          for (auto& v : query) v = grid ? static_cast<double>(rng.below(3)) : rng.normal();
          const std::size_t k = 1 + rng.below(30);
          kd_mismatch += tree.query(query, k) != brute_force_neighbors(pts, dim, query, k);
          ++kd_queries;
        }
      }
    }

    auto accuracy = [](const Model& m, const RowSet& rows) {
      const auto preds = m.predict_rows(rows);
      std::size_t hit = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) hit += preds[i].label == rows.labels[i];
      return static_cast<double>(hit) / static_cast<double>(rows.size());
    };
    const auto blobs = testsupport::blobs(50, 2, 10.0, 60);
    const double svm_blobs = accuracy(*train_linear_svm(blobs, {}, 2), blobs);
    RowSet xor_rows(2);
    xor_rows.add(std::vector<double>{0, 0}, 0);
    xor_rows.add(std::vector<double>{1, 1}, 0);
    xor_rows.add(std::vector<double>{0, 1}, 1);
    xor_rows.add(std::vector<double>{1, 0}, 1);
    const double svm_xor = accuracy(*train_linear_svm(xor_rows, {}, 2), xor_rows);
    ForestConfig fc;
    fc.seed = 6;
    const double oob = train_forest(blobs, fc, 2)->oob_accuracy();

    const bool ok = kd_mismatch == 0 && svm_blobs == 1.0 && svm_xor <= 0.75 && oob >= 0.99;
    return Outcome{ok, fmt("kd-tree vs brute force %d/%d mismatches; SVM blobs %.3f (need 1), XOR %.2f (need <= "
                           "0.75); forest OOB %.3f (need >= 0.99)",
                           kd_mismatch, kd_queries, svm_blobs, svm_xor, oob)};
  });

  report(7, "synthetic end-to-end benchmark", [&] {
    if (!bench_error.empty()) return Outcome{false, "pipeline failed: " + bench_error};
    std::string detail;
    bool ok = true;

    // (a) every classifier ran in every mode.
    std::size_t runs = 0;
    for (const auto& c : bench.timed.classifiers)
      for (auto m : kAllModes) runs += c.find(m) != nullptr && c.find(m)->matrices.size() == 10;
    ok = ok && runs == 9;
    detail += fmt("(a) %zu/9 classifier x mode runs", runs);

    // (b) paired rows per image = n + E.
    const auto paired_at = static_cast<std::size_t>(
        std::find(bench.timed.modes.begin(), bench.timed.modes.end(), JoinMode::Paired) - bench.timed.modes.begin());
    std::size_t exact_rows = 0;
    for (std::size_t i = 0; i < bench.dataset.samples.size(); ++i) {
      const auto& s = bench.dataset.samples[i];
      std::vector<Point2> pts;
      for (const auto& r : s.records) pts.push_back(r.point);
      std::size_t edges = 0;
      try {
        edges = delaunay(pts).edges.size();
      } catch (const Error&) {
        edges = pts.size() - 1;  // path fallback
      }
      exact_rows += bench.timed.rows_per_image[paired_at][i] == s.records.size() + edges;
    }
    ok = ok && exact_rows == bench.dataset.samples.size();
    detail += fmt("; (b) %zu/%zu images with n + E rows", exact_rows, bench.dataset.samples.size());

    // (c) a second full run, canonical, gives the same report bytes.
    auto canonical_dataset = features_from_disk(work / "synthetic");
    auto canonical =
        compare_modes(canonical_dataset, benchmark_classifiers(), benchmark_protocol(true), kAllModes);
    auto timed_zeroed = bench.timed;
    zero_timings(timed_zeroed);
    const auto a = report_files(work / "report_a", timed_zeroed, bench.dataset.class_names);
    const auto b = report_files(work / "report_b", canonical, canonical_dataset.class_names);
    const bool same = a == b && !a.empty();
    ok = ok && same;
    detail += fmt("; (c) %zu report files %s", a.size(), same ? "byte-identical" : "DIFFER");

    // (d) paired macro-F1 >= non-paired macro-F1 - 0.02.
    detail += "; (d)";
    for (const auto& c : bench.timed.classifiers) {
      const double paired = c.find(JoinMode::Paired)->average.macro.f1;
      const double plain = c.find(JoinMode::NonPaired)->average.macro.f1;
      const bool dir_ok = paired >= plain - 0.02;
      ok = ok && dir_ok;
      detail += fmt(" %s %.4f vs %.4f%s", c.classifier.c_str(), paired, plain, dir_ok ? "" : " FAIL");
    }
    detail += fmt("; first run %.1f s", bench.seconds);
    return Outcome{ok, detail};
  }, 600.0, bench.seconds);

  report(8, "timing table has positive cells", [&] {
    if (!bench_error.empty()) return Outcome{false, "benchmark did not run"};
    std::istringstream csv(timing_csv(bench.timed));
    std::string line;
    std::getline(csv, line);
    const std::string header = line;
    std::size_t cells = 0, positive = 0, rows = 0;
    while (std::getline(csv, line)) {
      ++rows;
      std::istringstream fields(line);
      std::string f;
      int col = 0;
      while (std::getline(fields, f, ',')) {
        if (col++ < 2) continue;
        ++cells;
        positive += std::stod(f) > 0.0;
      }
    }
    return Outcome{cells == 18 && positive == cells,
                   fmt("%zu rows, %zu/%zu cells positive; header: ", rows, positive, cells) + header};
  });

  report(9, "vertical stacking beats horizontal concatenation", [&] {
    if (!bench_error.empty()) return Outcome{false, "benchmark did not run"};
    FeatureDataset two;
    two.class_count = 2;
    two.class_names = {bench.dataset.class_names[0], bench.dataset.class_names[1]};
    two.horizontal_slots = bench.dataset.horizontal_slots;
    for (const auto& s : bench.dataset.samples)
      if (s.label < 2) two.samples.push_back(s);
    const std::vector<ClassifierConfig> svm = {LinearSvmConfig{}};
    auto proto = benchmark_protocol(true);
    const auto r = compare_modes(two, svm, proto, {JoinMode::NonPaired, JoinMode::Horizontal});
    const auto* vertical = r.classifiers[0].find(JoinMode::NonPaired);
    const auto* horizontal = r.classifiers[0].find(JoinMode::Horizontal);
    int wins = 0;
    for (int i = 0; i < proto.repeats; ++i)
      wins += vertical->repeats[i].macro.accuracy >= horizontal->repeats[i].macro.accuracy;
    return Outcome{wins >= 8, fmt("vertical >= horizontal in %d/10 repeats (need 8); mean accuracy %.4f vs %.4f",
                                  wins, vertical->average.macro.accuracy, horizontal->average.macro.accuracy)};
  });

  std::printf("%s: %d failing criteria\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
