#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "pairfeat/cli.hpp"
#include "pairfeat/error.hpp"
#include "pairfeat/feature_file.hpp"
#include "pairfeat/run_config.hpp"
#include "pairfeat/synthetic.hpp"
#include "support.hpp"

using namespace pairfeat;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

ErrorCode parse_code(const std::string& json) {
  try {
    parse_run_config(json);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error for " << json;
  return ErrorCode::InvalidArgument;
}

// Small synthetic dataset plus a config that runs in well under a second.
fs::path small_setup(const testsupport::TempDir& dir, const std::string& extra = "") {
  SyntheticConfig sc;
  sc.classes = 2;
  sc.images_per_class = 4;
  sc.width = 160;
  sc.height = 120;
  sc.min_radius = 25;
  sc.max_radius = 40;
  write_synthetic_dataset(dir / "data", sc);
  const auto cfg = dir / "run.json";
  write_text(cfg, R"({"run_id": "t", "dataset_root": "data", "output_dir": "out", "resize": [160, 120],
    "classifiers": [{"type": "knn", "k": 3}, {"type": "linear_svm"}, {"type": "random_forest", "trees": 10}],
    "protocol": {"repeats": 2, "seed": 5})" + extra + "}");
  return cfg;
}

}  // namespace

TEST(RunConfig, DefaultsAndRelativePaths) {
  testsupport::TempDir dir;
  const auto cfg = parse_run_config(R"({"dataset_root": "data"})", dir.path());
  EXPECT_EQ(cfg.dataset_root, dir.path() / "data");
  EXPECT_EQ(cfg.output_dir, dir.path() / "out");
  EXPECT_EQ(cfg.run_id, "run");
  EXPECT_EQ(cfg.mode, JoinMode::Paired);
  EXPECT_EQ(cfg.pipeline.prepare.width, 480);
  EXPECT_EQ(cfg.pipeline.prepare.height, 360);
  EXPECT_EQ(cfg.pipeline.descriptor.dim, 128u);
  ASSERT_EQ(cfg.classifiers.size(), 3u);
  EXPECT_EQ(std::get<KnnConfig>(cfg.classifiers[0]).k, 21);
  EXPECT_EQ(std::get<ForestConfig>(cfg.classifiers[2]).trees, 200);
  EXPECT_EQ(cfg.protocol.repeats, 50);
  EXPECT_EQ(cfg.protocol.split, 0.5);
}

TEST(RunConfig, EchoRoundTrips) {
  const auto cfg = parse_run_config(R"({"dataset_root": "/tmp/x", "mode": "horizontal", "crop": {"x0": 1, "y0": 2,
      "width": 30, "height": 40}, "classifiers": [{"type": "linear_svm", "c": 0.5, "seed": 3}],
      "protocol": {"repeats": 4, "aggregation": "mean_score", "canonical": true}})");
  const auto echo = dump_run_config(cfg);
  const auto again = parse_run_config(echo);
  EXPECT_EQ(dump_run_config(again), echo);
  EXPECT_EQ(again.mode, JoinMode::Horizontal);
  ASSERT_TRUE(again.pipeline.prepare.crop.has_value());
  EXPECT_EQ(again.pipeline.prepare.crop->height, 40);
  EXPECT_EQ(std::get<LinearSvmConfig>(again.classifiers[0]).c, 0.5);
  EXPECT_EQ(again.protocol.aggregation, Aggregation::MeanScore);
}

TEST(RunConfig, SchemaErrors) {
  EXPECT_EQ(parse_code("{"), ErrorCode::InvalidConfig);
  EXPECT_EQ(parse_code("{}"), ErrorCode::InvalidConfig);
  EXPECT_EQ(parse_code(R"({"dataset_root": "d", "modee": "paired"})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(parse_code(R"({"dataset_root": "d", "mode": "sideways"})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(parse_code(R"({"dataset_root": "d", "resize": [1]})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(parse_code(R"({"dataset_root": "d", "protocol": {"repeats": "many"}})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(parse_code(R"({"dataset_root": "d", "classifiers": [{"type": "rbf_svm"}]})"),
            ErrorCode::UnsupportedOption);
  EXPECT_EQ(parse_code(R"({"dataset_root": "d", "classifiers": [{"type": "boosting"}]})"), ErrorCode::InvalidConfig);
}

TEST(Cli, ExitCodeMapping) {
  EXPECT_EQ(exit_code_for(ErrorCode::InvalidConfig), kExitConfig);
  EXPECT_EQ(exit_code_for(ErrorCode::UnsupportedOption), kExitConfig);
  EXPECT_EQ(exit_code_for(ErrorCode::UnreadableFile), kExitData);
  EXPECT_EQ(exit_code_for(ErrorCode::MissingKey), kExitData);
  EXPECT_EQ(exit_code_for(ErrorCode::InsufficientClassImages), kExitData);
  EXPECT_EQ(exit_code_for(ErrorCode::SingleClass), kExitPipeline);
  EXPECT_EQ(exit_code_for(ErrorCode::CorruptModel), kExitPipeline);
}

TEST(Cli, ConfigProblemsExitTwo) {
  testsupport::TempDir dir;
  EXPECT_EQ(cli({"evaluate"}).code, kExitConfig);
  EXPECT_EQ(cli({"bogus"}).code, kExitConfig);
  EXPECT_EQ(cli({"evaluate", "--config", (dir / "none.json").string()}).code, kExitConfig);
  fs::create_directories(dir / "data");
  write_text(dir / "rbf.json", R"({"dataset_root": "data", "classifiers": [{"type": "rbf_svm"}]})");
  const auto r = cli({"evaluate", "--config", (dir / "rbf.json").string()});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("rbf"), std::string::npos);
  write_text(dir / "nodata.json", R"({"dataset_root": "elsewhere"})");
  EXPECT_EQ(cli({"detect", "--config", (dir / "nodata.json").string()}).code, kExitConfig);
  const auto cfg = small_setup(dir);
  EXPECT_EQ(cli({"detect", "--config", cfg.string(), "--mode", "diagonal"}).code, kExitConfig);
}

TEST(Cli, DetectWritesCsvsAndFlagsConstantImage) {
  testsupport::TempDir dir;
  fs::create_directories(dir / "data" / "shapes");
  write_pgm(dir / "data" / "shapes" / "flat.pgm", GrayImage(100, 100, 128.0));
  write_pgm(dir / "data" / "shapes" / "square.pgm", white_square_image(100, 20, 40, 40));
  write_text(dir / "c.json", R"({"run_id": "d", "dataset_root": "data", "resize": [100, 100]})");
  const auto r = cli({"detect", "--config", (dir / "c.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto summary = slurp(dir / "out" / "d_detect_summary.csv");
  EXPECT_NE(summary.find("shapes/flat.pgm,shapes,0,1"), std::string::npos) << summary;
  EXPECT_NE(summary.find("shapes/square.pgm,shapes,4,1"), std::string::npos) << summary;
  const auto square_csv = slurp(dir / "out" / "corners" / "shapes" / "square.csv");
  EXPECT_EQ(line_count(square_csv), 5u) << square_csv;  // header plus four vertices
  EXPECT_TRUE(fs::exists(dir / "out" / "corners" / "shapes" / "flat.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "effective_config.json"));
}

TEST(Cli, FeaturesAreDeterministic) {
  testsupport::TempDir dir;
  fs::create_directories(dir / "data" / "shapes");
  write_pgm(dir / "data" / "shapes" / "a.pgm", white_square_image(100, 20, 40, 40));
  write_pgm(dir / "data" / "shapes" / "b.pgm", white_square_image(100, 25, 20, 30));
  write_text(dir / "c.json", R"({"run_id": "f", "dataset_root": "data", "resize": [100, 100]})");
  ASSERT_EQ(cli({"features", "--config", (dir / "c.json").string()}).code, kExitOk);
  const auto first = slurp(dir / "out" / "f_features.pfv1");
  const auto file = read_features(dir / "out" / "f_features.pfv1");
  EXPECT_EQ(file.records.size(), 8u);
  EXPECT_EQ(file.dim, 128u);
  ASSERT_EQ(cli({"features", "--config", (dir / "c.json").string()}).code, kExitOk);
  EXPECT_EQ(slurp(dir / "out" / "f_features.pfv1"), first);
  const auto joint = read_features(dir / "out" / "f_joint_paired.pfv2");
  EXPECT_EQ(joint.records.size(), 2u * (4 + 5));
}

TEST(Cli, FeaturesReportMissingImportedKey) {
  testsupport::TempDir dir;
  fs::create_directories(dir / "data" / "shapes");
  write_pgm(dir / "data" / "shapes" / "a.pgm", white_square_image(100, 20, 40, 40));
  write_features(dir / "empty.pfv1", std::vector<FeatureRecord>{{"other", 0, {}, Origin::Original,
                                                                  std::vector<double>(kImportedDim, 0.0)}},
                 kImportedDim);
  write_text(dir / "c.json", R"({"dataset_root": "data", "resize": [100, 100],
      "descriptor": {"kind": "imported", "dim": 1000, "import_path": "empty.pfv1"}})");
  const auto r = cli({"features", "--config", (dir / "c.json").string()});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("shapes/a.pgm"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("missing key"), std::string::npos) << r.err;
}

TEST(Cli, CanonicalEvaluateIsByteReproducible) {
  testsupport::TempDir dir;
  const auto cfg = small_setup(dir);
  const auto a = cli({"evaluate", "--config", cfg.string(), "--canonical"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  std::map<std::string, std::string> first;
  for (const auto& e : fs::directory_iterator(dir / "out")) {
    if (e.is_regular_file()) first[e.path().filename().string()] = slurp(e.path());
  }
  EXPECT_TRUE(first.count("t_report.json"));
  EXPECT_TRUE(first.count("t_timing.csv"));
  EXPECT_TRUE(first.count("t_summary_avg.csv"));
  EXPECT_TRUE(first.count("t_summary_max.csv"));
  EXPECT_TRUE(first.count("t_deltas.csv"));
  EXPECT_TRUE(first.count("t_paired_knn_confusion_mean.csv"));
  EXPECT_TRUE(first.count("t_non_paired_random_forest_metrics.csv"));

  fs::rename(dir / "out", dir / "first");
  ASSERT_EQ(cli({"evaluate", "--config", cfg.string(), "--canonical"}).code, kExitOk);
  for (const auto& [name, bytes] : first) EXPECT_EQ(slurp(dir / "out" / name), bytes) << name;

  // The echoed config reproduces the run on its own.
  const auto echo = dir / "first" / "effective_config.json";
  fs::remove_all(dir / "out");
  ASSERT_EQ(cli({"evaluate", "--config", echo.string(), "--canonical"}).code, kExitOk);
  EXPECT_EQ(slurp(dir / "out" / "t_report.json"), first["t_report.json"]);
}

TEST(Cli, SeedOverrideChangesSplits) {
  testsupport::TempDir dir;
  const auto cfg = small_setup(dir);
  ASSERT_EQ(cli({"evaluate", "--config", cfg.string(), "--canonical", "--seed", "99"}).code, kExitOk);
  const auto echo = parse_run_config(slurp(dir / "out" / "effective_config.json"));
  EXPECT_EQ(echo.protocol.seed, 99u);
  EXPECT_TRUE(echo.protocol.canonical);
}

TEST(Cli, EvaluateFailsWithStageForSingleImageClass) {
  testsupport::TempDir dir;
  fs::create_directories(dir / "data" / "a");
  fs::create_directories(dir / "data" / "b");
  write_pgm(dir / "data" / "a" / "1.pgm", white_square_image(100, 20, 40, 40));
  write_pgm(dir / "data" / "a" / "2.pgm", white_square_image(100, 20, 30, 40));
  write_pgm(dir / "data" / "b" / "1.pgm", white_square_image(100, 30, 30, 30));
  write_text(dir / "c.json", R"({"dataset_root": "data", "resize": [100, 100], "protocol": {"repeats": 1}})");
  const auto r = cli({"evaluate", "--config", (dir / "c.json").string()});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("error ["), std::string::npos);
}

TEST(Cli, SynthCommand) {
  testsupport::TempDir dir;
  const auto r = cli({"synth", "--out", (dir / "s").string(), "--classes", "2", "--per-class", "3", "--width",
                      "300", "--height", "260"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "s" / "class_01" / "img_002.pgm"));
  EXPECT_EQ(cli({"synth", "--out", (dir / "t").string(), "--classes", "0"}).code, kExitConfig);
}
