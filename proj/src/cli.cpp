#include "pairfeat/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "pairfeat/feature_file.hpp"
#include "pairfeat/pipeline.hpp"
#include "pairfeat/report.hpp"
#include "pairfeat/run_config.hpp"
#include "pairfeat/synthetic.hpp"

namespace pairfeat {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::UnsupportedOption:
      return kExitConfig;
    case ErrorCode::UnreadableFile:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::UnsupportedBitDepth:
    case ErrorCode::CorruptHeader:
    case ErrorCode::MissingKey:
    case ErrorCode::DuplicateKey:
    case ErrorCode::EmptyInput:
    case ErrorCode::InsufficientClassImages:
      return kExitData;
    default:
      return kExitPipeline;
  }
}

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  bool canonical = false;
};

RunConfig effective_config(const Overrides& o) {
  auto cfg = load_run_config(o.config);
  if (o.seed) cfg.protocol.seed = *o.seed;
  if (o.mode) {
    const auto m = parse_join_mode(*o.mode);
    if (!m) throw Error(ErrorCode::InvalidConfig, "--mode must be paired, non_paired or horizontal");
    cfg.mode = *m;
  }
  if (o.canonical) cfg.protocol.canonical = true;
  cfg.validate();
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  f << text;
}

void echo_config(const RunConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  write_file(cfg.output_dir / "effective_config.json", dump_run_config(cfg));
}

fs::path corner_csv_path(const fs::path& out_dir, const std::string& image_id) {
  fs::path p = out_dir / "corners" / image_id;
  p.replace_extension(".csv");
  return p;
}

int cmd_detect(const RunConfig& cfg, std::string& stage, std::ostream& out) {
  stage = "scan";
  const auto index = scan_dataset(cfg.dataset_root);
  stage = "detect";
  const auto detections = detect_dataset(index, cfg.pipeline);

  stage = "write";
  echo_config(cfg);
  std::string summary = "image_id,class,corners,below_target\n";
  std::size_t flagged = 0;
  for (const auto& d : detections) {
    const std::size_t count = d.fallback ? 0 : d.points.size();
    const bool below = count < static_cast<std::size_t>(cfg.pipeline.corners.min_points_target);
    flagged += below ? 1 : 0;
    const auto path = corner_csv_path(cfg.output_dir, d.image_id);
    fs::create_directories(path.parent_path());
    write_points_csv(path, d.fallback ? std::span<const InterestPoint>() : std::span<const InterestPoint>(d.points));
    summary += d.image_id + "," + index.class_names[d.label] + "," + std::to_string(count) + "," +
               (below ? "1" : "0") + "\n";
  }
  write_file(cfg.output_dir / (cfg.run_id + "_detect_summary.csv"), summary);
  out << "detect: " << detections.size() << " images, " << flagged << " below "
      << cfg.pipeline.corners.min_points_target << " corners\n";
  return kExitOk;
}

FeatureDataset features_for(const RunConfig& cfg, std::string& stage) {
  stage = "scan";
  const auto index = scan_dataset(cfg.dataset_root);
  stage = "detect";
  const auto detections = detect_dataset(index, cfg.pipeline);
  stage = cfg.pipeline.descriptor.kind == DescriptorKind::Imported ? "import" : "describe";
  return build_feature_dataset(index, detections, cfg.pipeline);
}

int cmd_features(const RunConfig& cfg, std::string& stage, std::ostream& out) {
  const auto ds = features_for(cfg, stage);
  stage = "write";
  echo_config(cfg);
  std::vector<FeatureRecord> all;
  for (const auto& s : ds.samples) all.insert(all.end(), s.records.begin(), s.records.end());
  const auto dim = static_cast<std::uint32_t>(cfg.pipeline.descriptor.dim);
  const auto path = cfg.output_dir / (cfg.run_id + "_features.pfv1");
  write_features(path, all, dim);
  out << "features: " << all.size() << " records, dim " << dim << " -> " << path.string() << "\n";

  if (cfg.mode != JoinMode::Horizontal) {
    const auto joint = ds.joint(cfg.mode);
    std::vector<FeatureRecord> rows;
    for (const auto& m : joint.maps) rows.insert(rows.end(), m.rows.begin(), m.rows.end());
    const auto jpath = cfg.output_dir / (cfg.run_id + "_joint_" + std::string(to_string(cfg.mode)) + ".pfv2");
    write_features(jpath, rows, dim, FeatureFormat::Pfv2);
    out << "joint map: " << rows.size() << " rows -> " << jpath.string() << "\n";
  }
  return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, std::string& stage, std::ostream& out) {
  const auto ds = features_for(cfg, stage);
  std::vector<JoinMode> modes = {JoinMode::NonPaired, JoinMode::Paired};
  if (std::find(modes.begin(), modes.end(), cfg.mode) == modes.end()) modes.push_back(cfg.mode);

  stage = "evaluate";
  const auto report = compare_modes(ds, cfg.classifiers, cfg.protocol, modes);
  stage = "write";
  echo_config(cfg);
  const auto files = write_report(cfg.output_dir, cfg.run_id, report, ds.class_names);
  out << summary_csv(report, false);
  out << "evaluate: wrote " << files.size() << " report files to " << cfg.output_dir.string() << "\n";
  return kExitOk;
}

int cmd_synth(const fs::path& root, const SyntheticConfig& sc, std::ostream& out) {
  const auto files = write_synthetic_dataset(root, sc);
  out << "synth: wrote " << files.size() << " images to " << root.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pairwise patch-feature pipeline: corners, descriptors, Delaunay pairing, evaluation"};
  app.require_subcommand(1);

  Overrides o;
  const auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration")->required();
    sub->add_option("--seed", o.seed, "Override protocol.seed");
    sub->add_option("--mode", o.mode, "Override mode: paired, non_paired or horizontal");
    sub->add_flag("--canonical", o.canonical, "Zero timing fields for byte-identical reports");
  };
  auto* detect_cmd = app.add_subcommand("detect", "Detect corners and write per-image CSVs");
  auto* features_cmd = app.add_subcommand("features", "Write descriptors as a PFV1 file");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Run the repeated-split comparison and write reports");
  add_common(detect_cmd);
  add_common(features_cmd);
  add_common(evaluate_cmd);

  auto* synth_cmd = app.add_subcommand("synth", "Generate the labelled synthetic polygon dataset");
  std::string synth_out;
  SyntheticConfig sc;
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--seed", sc.seed, "Generator seed");
  synth_cmd->add_option("--classes", sc.classes, "Number of classes");
  synth_cmd->add_option("--per-class", sc.images_per_class, "Images per class");
  synth_cmd->add_option("--width", sc.width, "Image width");
  synth_cmd->add_option("--height", sc.height, "Image height");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (synth_cmd->parsed()) {
    try {
      return cmd_synth(synth_out, sc, out);
    } catch (const Error& e) {
      err << "error [synth]: " << e.what() << "\n";
      return e.code() == ErrorCode::InvalidArgument ? kExitConfig : exit_code_for(e.code());
    } catch (const std::exception& e) {
      err << "error [synth]: " << e.what() << "\n";
      return kExitPipeline;
    }
  }

  RunConfig cfg;
  try {
    cfg = effective_config(o);
  } catch (const Error& e) {
    err << "error [config]: " << e.what() << "\n";
    return kExitConfig;
  }

  // Stage name attached to error messages.
  std::string stage = "start";
  try {
    if (detect_cmd->parsed()) return cmd_detect(cfg, stage, out);
    if (features_cmd->parsed()) return cmd_features(cfg, stage, out);
    return cmd_evaluate(cfg, stage, out);
  } catch (const Error& e) {
    err << "error [" << stage << "]: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error [" << stage << "]: " << e.what() << "\n";
    return kExitPipeline;
  }
}

}  // namespace pairfeat
