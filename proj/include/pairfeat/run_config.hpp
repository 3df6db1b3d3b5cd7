#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pairfeat/classifiers.hpp"
#include "pairfeat/pairing.hpp"
#include "pairfeat/pipeline.hpp"
#include "pairfeat/protocol.hpp"

namespace pairfeat {

/// Everything a CLI run needs. JSON schema (all keys optional except
/// dataset_root):
///
///   {
///     "run_id": "run",
///     "dataset_root": "data",            // relative to the config file
///     "output_dir": "out",               // relative to the config file
///     "resize": [480, 360],
///     "crop": null | {"x0": 0, "y0": 0, "width": 100, "height": 100},
///     "corner": {"max_points": 15, "min_points_target": 10, "quality_ratio": 0.01,
///                "min_distance": 10, "window_radius": 1},
///     "descriptor": {"kind": "builtin" | "imported", "dim": 128, "import_path": ""},
///     "mode": "paired" | "non_paired" | "horizontal",
///     "pairing_fallback": true,
///     "classifiers": [
///       {"type": "knn", "k": 21, "kd_tree_max_dim": 32, "index": "auto", "standardize": true},
///       {"type": "linear_svm", "c": 1, "tolerance": 0.001, "max_epochs": 200, "seed": 0,
///        "standardize": true},
///       {"type": "random_forest", "trees": 200, "max_depth": 21, "features_per_split": 0, "seed": 0}
///     ],
///     "protocol": {"repeats": 50, "split": 0.5, "seed": 0, "stratified": true,
///                  "aggregation": "majority_vote" | "mean_score", "canonical": false}
///   }
///
/// Unknown keys are rejected so typos do not silently fall back to defaults.
struct RunConfig {
  std::string run_id = "run";
  std::filesystem::path dataset_root;
  std::filesystem::path output_dir = "out";
  PipelineConfig pipeline;
  JoinMode mode = JoinMode::Paired;
  std::vector<ClassifierConfig> classifiers = {KnnConfig{}, LinearSvmConfig{}, ForestConfig{}};
  ProtocolConfig protocol;

  /// Nested invariants plus an existing dataset root.
  void validate() const;
};

/// Parses the JSON text. Relative paths are resolved against `base_dir`.
/// Throws InvalidConfig on malformed input and UnsupportedOption for
/// classifiers that are recognised but not provided (the RBF SVM).
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir = {});

RunConfig load_run_config(const std::filesystem::path& path);

/// Effective configuration with every default spelled out and absolute
/// paths, so it can be fed back to parse_run_config unchanged.
std::string dump_run_config(const RunConfig& cfg);

}  // namespace pairfeat
