#include "pairfeat/run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "pairfeat/error.hpp"

namespace pairfeat {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

void require_object(const ordered_json& j, const std::string& where) {
  if (!j.is_object()) bad(where + " must be a JSON object");
}

void reject_unknown(const ordered_json& j, std::initializer_list<std::string_view> known, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) bad("unknown key \"" + key + "\" in " + where);
  }
}

template <typename T>
void read(const ordered_json& j, const char* key, T& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    bad(where + "." + key + " has the wrong type");
  }
}

// Integers given as JSON floats would be truncated by get<int>(); reject them.
void read_int(const ordered_json& j, const char* key, int& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_number_integer()) bad(where + "." + key + " must be an integer");
  out = it->get<int>();
}

void read_u64(const ordered_json& j, const char* key, std::uint64_t& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_number_unsigned()) bad(where + "." + key + " must be a non-negative integer");
  out = it->get<std::uint64_t>();
}

void read_size(const ordered_json& j, const char* key, std::size_t& out, const std::string& where) {
  std::uint64_t v = out;
  read_u64(j, key, v, where);
  out = static_cast<std::size_t>(v);
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p.lexically_normal();
  return (base / p).lexically_normal();
}

CornerConfig parse_corner(const ordered_json& j) {
  const std::string where = "corner";
  require_object(j, where);
  reject_unknown(j, {"max_points", "min_points_target", "quality_ratio", "min_distance", "window_radius"}, where);
  CornerConfig c;
  read_int(j, "max_points", c.max_points, where);
  read_int(j, "min_points_target", c.min_points_target, where);
  read(j, "quality_ratio", c.quality_ratio, where);
  read(j, "min_distance", c.min_distance, where);
  read_int(j, "window_radius", c.window_radius, where);
  return c;
}

DescriptorSource parse_descriptor(const ordered_json& j, const fs::path& base) {
  const std::string where = "descriptor";
  require_object(j, where);
  reject_unknown(j, {"kind", "dim", "import_path"}, where);
  DescriptorSource d;
  std::string kind = "builtin";
  read(j, "kind", kind, where);
  if (kind == "builtin") {
    d.kind = DescriptorKind::Builtin;
  } else if (kind == "imported") {
    d.kind = DescriptorKind::Imported;
    d.dim = kImportedDim;
  } else {
    bad("descriptor.kind must be \"builtin\" or \"imported\"");
  }
  read_size(j, "dim", d.dim, where);
  std::string path;
  read(j, "import_path", path, where);
  d.import_path = path.empty() ? std::string() : resolve(path, base).string();
  return d;
}

ClassifierConfig parse_classifier(const ordered_json& j, std::size_t index) {
  const std::string where = "classifiers[" + std::to_string(index) + "]";
  require_object(j, where);
  std::string type;
  read(j, "type", type, where);
  if (type == "knn") {
    reject_unknown(j, {"type", "k", "kd_tree_max_dim", "index", "standardize"}, where);
    KnnConfig c;
    read_int(j, "k", c.k, where);
    read_size(j, "kd_tree_max_dim", c.kd_tree_max_dim, where);
    std::string idx = "auto";
    read(j, "index", idx, where);
    if (idx == "auto") c.index = KnnIndex::Auto;
    else if (idx == "kd_tree") c.index = KnnIndex::KdTree;
    else if (idx == "brute_force") c.index = KnnIndex::BruteForce;
    else bad(where + ".index must be auto, kd_tree or brute_force");
    read(j, "standardize", c.standardize, where);
    return c;
  }
  if (type == "linear_svm") {
    reject_unknown(j, {"type", "c", "tolerance", "max_epochs", "seed", "standardize"}, where);
    LinearSvmConfig c;
    read(j, "c", c.c, where);
    read(j, "tolerance", c.tolerance, where);
    read_int(j, "max_epochs", c.max_epochs, where);
    read_u64(j, "seed", c.seed, where);
    read(j, "standardize", c.standardize, where);
    return c;
  }
  if (type == "random_forest") {
    reject_unknown(j, {"type", "trees", "max_depth", "features_per_split", "seed"}, where);
    ForestConfig c;
    read_int(j, "trees", c.trees, where);
    read_int(j, "max_depth", c.max_depth, where);
    read_int(j, "features_per_split", c.features_per_split, where);
    read_u64(j, "seed", c.seed, where);
    return c;
  }
  if (type == "rbf_svm" || type == "svm_rbf") {
    throw Error(ErrorCode::UnsupportedOption,
                where + ": \"" + type + "\" (RBF-kernel SVM) is not provided; use knn, linear_svm or random_forest");
  }
  bad(where + ".type must be knn, linear_svm or random_forest (got \"" + type + "\")");
}

ProtocolConfig parse_protocol(const ordered_json& j) {
  const std::string where = "protocol";
  require_object(j, where);
  reject_unknown(j, {"repeats", "split", "seed", "stratified", "aggregation", "canonical"}, where);
  ProtocolConfig p;
  read_int(j, "repeats", p.repeats, where);
  read(j, "split", p.split, where);
  read_u64(j, "seed", p.seed, where);
  read(j, "stratified", p.stratified, where);
  std::string agg = "majority_vote";
  read(j, "aggregation", agg, where);
  if (agg == "majority_vote") p.aggregation = Aggregation::MajorityVote;
  else if (agg == "mean_score") p.aggregation = Aggregation::MeanScore;
  else bad("protocol.aggregation must be majority_vote or mean_score");
  read(j, "canonical", p.canonical, where);
  return p;
}

ordered_json classifier_json(const ClassifierConfig& cfg) {
  ordered_json j;
  j["type"] = classifier_name(cfg);
  if (const auto* k = std::get_if<KnnConfig>(&cfg)) {
    j["k"] = k->k;
    j["kd_tree_max_dim"] = k->kd_tree_max_dim;
    j["index"] = k->index == KnnIndex::Auto ? "auto" : k->index == KnnIndex::KdTree ? "kd_tree" : "brute_force";
    j["standardize"] = k->standardize;
  } else if (const auto* s = std::get_if<LinearSvmConfig>(&cfg)) {
    j["c"] = s->c;
    j["tolerance"] = s->tolerance;
    j["max_epochs"] = s->max_epochs;
    j["seed"] = s->seed;
    j["standardize"] = s->standardize;
  } else if (const auto* f = std::get_if<ForestConfig>(&cfg)) {
    j["trees"] = f->trees;
    j["max_depth"] = f->max_depth;
    j["features_per_split"] = f->features_per_split;
    j["seed"] = f->seed;
  }
  return j;
}

}  // namespace

void RunConfig::validate() const {
  if (run_id.empty()) bad("run_id must not be empty");
  if (run_id.find_first_of("/\\") != std::string::npos) bad("run_id must not contain path separators");
  if (dataset_root.empty()) bad("dataset_root is required");
  if (!fs::is_directory(dataset_root)) {
    throw Error(ErrorCode::UnreadableFile, "dataset_root does not exist: " + dataset_root.string());
  }
  if (pipeline.prepare.width < 1 || pipeline.prepare.height < 1) bad("resize dimensions must be >= 1");
  if (classifiers.empty()) bad("at least one classifier is required");
  pipeline.corners.validate();
  pipeline.descriptor.validate();
  for (const auto& c : classifiers) std::visit([](const auto& x) { x.validate(); }, c);
  protocol.validate();
}

RunConfig parse_run_config(std::string_view json_text, const fs::path& base_dir) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  require_object(j, "config");
  reject_unknown(j,
                 {"run_id", "dataset_root", "output_dir", "resize", "crop", "corner", "descriptor", "mode",
                  "pairing_fallback", "classifiers", "protocol"},
                 "config");

  if (!j.contains("dataset_root")) bad("dataset_root is required");

  RunConfig cfg;
  read(j, "run_id", cfg.run_id, "config");
  std::string root, out = cfg.output_dir.string();
  read(j, "dataset_root", root, "config");
  read(j, "output_dir", out, "config");
  cfg.dataset_root = resolve(root, base_dir);
  cfg.output_dir = resolve(out, base_dir);

  if (const auto it = j.find("resize"); it != j.end()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() || !(*it)[1].is_number_integer()) {
      bad("resize must be [width, height]");
    }
    cfg.pipeline.prepare.width = (*it)[0].get<int>();
    cfg.pipeline.prepare.height = (*it)[1].get<int>();
  }
  if (const auto it = j.find("crop"); it != j.end() && !it->is_null()) {
    require_object(*it, "crop");
    reject_unknown(*it, {"x0", "y0", "width", "height"}, "crop");
    CropRect r;
    read_int(*it, "x0", r.x0, "crop");
    read_int(*it, "y0", r.y0, "crop");
    read_int(*it, "width", r.width, "crop");
    read_int(*it, "height", r.height, "crop");
    cfg.pipeline.prepare.crop = r;
  }
  if (const auto it = j.find("corner"); it != j.end()) cfg.pipeline.corners = parse_corner(*it);
  if (const auto it = j.find("descriptor"); it != j.end()) cfg.pipeline.descriptor = parse_descriptor(*it, base_dir);
  if (const auto it = j.find("mode"); it != j.end()) {
    if (!it->is_string()) bad("mode must be a string");
    const auto mode = parse_join_mode(it->get<std::string>());
    if (!mode) bad("mode must be paired, non_paired or horizontal");
    cfg.mode = *mode;
  }
  read(j, "pairing_fallback", cfg.pipeline.pairing_fallback, "config");
  if (const auto it = j.find("classifiers"); it != j.end()) {
    if (!it->is_array()) bad("classifiers must be an array");
    cfg.classifiers.clear();
    for (std::size_t i = 0; i < it->size(); ++i) cfg.classifiers.push_back(parse_classifier((*it)[i], i));
  }
  if (const auto it = j.find("protocol"); it != j.end()) cfg.protocol = parse_protocol(*it);
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), fs::absolute(path).parent_path());
}

std::string dump_run_config(const RunConfig& cfg) {
  ordered_json j;
  j["run_id"] = cfg.run_id;
  j["dataset_root"] = fs::absolute(cfg.dataset_root).lexically_normal().string();
  j["output_dir"] = fs::absolute(cfg.output_dir).lexically_normal().string();
  j["resize"] = {cfg.pipeline.prepare.width, cfg.pipeline.prepare.height};
  if (const auto& c = cfg.pipeline.prepare.crop) {
    j["crop"] = {{"x0", c->x0}, {"y0", c->y0}, {"width", c->width}, {"height", c->height}};
  } else {
    j["crop"] = nullptr;
  }
  const auto& cc = cfg.pipeline.corners;
  j["corner"] = {{"max_points", cc.max_points},
                 {"min_points_target", cc.min_points_target},
                 {"quality_ratio", cc.quality_ratio},
                 {"min_distance", cc.min_distance},
                 {"window_radius", cc.window_radius}};
  const auto& d = cfg.pipeline.descriptor;
  j["descriptor"] = {{"kind", d.kind == DescriptorKind::Builtin ? "builtin" : "imported"},
                     {"dim", d.dim},
                     {"import_path", d.import_path.empty() ? std::string()
                                                           : fs::absolute(d.import_path).lexically_normal().string()}};
  j["mode"] = std::string(to_string(cfg.mode));
  j["pairing_fallback"] = cfg.pipeline.pairing_fallback;
  ordered_json clfs = ordered_json::array();
  for (const auto& c : cfg.classifiers) clfs.push_back(classifier_json(c));
  j["classifiers"] = std::move(clfs);
  const auto& p = cfg.protocol;
  j["protocol"] = {{"repeats", p.repeats},
                   {"split", p.split},
                   {"seed", p.seed},
                   {"stratified", p.stratified},
                   {"aggregation", p.aggregation == Aggregation::MajorityVote ? "majority_vote" : "mean_score"},
                   {"canonical", p.canonical}};
  return j.dump(2) + "\n";
}

}  // namespace pairfeat
