#include "pairfeat/pipeline.hpp"

#include <algorithm>
#include <cctype>

#include "pairfeat/error.hpp"
#include "pairfeat/feature_file.hpp"
#include "pairfeat/pairing.hpp"

namespace pairfeat {

namespace fs = std::filesystem;

namespace {

bool is_image_file(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm" || ext == ".png";
}

}  // namespace

DatasetIndex scan_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(ErrorCode::UnreadableFile, "dataset root is not a directory: " + root.string());
  std::vector<fs::path> class_dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) class_dirs.push_back(e.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());

  DatasetIndex index;
  for (const auto& dir : class_dirs) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && is_image_file(e.path())) files.push_back(e.path());
    }
    if (files.empty()) continue;
    std::sort(files.begin(), files.end());
    const int label = static_cast<int>(index.class_names.size());
    const auto class_name = dir.filename().string();
    index.class_names.push_back(class_name);
    for (const auto& f : files) {
      index.entries.push_back({class_name + "/" + f.filename().string(), f, label});
    }
  }
  if (index.entries.empty()) throw Error(ErrorCode::EmptyInput, "no images found under " + root.string());
  return index;
}

GrayImage prepare_image(const GrayImage& img, const PrepareConfig& cfg) {
  const GrayImage cropped = cfg.crop ? crop(img, *cfg.crop) : img;
  return resize(cropped, cfg.width, cfg.height);
}

DetectedPoints detect_or_centre(const GrayImage& img, const CornerConfig& cfg) {
  DetectedPoints out;
  out.points = detect(img, cfg);
  if (out.points.empty()) {
    out.points.push_back({img.width() / 2, img.height() / 2, 0.0});
    out.fallback = true;
  }
  return out;
}

std::vector<Point2> to_points(std::span<const InterestPoint> points) {
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
  return out;
}

std::vector<FeatureRecord> describe(const GrayImage& img, std::span<const InterestPoint> points,
                                    const std::string& image_id, std::size_t dim) {
  std::vector<FeatureRecord> records;
  records.reserve(points.size());
  for (const auto& patch : mesh_patches(img, points, image_id)) records.push_back(builtin_descriptor(patch, dim));
  return records;
}

std::vector<ImageDetection> detect_dataset(const DatasetIndex& index, const PipelineConfig& cfg) {
  cfg.corners.validate();
  std::vector<ImageDetection> out;
  out.reserve(index.entries.size());
  for (const auto& e : index.entries) {
    const auto img = prepare_image(load_image(e.path), cfg.prepare);
    auto det = detect_or_centre(img, cfg.corners);
    out.push_back({e.image_id, e.label, std::move(det.points), det.fallback});
  }
  return out;
}

FeatureDataset build_feature_dataset(const DatasetIndex& index, std::span<const ImageDetection> detections,
                                     const PipelineConfig& cfg) {
  cfg.descriptor.validate();
  if (detections.size() != index.entries.size()) {
    throw Error(ErrorCode::CountMismatch, "one detection result per dataset image required");
  }

  FeatureDataset ds;
  ds.class_names = index.class_names;
  ds.class_count = index.class_names.size();
  ds.horizontal_slots = static_cast<std::size_t>(cfg.corners.max_points);

  std::vector<FeatureRecord> imported;
  std::size_t cursor = 0;
  if (cfg.descriptor.kind == DescriptorKind::Imported) {
    std::vector<FeatureKey> keys;
    for (const auto& d : detections) {
      for (std::size_t i = 0; i < d.points.size(); ++i) keys.emplace_back(d.image_id, static_cast<std::uint32_t>(i));
    }
    imported = import_features(cfg.descriptor.import_path, keys, cfg.descriptor.dim);
  }

  for (std::size_t k = 0; k < detections.size(); ++k) {
    const auto& d = detections[k];
    ImageSample s;
    s.image_id = d.image_id;
    s.label = d.label;
    if (cfg.descriptor.kind == DescriptorKind::Imported) {
      s.records.assign(imported.begin() + static_cast<std::ptrdiff_t>(cursor),
                       imported.begin() + static_cast<std::ptrdiff_t>(cursor + d.points.size()));
      cursor += d.points.size();
    } else {
      const auto img = prepare_image(load_image(index.entries[k].path), cfg.prepare);
      s.records = describe(img, d.points, d.image_id, cfg.descriptor.dim);
    }
    std::vector<Point2> pts;
    for (const auto& r : s.records) pts.push_back(r.point);
    s.graph = build_pair_graph(pts, cfg.pairing_fallback);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace pairfeat
