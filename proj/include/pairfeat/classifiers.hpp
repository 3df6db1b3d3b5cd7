#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "pairfeat/knn.hpp"
#include "pairfeat/linear_svm.hpp"
#include "pairfeat/model.hpp"
#include "pairfeat/random_forest.hpp"

namespace pairfeat {

using ClassifierConfig = std::variant<KnnConfig, LinearSvmConfig, ForestConfig>;

/// "knn", "linear_svm" or "random_forest".
std::string classifier_name(const ClassifierConfig& cfg);

std::unique_ptr<Model> train(const ClassifierConfig& cfg, const RowSet& rows, std::size_t class_count);

// Model file: "PFMD" | u32 version | u8 kind | kind-specific config + payload.
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<unsigned char> serialize_model(const Model& model);
std::unique_ptr<Model> deserialize_model(std::span<const unsigned char> bytes);
void save_model(const std::filesystem::path& path, const Model& model);
std::unique_ptr<Model> load_model(const std::filesystem::path& path);

}  // namespace pairfeat
