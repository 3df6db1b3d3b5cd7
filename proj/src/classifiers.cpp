#include "pairfeat/classifiers.hpp"

#include <fstream>
#include <iterator>

#include "internal/binary_io.hpp"
#include "pairfeat/error.hpp"

namespace pairfeat {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string classifier_name(const ClassifierConfig& cfg) {
  return std::visit(Overloaded{[](const KnnConfig&) { return std::string("knn"); },
                               [](const LinearSvmConfig&) { return std::string("linear_svm"); },
                               [](const ForestConfig&) { return std::string("random_forest"); }},
                    cfg);
}

std::unique_ptr<Model> train(const ClassifierConfig& cfg, const RowSet& rows, std::size_t class_count) {
  return std::visit(
      Overloaded{[&](const KnnConfig& c) -> std::unique_ptr<Model> { return train_knn(rows, c, class_count); },
                 [&](const LinearSvmConfig& c) -> std::unique_ptr<Model> {
                   return train_linear_svm(rows, c, class_count);
                 },
                 [&](const ForestConfig& c) -> std::unique_ptr<Model> { return train_forest(rows, c, class_count); }},
      cfg);
}

std::vector<unsigned char> serialize_model(const Model& model) {
  internal::ByteWriter w;
  w.put_bytes("PFMD");
  w.put<std::uint32_t>(kModelFormatVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(model.kind()));
  model.save_payload(w);
  return w.take();
}

std::unique_ptr<Model> deserialize_model(std::span<const unsigned char> bytes) {
  internal::ByteReader r(bytes, ErrorCode::CorruptModel);
  if (r.get_string(4) != "PFMD") throw Error(ErrorCode::CorruptModel, "bad model magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::CorruptModel, "unsupported model format version " + std::to_string(version));
  }
  std::unique_ptr<Model> model;
  switch (static_cast<ModelKind>(r.get<std::uint8_t>())) {
    case ModelKind::Knn: model = KnnModel::load_payload(r); break;
    case ModelKind::LinearSvm: model = LinearSvmModel::load_payload(r); break;
    case ModelKind::RandomForest: model = ForestModel::load_payload(r); break;
    default: throw Error(ErrorCode::CorruptModel, "unknown model kind");
  }
  if (!r.at_end()) throw Error(ErrorCode::CorruptModel, "trailing bytes after model payload");
  return model;
}

void save_model(const std::filesystem::path& path, const Model& model) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::unique_ptr<Model> load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace pairfeat
