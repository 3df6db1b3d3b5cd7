#include "pairfeat/feature_file.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include "internal/binary_io.hpp"
#include "pairfeat/error.hpp"

namespace pairfeat {

static_assert(std::endian::native == std::endian::little,
              "feature files are little-endian; big-endian hosts need byte swapping");

using internal::ByteReader;
using internal::ByteWriter;

std::vector<unsigned char> encode_features(std::span<const FeatureRecord> records, std::uint32_t dim,
                                           FeatureFormat format) {
  ByteWriter w;
  w.put_bytes(format == FeatureFormat::Pfv1 ? "PFV1" : "PFV2");
  w.put<std::uint32_t>(dim);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    if (r.vector.size() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "record " + r.image_id + "#" + std::to_string(r.point_index) +
                                                    " has dim " + std::to_string(r.vector.size()));
    }
    if (format == FeatureFormat::Pfv1 && r.origin != Origin::Original) {
      throw Error(ErrorCode::InvalidArgument, "PFV1 holds original features only; use PFV2");
    }
    w.put<std::uint32_t>(static_cast<std::uint32_t>(r.image_id.size()));
    w.put_bytes(r.image_id);
    w.put<std::uint32_t>(r.point_index);
    if (format == FeatureFormat::Pfv2) w.put<std::uint8_t>(static_cast<std::uint8_t>(r.origin));
    w.put<double>(r.point.x);
    w.put<double>(r.point.y);
    for (double v : r.vector) w.put<float>(static_cast<float>(v));
  }
  return w.take();
}

FeatureFile decode_features(std::span<const unsigned char> bytes) {
  ByteReader r(bytes, ErrorCode::CorruptHeader);
  const std::string magic = r.get_string(4);
  FeatureFile file;
  if (magic == "PFV1") {
    file.format = FeatureFormat::Pfv1;
  } else if (magic == "PFV2") {
    file.format = FeatureFormat::Pfv2;
  } else {
    throw Error(ErrorCode::CorruptHeader, "bad feature file magic");
  }
  file.dim = r.get<std::uint32_t>();
  const auto count = r.get<std::uint32_t>();
  if (file.dim == 0) throw Error(ErrorCode::CorruptHeader, "feature file declares dim 0");
  // A record needs at least 24 + 4*dim bytes; reject absurd counts before allocating.
  if (static_cast<std::uint64_t>(count) * (24u + 4u * static_cast<std::uint64_t>(file.dim)) > bytes.size()) {
    throw Error(ErrorCode::CorruptHeader, "feature file record count exceeds payload");
  }
  file.records.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    FeatureRecord rec;
    const auto id_len = r.get<std::uint32_t>();
    rec.image_id = r.get_string(id_len);
    rec.point_index = r.get<std::uint32_t>();
    if (file.format == FeatureFormat::Pfv2) {
      const auto origin = r.get<std::uint8_t>();
      if (origin > 1) throw Error(ErrorCode::CorruptHeader, "invalid origin tag");
      rec.origin = static_cast<Origin>(origin);
    }
    rec.point.x = r.get<double>();
    rec.point.y = r.get<double>();
    rec.vector.resize(file.dim);
    for (auto& v : rec.vector) {
      const float f = r.get<float>();
      if (!std::isfinite(f)) throw Error(ErrorCode::CorruptHeader, "non-finite feature value");
      v = f;
    }
    file.records.push_back(std::move(rec));
  }
  if (!r.at_end()) throw Error(ErrorCode::CorruptHeader, "trailing bytes after last record");
  return file;
}

void write_features(const std::filesystem::path& path, std::span<const FeatureRecord> records,
                    std::uint32_t dim, FeatureFormat format) {
  const auto bytes = encode_features(records, dim, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

FeatureFile read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  return decode_features(bytes);
}

std::vector<FeatureRecord> import_features(const std::filesystem::path& path,
                                           std::span<const FeatureKey> expected,
                                           std::size_t expected_dim) {
  auto file = read_features(path);
  if (file.format != FeatureFormat::Pfv1) {
    throw Error(ErrorCode::CorruptHeader, "import expects a PFV1 file: " + path.string());
  }
  if (file.dim != expected_dim) {
    throw Error(ErrorCode::DimensionMismatch, "feature file dim " + std::to_string(file.dim) +
                                                  " does not match pipeline dim " + std::to_string(expected_dim));
  }
  std::map<FeatureKey, std::size_t> by_key;
  for (std::size_t i = 0; i < file.records.size(); ++i) {
    const auto& rec = file.records[i];
    if (!by_key.emplace(FeatureKey{rec.image_id, rec.point_index}, i).second) {
      throw Error(ErrorCode::DuplicateKey,
                  "duplicate feature key " + rec.image_id + "#" + std::to_string(rec.point_index));
    }
  }
  std::vector<FeatureRecord> out;
  out.reserve(expected.size());
  for (const auto& key : expected) {
    const auto it = by_key.find(key);
    if (it == by_key.end()) {
      throw Error(ErrorCode::MissingKey,
                  "missing feature for image " + key.first + " point " + std::to_string(key.second));
    }
    out.push_back(file.records[it->second]);
    out.back().origin = Origin::Original;
  }
  return out;
}

}  // namespace pairfeat
