#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "pairfeat/image.hpp"
#include "pairfeat/model.hpp"
#include "pairfeat/random.hpp"

namespace testsupport {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("pairfeat_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline pairfeat::GrayImage random_image(int w, int h, std::uint64_t seed) {
  pairfeat::Rng rng(seed);
  pairfeat::GrayImage img(w, h);
  for (auto& v : img.data()) v = static_cast<double>(rng.below(256));
  return img;
}

/// Two unit-variance Gaussian blobs in `dim` dimensions whose centres are
/// `separation` apart along the first axis; labels 0 and 1 alternate.
inline pairfeat::RowSet blobs(std::size_t per_class, std::size_t dim, double separation, std::uint64_t seed) {
  pairfeat::Rng rng(seed);
  pairfeat::RowSet rows(dim);
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < per_class; ++i) {
    for (int label = 0; label < 2; ++label) {
      for (auto& x : v) x = rng.normal();
      v[0] += label * separation;
      rows.add(v, label);
    }
  }
  return rows;
}

}  // namespace testsupport
