#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pairfeat/error.hpp"

namespace pairfeat::internal {

// Little-endian host assumed (checked in feature_file.cpp).
class ByteWriter {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_bytes(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  template <typename T>
  void put_vector(std::span<const T> v) {
    put<std::uint64_t>(v.size());
    for (const T& x : v) put<T>(x);
  }
  std::vector<unsigned char> take() { return std::move(bytes_); }

 private:
  std::vector<unsigned char> bytes_;
};

class ByteReader {
 public:
  ByteReader(std::span<const unsigned char> bytes, ErrorCode on_truncation)
      : bytes_(bytes), code_(on_truncation) {}

  template <typename T>
  T get() {
    require(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string(std::size_t n) {
    require(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  template <typename T>
  std::vector<T> get_vector() {
    const auto n = get<std::uint64_t>();
    if (n > (bytes_.size() - pos_) / sizeof(T)) throw Error(code_, "binary stream truncated");
    std::vector<T> v(n);
    for (auto& x : v) x = get<T>();
    return v;
  }
  bool at_end() const noexcept { return pos_ == bytes_.size(); }

 private:
  void require(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(code_, "binary stream truncated");
  }

  std::span<const unsigned char> bytes_;
  ErrorCode code_;
  std::size_t pos_ = 0;
};

}  // namespace pairfeat::internal
