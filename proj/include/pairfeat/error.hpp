#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pairfeat {

enum class ErrorCode {
  // image_io
  UnreadableFile,
  UnsupportedFormat,
  UnsupportedBitDepth,
  CorruptHeader,
  OutOfBounds,
  InvalidArgument,
  // corner_detect
  ImageTooSmall,
  // feature files
  MissingKey,
  DuplicateKey,
  DimensionMismatch,
  // triangulation
  TooFewPoints,
  Collinear,
  // pairing
  CrossImagePairing,
  CountMismatch,
  // classifiers / evaluation
  EmptyInput,
  SingleClass,
  InsufficientClassImages,
  UnsupportedOption,
  CorruptModel,
  // run configuration
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code lets
/// callers (the CLI in particular) distinguish failure kinds without parsing
/// messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pairfeat
