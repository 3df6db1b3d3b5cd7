#include "pairfeat/error.hpp"

namespace pairfeat {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnreadableFile: return "unreadable file";
    case ErrorCode::UnsupportedFormat: return "unsupported format";
    case ErrorCode::UnsupportedBitDepth: return "unsupported bit depth";
    case ErrorCode::CorruptHeader: return "corrupt header";
    case ErrorCode::OutOfBounds: return "out of bounds";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::ImageTooSmall: return "image too small";
    case ErrorCode::MissingKey: return "missing key";
    case ErrorCode::DuplicateKey: return "duplicate key";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::TooFewPoints: return "too few points";
    case ErrorCode::Collinear: return "collinear points";
    case ErrorCode::CrossImagePairing: return "cross-image pairing";
    case ErrorCode::CountMismatch: return "count mismatch";
    case ErrorCode::EmptyInput: return "empty input";
    case ErrorCode::SingleClass: return "single class";
    case ErrorCode::InsufficientClassImages: return "insufficient class images";
    case ErrorCode::UnsupportedOption: return "unsupported option";
    case ErrorCode::CorruptModel: return "corrupt model";
    case ErrorCode::InvalidConfig: return "invalid config";
  }
  return "unknown";
}

}  // namespace pairfeat
