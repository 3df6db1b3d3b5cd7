#include "pairfeat/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

#include "pairfeat/error.hpp"

namespace pairfeat {

namespace fs = std::filesystem;

GrayImage::GrayImage(int width, int height, double fill) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::InvalidArgument, "negative image dimension");
  }
  width_ = width;
  height_ = height;
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0 ||
      data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::InvalidArgument, "image data length does not match dimensions");
  }
  for (double v : data_) {
    if (!(v >= 0.0 && v <= 255.0)) {
      throw Error(ErrorCode::InvalidArgument, "intensity outside [0, 255]");
    }
  }
}

double GrayImage::clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return data_[index(x, y)];
}

double luminance(unsigned char r, unsigned char g, unsigned char b) noexcept {
  return std::round(0.299 * r + 0.587 * g + 0.114 * b);
}

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  // Reads the next whitespace-delimited header integer, skipping comments.
  long next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(ErrorCode::CorruptHeader, "PGM header: expected integer");
    }
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000L) throw Error(ErrorCode::CorruptHeader, "PGM header: value too large");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from binary raster data.
  void consume_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::CorruptHeader, "PGM header: missing separator before raster");
    }
    ++pos_;
  }

  std::size_t pos() const noexcept { return pos_; }
  void advance(std::size_t n) noexcept { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

double scale_to_255(long v, long maxval) {
  if (maxval == 255) return static_cast<double>(v);
  return std::round(static_cast<double>(v) * 255.0 / static_cast<double>(maxval));
}

std::vector<unsigned char> read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::UnreadableFile, "read failed: " + path.string());
  return bytes;
}

GrayImage decode_png(std::span<const unsigned char> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::CorruptHeader, std::string("PNG: ") + image.message);
  }
  // Simplified-API images free their state on every exit path.
  std::unique_ptr<png_image, void (*)(png_imagep)> guard(&image, png_image_free);
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    throw Error(ErrorCode::UnsupportedBitDepth, "PNG: only 8-bit images are supported");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  const auto width = static_cast<int>(image.width);
  const auto height = static_cast<int>(image.height);

  std::vector<unsigned char> raster(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raster.data(), 0, nullptr)) {
    throw Error(ErrorCode::CorruptHeader, std::string("PNG: ") + image.message);
  }

  std::vector<double> data(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const unsigned char* px = raster.data() + i * channels;
    data[i] = color ? luminance(px[0], px[1], px[2]) : static_cast<double>(px[0]);
  }
  return GrayImage(width, height, std::move(data));
}

}  // namespace

GrayImage decode_pgm(std::span<const unsigned char> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw Error(ErrorCode::UnsupportedFormat, "not a P2/P5 PGM stream");
  }
  const bool binary = bytes[1] == '5';
  PgmReader reader(bytes);
  reader.advance(2);
  const long width = reader.next_int();
  const long height = reader.next_int();
  const long maxval = reader.next_int();
  if (width <= 0 || height <= 0) throw Error(ErrorCode::CorruptHeader, "PGM: zero dimension");
  if (maxval <= 0 || maxval > 65535) throw Error(ErrorCode::CorruptHeader, "PGM: invalid maxval");
  if (maxval > 255) {
    throw Error(ErrorCode::UnsupportedBitDepth, "PGM: 16-bit samples are not supported");
  }

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<double> data(count);
  if (binary) {
    reader.consume_single_space();
    if (bytes.size() - reader.pos() < count) {
      throw Error(ErrorCode::CorruptHeader, "PGM: raster shorter than header declares");
    }
    for (std::size_t i = 0; i < count; ++i) {
      const long v = bytes[reader.pos() + i];
      if (v > maxval) throw Error(ErrorCode::CorruptHeader, "PGM: sample exceeds maxval");
      data[i] = scale_to_255(v, maxval);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = reader.next_int();
      if (v > maxval) throw Error(ErrorCode::CorruptHeader, "PGM: sample exceeds maxval");
      data[i] = scale_to_255(v, maxval);
    }
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

GrayImage load_image(const fs::path& path) {
  const auto bytes = read_all(path);
  static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(std::begin(kPngSig), std::end(kPngSig), bytes.begin())) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P') {
    if (bytes[1] == '2' || bytes[1] == '5') return decode_pgm(bytes);
  }
  throw Error(ErrorCode::UnsupportedFormat, "unsupported raster format: " + path.string());
}

GrayImage crop(const GrayImage& img, const CropRect& rect) {
  if (rect.x0 < 0 || rect.y0 < 0 || rect.width <= 0 || rect.height <= 0 ||
      rect.x0 + rect.width > img.width() || rect.y0 + rect.height > img.height()) {
    throw Error(ErrorCode::OutOfBounds, "crop rectangle exceeds image bounds");
  }
  GrayImage out(rect.width, rect.height);
  for (int j = 0; j < rect.height; ++j) {
    for (int i = 0; i < rect.width; ++i) out.at(i, j) = img.at(rect.x0 + i, rect.y0 + j);
  }
  return out;
}

GrayImage resize(const GrayImage& img, int width, int height) {
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidArgument, "resize: zero target dimension");
  if (img.empty()) throw Error(ErrorCode::InvalidArgument, "resize: empty source image");
  if (width == img.width() && height == img.height()) return img;

  const auto source_coord = [](int i, int out_n, int in_n) {
    if (out_n == 1 || in_n == 1) return 0.0;
    return static_cast<double>(i) * (in_n - 1) / (out_n - 1);
  };

  GrayImage out(width, height);
  for (int j = 0; j < height; ++j) {
    const double sy = source_coord(j, height, img.height());
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double fy = sy - y0;
    for (int i = 0; i < width; ++i) {
      const double sx = source_coord(i, width, img.width());
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double fx = sx - x0;
      // a + (b - a) t reproduces a exactly when a == b.
      const double a = img.at(x0, y0), b = img.at(x1, y0);
      const double c = img.at(x0, y1), d = img.at(x1, y1);
      const double top = a + (b - a) * fx;
      const double bottom = c + (d - c) * fx;
      out.at(i, j) = std::clamp(top + (bottom - top) * fy, 0.0, 255.0);
    }
  }
  return out;
}

void write_pgm(const fs::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<unsigned char> raster(img.data().size());
  std::transform(img.data().begin(), img.data().end(), raster.begin(), [](double v) {
    return static_cast<unsigned char>(std::clamp(std::round(v), 0.0, 255.0));
  });
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
}

GrayImage rescale_to_gray(int width, int height, std::span<const double> field) {
  if (field.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::InvalidArgument, "field size does not match dimensions");
  }
  GrayImage out(width, height);
  if (field.empty()) return out;
  const auto [lo, hi] = std::minmax_element(field.begin(), field.end());
  const double span = *hi - *lo;
  for (std::size_t i = 0; i < field.size(); ++i) {
    out.data()[i] = span > 0.0 ? 255.0 * (field[i] - *lo) / span : 0.0;
  }
  return out;
}

}  // namespace pairfeat
