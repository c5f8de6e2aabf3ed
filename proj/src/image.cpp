#include "shotintel/image.hpp"

#include "shotintel/error.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <cmath>

namespace shotintel {
namespace {

constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};

bool is_png(std::span<const std::uint8_t> b) {
  return b.size() >= 8 && std::equal(b.begin(), b.begin() + 8, kPngMagic);
}

bool is_jpeg(std::span<const std::uint8_t> b) {
  return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF;
}

std::uint32_t be32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
         (std::uint32_t{b[at + 2]} << 8) | b[at + 3];
}

}  // namespace

std::string sniff_media_type(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return "image/png";
  if (is_jpeg(bytes)) return "image/jpeg";
  throw Error(ErrorCode::UnsupportedImageFormat,
              bytes.empty() ? "empty file" : "not a PNG or JPEG image");
}

ImageSize image_size(std::span<const std::uint8_t> b) {
  if (is_png(b)) {
    if (b.size() < 24) throw Error(ErrorCode::UnsupportedImageFormat, "truncated PNG header");
    return {static_cast<int>(be32(b, 16)), static_cast<int>(be32(b, 20))};
  }
  if (is_jpeg(b)) {
    std::size_t pos = 2;
    while (pos + 4 <= b.size()) {
      if (b[pos] != 0xFF) {
        ++pos;
        continue;
      }
      std::uint8_t marker = b[pos + 1];
      if (marker == 0xFF) {
        ++pos;
        continue;
      }
      if (marker == 0xD8 || marker == 0x01 || (marker >= 0xD0 && marker <= 0xD7)) {
        pos += 2;
        continue;
      }
      std::size_t len = (std::size_t{b[pos + 2]} << 8) | b[pos + 3];
      bool sof = marker >= 0xC0 && marker <= 0xCF && marker != 0xC4 && marker != 0xC8 &&
                 marker != 0xCC;
      if (sof) {
        if (pos + 9 > b.size()) break;
        int height = (b[pos + 5] << 8) | b[pos + 6];
        int width = (b[pos + 7] << 8) | b[pos + 8];
        return {width, height};
      }
      pos += 2 + len;
    }
    throw Error(ErrorCode::UnsupportedImageFormat, "JPEG without frame header");
  }
  sniff_media_type(b);
  return {};
}

int strip_rows(int height, double fraction) {
  // Guard against 0.1 * 1080 landing a hair above 108.
  return static_cast<int>(std::ceil(fraction * height - 1e-9));
}

Bytes crop_top_rows(std::span<const std::uint8_t> bytes, int rows) {
  auto media = sniff_media_type(bytes);
  cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1,
              const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat img = cv::imdecode(raw, cv::IMREAD_UNCHANGED);
  if (img.empty()) throw Error(ErrorCode::UnsupportedImageFormat, "image failed to decode");
  if (rows <= 0 || rows > img.rows)
    throw Error(ErrorCode::ImageTooSmall, "crop of " + std::to_string(rows) + " rows");
  cv::Mat strip = img(cv::Rect(0, 0, img.cols, rows));
  std::vector<std::uint8_t> out;
  std::vector<int> params;
  const char* ext = ".png";
  if (media == "image/jpeg") {
    ext = ".jpg";
    params = {cv::IMWRITE_JPEG_QUALITY, 95};
  } else {
    params = {cv::IMWRITE_PNG_COMPRESSION, 6};
  }
  if (!cv::imencode(ext, strip, out, params))
    throw Error(ErrorCode::IoFailure, "failed to re-encode cropped image");
  return out;
}

}  // namespace shotintel
