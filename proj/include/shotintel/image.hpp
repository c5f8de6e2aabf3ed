#pragma once

#include "shotintel/codec.hpp"

#include <span>
#include <string>

namespace shotintel {

struct ImageSize {
  int width = 0;
  int height = 0;
};

/// "image/png" or "image/jpeg" from magic bytes; anything else (including an
/// empty buffer) throws Error(UnsupportedImageFormat).
std::string sniff_media_type(std::span<const std::uint8_t> bytes);

/// Reads dimensions from the PNG IHDR chunk or the first JPEG SOFn marker.
ImageSize image_size(std::span<const std::uint8_t> bytes);

/// Number of rows kept by a top-strip crop: ceil(fraction * height).
int strip_rows(int height, double fraction);

/// Decodes, keeps rows [0, rows) at full width and re-encodes in the source
/// format. Output is deterministic for a given input.
Bytes crop_top_rows(std::span<const std::uint8_t> bytes, int rows);

}  // namespace shotintel
