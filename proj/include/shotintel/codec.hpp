#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shotintel {

using Bytes = std::vector<std::uint8_t>;

std::string base64_encode(std::span<const std::uint8_t> data);
/// Throws Error(IoFailure) on characters outside the standard alphabet.
Bytes base64_decode(std::string_view encoded);

std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(std::string_view data);

Bytes read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`, so concurrent
/// readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace shotintel
