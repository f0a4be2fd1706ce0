#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "regionrefine/raster.hpp"

namespace rr {

// 8-bit <-> [0,1]: decode is v / 255, encode is round(v * 255) clamped.
inline std::uint8_t to_byte(float v) {
  if (!(v > 0.0f)) return 0;
  if (v >= 1.0f) return 255;
  return static_cast<std::uint8_t>(std::lround(static_cast<double>(v) * 255.0));
}
inline float from_byte(std::uint8_t b) { return static_cast<float>(b) / 255.0f; }

// Round-trips every sample through 8 bits, matching what write_png stores.
RasterImage quantize8(const RasterImage& img);

// Gray files load as 1 channel, colour files as 3. Alpha is dropped.
RasterImage read_png(const std::filesystem::path& path);
// Single channel read; pixel > 127 => 1.
BinaryMask read_mask_png(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RasterImage& img);
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);
void write_soft_png(const std::filesystem::path& path, const SoftMask& mask);

std::string encode_png(const RasterImage& img);
std::string encode_mask_png(const BinaryMask& mask);
RasterImage decode_png(std::string_view bytes);
BinaryMask decode_mask_png(std::string_view bytes);

std::string base64_encode(std::string_view bytes);
// Throws DecodeError on malformed input.
std::string base64_decode(std::string_view text);

std::string sha256_hex(std::string_view bytes);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace rr
