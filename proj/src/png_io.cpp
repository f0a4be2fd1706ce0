#include "regionrefine/png_io.hpp"

#include <png.h>
#include <sodium.h>

#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <mutex>
#include <vector>

namespace rr {

namespace {

struct PngImage {
  png_image img{};
  PngImage() {
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&img); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  });
}

// Returns interleaved 8-bit samples; `gray_only` forces a single channel.
std::vector<std::uint8_t> decode_raw(std::string_view bytes, bool gray_only, Index& h, Index& w, Index& c) {
  PngImage p;
  if (!png_image_begin_read_from_memory(&p.img, bytes.data(), bytes.size()))
    throw DecodeError(std::string("png decode: ") + p.img.message);
  const bool color = (p.img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  p.img.format = (color && !gray_only) ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(p.img));
  if (!png_image_finish_read(&p.img, nullptr, buf.data(), 0, nullptr))
    throw DecodeError(std::string("png decode: ") + p.img.message);
  h = p.img.height;
  w = p.img.width;
  c = PNG_IMAGE_SAMPLE_CHANNELS(p.img.format);
  return buf;
}

std::string encode_raw(const std::vector<std::uint8_t>& buf, Index h, Index w, Index c) {
  if (c != 1 && c != 3) throw ParameterError("png encode: only 1 or 3 channels are supported");
  PngImage p;
  p.img.width = static_cast<png_uint_32>(w);
  p.img.height = static_cast<png_uint_32>(h);
  p.img.format = c == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  // Worst-case bound, so the image is compressed once.
  png_alloc_size_t size = PNG_IMAGE_PNG_SIZE_MAX(p.img);
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&p.img, out.data(), &size, 0, buf.data(), 0, nullptr))
    throw IoError(std::string("png encode: ") + p.img.message);
  out.resize(size);
  return out;
}

}  // namespace

RasterImage quantize8(const RasterImage& img) {
  RasterImage out = img;
  for (Index c = 0; c < out.channels(); ++c)
    out.channel(c) = out.channel(c).unaryExpr([](float v) { return from_byte(to_byte(v)); });
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

RasterImage decode_png(std::string_view bytes) {
  Index h = 0, w = 0, c = 0;
  const auto buf = decode_raw(bytes, false, h, w, c);
  RasterImage img(h, w, c);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      for (Index k = 0; k < c; ++k) img(y, x, k) = from_byte(buf[static_cast<std::size_t>((y * w + x) * c + k)]);
  return img;
}

BinaryMask decode_mask_png(std::string_view bytes) {
  Index h = 0, w = 0, c = 0;
  const auto buf = decode_raw(bytes, true, h, w, c);
  BinaryMask m(h, w);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) m(y, x) = buf[static_cast<std::size_t>(y * w + x)] > 127 ? 1 : 0;
  return m;
}

std::string encode_png(const RasterImage& img) {
  const Index h = img.height(), w = img.width(), c = img.channels();
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(h * w * c));
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      for (Index k = 0; k < c; ++k) buf[static_cast<std::size_t>((y * w + x) * c + k)] = to_byte(img(y, x, k));
  return encode_raw(buf, h, w, c);
}

std::string encode_mask_png(const BinaryMask& mask) {
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(mask.height() * mask.width()));
  for (Index y = 0; y < mask.height(); ++y)
    for (Index x = 0; x < mask.width(); ++x)
      buf[static_cast<std::size_t>(y * mask.width() + x)] = mask(y, x) ? 255 : 0;
  return encode_raw(buf, mask.height(), mask.width(), 1);
}

RasterImage read_png(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return decode_png(bytes);
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
}

BinaryMask read_mask_png(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return decode_mask_png(bytes);
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
}

void write_png(const std::filesystem::path& path, const RasterImage& img) { write_file(path, encode_png(img)); }

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
  write_file(path, encode_mask_png(mask));
}

void write_soft_png(const std::filesystem::path& path, const SoftMask& mask) {
  write_png(path, RasterImage({mask.px}));
}

std::string base64_encode(std::string_view bytes) {
  ensure_sodium();
  const int variant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_ENCODED_LEN(bytes.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(),
                    variant);
  out.resize(std::strlen(out.c_str()));
  return out;
}

std::string base64_decode(std::string_view text) {
  ensure_sodium();
  std::string out(text.size() / 4 * 3 + 3, '\0');
  std::size_t len = 0;
  if (sodium_base642bin(reinterpret_cast<unsigned char*>(out.data()), out.size(), text.data(), text.size(), nullptr,
                        &len, nullptr, sodium_base64_VARIANT_ORIGINAL) != 0)
    throw DecodeError("malformed base64 payload");
  out.resize(len);
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  ensure_sodium();
  unsigned char digest[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(digest, reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
  char hex[crypto_hash_sha256_BYTES * 2 + 1];
  sodium_bin2hex(hex, sizeof hex, digest, sizeof digest);
  return hex;
}

}  // namespace rr
