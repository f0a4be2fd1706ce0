#include <doctest.h>

#include "oracles.hpp"
#include "regionrefine/png_io.hpp"

using namespace rr;
namespace fs = std::filesystem;

TEST_SUITE("png_io") {

TEST_CASE("byte conversion") {
  CHECK(to_byte(0.0f) == 0);
  CHECK(to_byte(1.0f) == 255);
  CHECK(to_byte(-0.5f) == 0);
  CHECK(to_byte(2.0f) == 255);
  CHECK(to_byte(std::nanf("")) == 0);
  for (int b = 0; b < 256; ++b) CHECK(to_byte(from_byte(static_cast<std::uint8_t>(b))) == b);
  std::mt19937_64 gen(1);
  const RasterImage q = quantize8(oracle::random_image(gen, 9, 7, 3));
  CHECK(quantize8(q) == q);
}

TEST_CASE("png round trips") {
  std::mt19937_64 gen(2);
  const RasterImage rgb = quantize8(oracle::random_image(gen, 13, 17, 3));
  const RasterImage gray = quantize8(oracle::random_image(gen, 5, 4, 1));
  CHECK(decode_png(encode_png(rgb)) == rgb);
  CHECK(decode_png(encode_png(gray)) == gray);
  const BinaryMask m = oracle::random_mask(gen, 11, 6, 0.5);
  CHECK(decode_mask_png(encode_mask_png(m)) == m);

  const fs::path dir = oracle::scratch("png_io");
  write_png(dir / "a.png", rgb);
  CHECK(read_png(dir / "a.png") == rgb);
  write_mask_png(dir / "m.png", m);
  CHECK(read_mask_png(dir / "m.png") == m);
  // Identical images encode to identical bytes.
  write_png(dir / "b.png", rgb);
  CHECK(read_file(dir / "a.png") == read_file(dir / "b.png"));
  fs::remove_all(dir);
}

TEST_CASE("png errors") {
  CHECK_THROWS_AS(decode_png("definitely not a png"), DecodeError);
  CHECK_THROWS_AS(read_png("/nonexistent/nowhere.png"), IoError);
  CHECK_THROWS_AS(write_png("/nonexistent/dir/x.png", RasterImage(2, 2, 1)), IoError);
}

TEST_CASE("base64 and sha256") {
  CHECK(base64_encode("") == "");
  CHECK(base64_encode("foobar") == "Zm9vYmFy");
  CHECK(base64_encode("fo") == "Zm8=");
  CHECK(base64_decode("Zm9vYmE=") == "fooba");
  CHECK_THROWS_AS(base64_decode("Zm9v!!"), DecodeError);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // TEST_SUITE
