#include <doctest.h>

#include "oracles.hpp"
#include "regionrefine/raster.hpp"

using namespace rr;

TEST_SUITE("raster") {

TEST_CASE("dilate of a centred pixel is a centred block") {
  BinaryMask m(9, 9);
  m(4, 4) = 1;
  const BinaryMask d = dilate(m, 7);
  for (Index y = 0; y < 9; ++y)
    for (Index x = 0; x < 9; ++x) CHECK(d(y, x) == ((y >= 1 && y <= 7 && x >= 1 && x <= 7) ? 1 : 0));
}

TEST_CASE("size 1 morphology is the identity") {
  std::mt19937_64 gen(3);
  const BinaryMask m = oracle::random_mask(gen, 17, 23, 0.4);
  CHECK(dilate(m, 1) == m);
  CHECK(erode(m, 1) == m);
}

TEST_CASE("erode keeps a constant mask and removes isolated pixels") {
  CHECK(erode(BinaryMask(9, 9, 1), 3) == BinaryMask(9, 9, 1));
  BinaryMask one(9, 9);
  one(3, 5) = 1;
  CHECK(!erode(one, 3).any());
}

TEST_CASE("morphology matches the window oracles") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 6; ++trial) {
    const BinaryMask m = trial % 2 ? oracle::random_mask(gen, 64, 64, 0.3) : oracle::random_blobs(gen, 64, 64, 5);
    CHECK(dilate(m, 7) == oracle::dilate(m, 7));
    CHECK(erode(m, 5) == oracle::erode(m, 5));
  }
  // Non-square canvases and windows wider than the canvas.
  const BinaryMask thin = oracle::random_mask(gen, 3, 40, 0.2);
  CHECK(dilate(thin, 9) == oracle::dilate(thin, 9));
  CHECK(erode(thin, 9) == oracle::erode(thin, 9));
}

TEST_CASE("even or non-positive sizes are rejected") {
  BinaryMask m(4, 4);
  CHECK_THROWS_AS(dilate(m, 2), ParameterError);
  CHECK_THROWS_AS(erode(m, 0), ParameterError);
  CHECK_THROWS_AS(gaussian_blur(SoftMask(4, 4), 4), ParameterError);
  CHECK_THROWS_AS(gaussian_kernel(-3), ParameterError);
}

TEST_CASE("morphology properties") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const BinaryMask m = oracle::random_blobs(gen, 32, 40, 4);
    for (int s : {3, 5, 9}) {
      const BinaryMask d = dilate(m, s), e = erode(m, s);
      // extensive / anti-extensive
      CHECK(!mask_and_not(m, d).any());
      CHECK(!mask_and_not(e, m).any());
      // duality under the clipped window: erode(M) == NOT dilate(NOT M)
      CHECK(e == mask_not(dilate(mask_not(m), s)));
      // monotone in size
      CHECK(!mask_and_not(d, dilate(m, s + 2)).any());
      CHECK(!mask_and_not(erode(m, s + 2), e).any());
    }
  }
}

TEST_CASE("gaussian kernel matches direct evaluation") {
  CHECK(default_sigma(11) == doctest::Approx(2.0).epsilon(1e-15));
  const auto k = gaussian_kernel(11);
  const auto ref = oracle::gaussian_weights(11, 2.0);
  REQUIRE(k.size() == 11);
  for (std::size_t i = 0; i < 11; ++i) CHECK(std::abs(k[i] - ref[i]) <= 1e-10);
  // Frozen from an independent numpy evaluation.
  CHECK(std::abs(k[5] - 0.20056541423882085) <= 1e-10);
  CHECK(std::abs(k[0] - 0.008812229292562283) <= 1e-10);
  const auto k7 = gaussian_kernel(7, 1.3);
  const auto r7 = oracle::gaussian_weights(7, 1.3);
  for (std::size_t i = 0; i < 7; ++i) CHECK(std::abs(k7[i] - r7[i]) <= 1e-10);
}

TEST_CASE("blur preserves constants and size 1 is identity") {
  RasterImage c(20, 30, 3, 0.5f);
  for (int s : {1, 3, 11, 31}) CHECK(gaussian_blur(c, s) == c);
  std::mt19937_64 gen(2);
  const RasterImage img = oracle::random_image(gen, 12, 9, 2);
  CHECK(gaussian_blur(img, 1) == img);
}

TEST_CASE("blur matches the 2-D clipped oracle and stays in range") {
  std::mt19937_64 gen(8);
  const RasterImage img = oracle::random_image(gen, 25, 19, 1);
  const Plane<double> ref = oracle::blur2d(img.channel(0).cast<double>(), 9, default_sigma(9));
  const RasterImage out = gaussian_blur(img, 9);
  for (Index y = 0; y < 25; ++y)
    for (Index x = 0; x < 19; ++x) CHECK(std::abs(out(y, x, 0) - ref(y, x)) <= 1e-6);
  CHECK(out.channel(0).minCoeff() >= img.channel(0).minCoeff());
  CHECK(out.channel(0).maxCoeff() <= img.channel(0).maxCoeff());
}

TEST_CASE("resize") {
  SUBCASE("own dimensions is bit-identical") {
    std::mt19937_64 gen(1);
    const RasterImage img = oracle::random_image(gen, 7, 13, 3);
    CHECK(resize(img, 7, 13) == img);
    CHECK(resize(img, 7, 13, Interp::nearest) == img);
  }
  SUBCASE("half-pixel bilinear") {
    Plane<float> p(2, 2);
    p << 0, 1, 0, 1;
    const Plane<float> out = resize(p, 2, 4, Interp::bilinear);
    const float want[4] = {0.0f, 0.25f, 0.75f, 1.0f};
    for (Index y = 0; y < 2; ++y)
      for (Index x = 0; x < 4; ++x) CHECK(out(y, x) == want[x]);
  }
  SUBCASE("nearest keeps masks binary") {
    std::mt19937_64 gen(4);
    const BinaryMask m = oracle::random_mask(gen, 31, 17, 0.5);
    for (auto [h, w] : {std::pair<Index, Index>{64, 64}, {5, 40}, {1, 1}}) {
      const BinaryMask r = resize(m, h, w);
      CHECK(r.height() == h);
      CHECK(((r.px == 0) || (r.px == 1)).all());
    }
  }
  SUBCASE("zero target is rejected") {
    CHECK_THROWS_AS(resize(RasterImage(4, 4, 1), 0, 3), ParameterError);
    CHECK_THROWS_AS(resize(SoftMask(4, 4), 3, 0), ParameterError);
  }
}

TEST_CASE("composite") {
  std::mt19937_64 gen(9);
  const RasterImage a = oracle::random_image(gen, 6, 5, 3), b = oracle::random_image(gen, 6, 5, 3);
  CHECK(composite(a, b, SoftMask(6, 5, 1.0f)) == a);
  CHECK(composite(a, b, SoftMask(6, 5, 0.0f)) == b);
  const RasterImage half = composite(RasterImage(2, 2, 1, 1.0f), RasterImage(2, 2, 1, 0.0f), SoftMask(2, 2, 0.5f));
  CHECK(half == RasterImage(2, 2, 1, 0.5f));
  CHECK_THROWS_AS(composite(a, RasterImage(6, 4, 3), SoftMask(6, 5)), ParameterError);

  // composite(a, a, alpha) == a for every alpha
  SoftMask alpha(6, 5);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (Index y = 0; y < 6; ++y)
    for (Index x = 0; x < 5; ++x) alpha(y, x) = u(gen);
  CHECK(composite(a, a, alpha) == a);
}

}  // TEST_SUITE
