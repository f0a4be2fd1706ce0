#include <doctest.h>

#include "oracles.hpp"
#include "regionrefine/degrade.hpp"
#include "regionrefine/metrics.hpp"
#include "regionrefine/png_io.hpp"
#include "regionrefine/rng.hpp"

using namespace rr;
namespace fs = std::filesystem;

namespace {

RasterImage gradient_image(Index h, Index w, Index c) {
  RasterImage img(h, w, c);
  for (Index k = 0; k < c; ++k)
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x)
        img(y, x, k) = static_cast<float>(0.1 + 0.6 * x / static_cast<double>(w) + 0.2 * y / static_cast<double>(h) +
                                          0.05 * static_cast<double>(k));
  return img;
}

std::string sample_digest(const DegradedSample& s) {
  return sha256_hex(encode_png(s.input) + encode_png(s.gt) + encode_mask_png(s.mask) +
                    nlohmann::json(s.fg_box).dump() + s.provenance.params.dump());
}

}  // namespace

TEST_SUITE("degrade") {

TEST_CASE("rng is the documented generator") {
  // Values of std::mt19937_64 are fixed by the standard: the 10000th draw
  // from the default seed is 9981545732273789042.
  std::mt19937_64 ref;
  ref.discard(9999);
  Rng rng(5489u);
  for (int i = 0; i < 9999; ++i) rng.next();
  CHECK(rng.next() == 9981545732273789042ull);
  CHECK(ref() == 9981545732273789042ull);

  Rng a(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto k = a.uniform_int(-3, 4);
    CHECK(k >= -3);
    CHECK(k <= 4);
  }
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST_CASE("scribble determinism and containment") {
  const BinaryMask obj = oracle::disk(96, 96, 48, 40, 20);
  ScribbleParams p;
  p.seed = 42;
  const BinaryMask a = sample_scribble(obj, p), b = sample_scribble(obj, p);
  CHECK(a == b);
  CHECK(a.any());
  CHECK(!mask_and_not(a, dilate(obj, p.object_dilate)).any());
  p.seed = 43;
  CHECK(!(sample_scribble(obj, p) == a));
  CHECK_THROWS_AS(sample_scribble(BinaryMask(10, 10), p), EmptyRegion);
}

TEST_CASE("scribble equals the replayed draw sequence") {
  const BinaryMask obj = oracle::disk(128, 128, 64, 64, 30);
  ScribbleParams p;
  p.seed = 7;
  p.strokes_min = p.strokes_max = 3;
  const BinaryMask got = sample_scribble(obj, p);
  const BinaryMask want = oracle::replay_scribble(obj, {7, 3, 3, p.width_min, p.width_max, p.object_dilate, 3});
  CHECK(got == want);
  // Even control-point count exercises the trailing straight segment.
  p.curve_points = 4;
  p.seed = 8;
  CHECK(sample_scribble(obj, p) ==
        oracle::replay_scribble(obj, {8, 3, 3, p.width_min, p.width_max, p.object_dilate, 4}));
}

TEST_CASE("scribble containment over many seeds") {
  std::mt19937_64 gen(9);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    BinaryMask obj = oracle::random_blobs(gen, 50, 60, 2);
    if (!obj.any()) obj(10, 10) = 1;
    ScribbleParams p;
    p.seed = seed;
    p.object_dilate = 5;
    const BinaryMask s = sample_scribble(obj, p);
    CHECK(s.any());
    CHECK(!mask_and_not(s, dilate(obj, 5)).any());
  }
}

TEST_CASE("inpaint") {
  InpainterConfig cfg;
  const RasterImage grad = gradient_image(40, 48, 3);
  SUBCASE("empty mask is identity") { CHECK(inpaint(grad, BinaryMask(40, 48), cfg, 1) == grad); }
  SUBCASE("full mask on a constant image") {
    cfg.noise_amplitude = 0.0;
    const RasterImage c(20, 20, 3, 0.4f);
    CHECK(inpaint(c, BinaryMask(20, 20, 1), cfg, 1) == c);
  }
  SUBCASE("normalized convolution oracle") {
    cfg.noise_amplitude = 0.0;
    const BinaryMask hole = oracle::disk(40, 48, 20, 24, 9);
    const RasterImage out = inpaint(grad, hole, cfg, 1);
    const auto want = oracle::normconv_fill(grad, hole, 31, default_sigma(31));
    for (Index c = 0; c < 3; ++c)
      for (Index y = 0; y < 40; ++y)
        for (Index x = 0; x < 48; ++x) {
          if (hole(y, x))
            CHECK(std::abs(out(y, x, c) - want[static_cast<std::size_t>(c)](y, x)) <= 1e-6);
          else
            CHECK(out(y, x, c) == grad(y, x, c));
        }
  }
  SUBCASE("large holes fill over several rounds") {
    cfg.noise_amplitude = 0.0;
    cfg.kernel_size = 5;
    const RasterImage small = gradient_image(30, 30, 3);
    BinaryMask hole(30, 30, 1);
    hole(0, 0) = 0;
    const RasterImage out = inpaint(small, hole, cfg, 1);
    const auto want = oracle::normconv_fill(small, hole, 5, default_sigma(5));
    CHECK(std::abs(out(29, 29, 1) - want[1](29, 29)) <= 1e-6);
  }
  SUBCASE("noise touches masked pixels only and is seeded") {
    const BinaryMask hole = oracle::disk(40, 48, 20, 24, 9);
    const RasterImage a = inpaint(grad, hole, cfg, 5), b = inpaint(grad, hole, cfg, 5);
    CHECK(a == b);
    CHECK(!(inpaint(grad, hole, cfg, 6) == a));
    const BinaryMask outside = mask_not(hole);
    CHECK(mse(a, grad, outside) == 0.0);
  }
}

TEST_CASE("assembled samples keep the background") {
  const SyntheticCase sc = make_synthetic_case(3, 96, 128);
  DegradeConfig cfg;
  cfg.scribble.seed = 11;
  const DegradedSample s = assemble_sample(sc.gt, sc.object_mask, sc.reference, sc.instruction, cfg);
  const SoftMask support = blend_mask(s.mask, cfg.light_blend);
  Index diff = 0;
  for (Index y = 0; y < 96; ++y)
    for (Index x = 0; x < 128; ++x)
      for (Index c = 0; c < 3; ++c) {
        if (support(y, x) == 0.0f) CHECK(s.input(y, x, c) == s.gt(y, x, c));
        diff += s.input(y, x, c) != s.gt(y, x, c);
      }
  CHECK(diff > 0);
  CHECK(s.fg_box.contains(bbox_from_mask(s.mask)));
  CHECK(s.provenance.inpainter_id == "normconv-k31");
  CHECK(validate_sample(s, cfg.validator).accepted);
}

TEST_CASE("a flat image with zero noise yields no defect") {
  const RasterImage flat(64, 64, 3, 0.5f);
  DegradeConfig cfg;
  cfg.inpainter.noise_amplitude = 0.0;
  const DegradedSample s = assemble_sample(flat, oracle::disk(64, 64, 32, 32, 10), std::nullopt, "x", cfg);
  CHECK(s.input == s.gt);
  CHECK(validate_sample(s, cfg.validator).reason == "no defect");
}

TEST_CASE("golden sample digest") {
  const SyntheticCase sc = make_synthetic_case(11, 96, 128);
  DegradeConfig cfg;
  cfg.scribble.seed = 11;
  const DegradedSample s = assemble_sample(sc.gt, sc.object_mask, sc.reference, sc.instruction, cfg);
  CHECK(sample_digest(s) == sample_digest(assemble_sample(sc.gt, sc.object_mask, sc.reference, sc.instruction, cfg)));
  CHECK(sample_digest(s) == "a90b0d087ee8faded5b0eeacc5cc88802e181900d66c517858002c13f0e28089");
}

TEST_CASE("validator threshold") {
  const SyntheticCase sc = make_synthetic_case(4, 64, 64);
  DegradedSample s;
  s.gt = sc.gt;
  s.input = sc.gt;
  s.mask = sc.object_mask;
  CHECK(!validate_sample(s, {}).accepted);
  // Region MSE of about 0.0005.
  s.gt = RasterImage(8, 8, 1, 0.5f);
  s.input = RasterImage(8, 8, 1, 0.5f);
  s.mask = BinaryMask(8, 8, 1);
  const float d = static_cast<float>(std::sqrt(0.0005));
  for (Index y = 0; y < 8; ++y)
    for (Index x = 0; x < 8; ++x) s.input(y, x, 0) = 0.5f + d;
  CHECK(!validate_sample(s, {0.001}).accepted);
  CHECK(validate_sample(s, {0.0001}).accepted);
}

TEST_CASE("sample folders round trip") {
  const fs::path dir = oracle::scratch("sample_io");
  const SyntheticCase sc = make_synthetic_case(5, 64, 80);
  DegradeConfig cfg;
  cfg.scribble.seed = 5;
  const DegradedSample s = assemble_sample(sc.gt, sc.object_mask, sc.reference, sc.instruction, cfg);
  write_sample(dir / "s0", s);
  const DegradedSample back = read_sample(dir / "s0");
  CHECK(back.input == s.input);
  CHECK(back.gt == s.gt);
  CHECK(back.mask == s.mask);
  CHECK(back.fg_box == s.fg_box);
  CHECK(back.instruction == s.instruction);
  CHECK(back.provenance.seed == 5);
  CHECK(back.provenance.params.get<DegradeConfig>().scribble == cfg.scribble);
  fs::remove_all(dir);
}

TEST_CASE("generate_dataset skips broken cases and ignores worker count") {
  const fs::path root = oracle::scratch("gen_dataset");
  write_synthetic_cases(root / "gt", 4, 77, 64, 80);
  fs::remove(root / "gt" / "case_002" / "object_mask.png");
  const DatasetReport r1 = generate_dataset(root / "gt", root / "a", {}, 9, 1);
  const DatasetReport r2 = generate_dataset(root / "gt", root / "b", {}, 9, 3);
  CHECK(r1.written.size() == 3);
  REQUIRE(r1.skipped.size() == 1);
  CHECK(r1.skipped[0].first == "case_002");
  CHECK(r1.skipped[0].second.find("object_mask") != std::string::npos);
  for (const auto& name : r1.written)
    for (const char* f : {"input.png", "gt.png", "mask.png", "ref.png", "meta.json"})
      CHECK(read_file(root / "a" / name / f) == read_file(root / "b" / name / f));
  const auto meta = nlohmann::json::parse(read_file(root / "a" / "case_000" / "meta.json"));
  CHECK(meta.at("provenance").at("seed").get<std::uint64_t>() == derive_seed(9, 0));
  fs::remove_all(root);
}

}  // TEST_SUITE
