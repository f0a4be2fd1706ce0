#include <doctest.h>

#include <fstream>

#include "oracles.hpp"
#include "regionrefine/cli.hpp"
#include "regionrefine/degrade.hpp"
#include "regionrefine/evalbench.hpp"
#include "regionrefine/mock_server.hpp"
#include "regionrefine/png_io.hpp"

using namespace rr;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) { return cli::run(args); }

std::string tree_digest(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += fs::relative(f, root).string() + ":" + sha256_hex(read_file(f)) + "\n";
  return sha256_hex(all);
}

// Writes a synthetic case as input.png / mask.png for refine.
void write_refine_case(const fs::path& dir, std::uint64_t seed) {
  const SyntheticCase sc = make_synthetic_case(seed, 96, 128);
  write_png(dir / "input.png", sc.gt);
  write_mask_png(dir / "mask.png", sc.object_mask);
  write_png(dir / "ref.png", sc.reference);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage and exit codes") {
  CHECK(run({}) == cli::kUsage);
  CHECK(run({"bogus"}) == cli::kUsage);
  CHECK(run({"refine", "in.png"}) == cli::kUsage);
  CHECK(run({"--help"}) == cli::kOk);
  const fs::path dir = oracle::scratch("cli_codes");
  CHECK(run({"refine", (dir / "missing.png").string(), (dir / "m.png").string(), "--instruction", "x", "--out",
             (dir / "o.png").string()}) == cli::kIo);
  write_file(dir / "bad.png", "not a png");
  write_mask_png(dir / "m.png", BinaryMask(8, 8, 1));
  CHECK(run({"refine", (dir / "bad.png").string(), (dir / "m.png").string(), "--instruction", "x", "--out",
             (dir / "o.png").string()}) == cli::kDecode);
  write_file(dir / "bad.json", "{ nope");
  write_png(dir / "in.png", RasterImage(8, 8, 3, 0.5f));
  CHECK(run({"refine", (dir / "in.png").string(), (dir / "m.png").string(), "--instruction", "x", "--config",
             (dir / "bad.json").string(), "--out", (dir / "o.png").string()}) == cli::kDecode);
  CHECK(run({"refine", (dir / "in.png").string(), (dir / "m.png").string(), "--instruction", "x", "--backend",
             "external", "--backend-url", "http://127.0.0.1:9", "--out", (dir / "o.png").string()}) == cli::kBackend);
  fs::remove_all(dir);
}

TEST_CASE("refine with the identity backend reproduces the input bytes") {
  const fs::path dir = oracle::scratch("cli_identity");
  write_refine_case(dir, 4);
  CHECK(run({"refine", (dir / "input.png").string(), (dir / "mask.png").string(), "--instruction", "keep", "--out",
             (dir / "out.png").string(), "--dump-debug", (dir / "debug").string()}) == cli::kOk);
  CHECK(read_file(dir / "out.png") == read_file(dir / "input.png"));
  for (const char* f : {"crop.png", "refined_crop.png", "mask_c.png", "blend_mask.png", "canvas_alpha.png",
                        "crop_spec.json"})
    CHECK(fs::exists(dir / "debug" / f));
  const auto spec = nlohmann::json::parse(read_file(dir / "debug" / "crop_spec.json")).get<CropSpec>();
  CHECK(spec.margin == 64);

  CHECK(run({"refine", (dir / "input.png").string(), "--box", "10,10,40,30", "--instruction", "keep", "--out",
             (dir / "box.png").string()}) == cli::kOk);
  CHECK(read_file(dir / "box.png") == read_file(dir / "input.png"));
  fs::remove_all(dir);
}

TEST_CASE("refine with an empty mask is a geometry error") {
  const fs::path dir = oracle::scratch("cli_empty");
  write_png(dir / "in.png", RasterImage(16, 16, 3, 0.5f));
  write_mask_png(dir / "m.png", BinaryMask(16, 16));
  CHECK(run({"refine", (dir / "in.png").string(), (dir / "m.png").string(), "--instruction", "x", "--out",
             (dir / "o.png").string()}) == cli::kGeometry);
  CHECK(!fs::exists(dir / "o.png"));
  fs::remove_all(dir);
}

TEST_CASE("refine against the mock service pastes the reference") {
  const fs::path dir = oracle::scratch("cli_mock");
  write_refine_case(dir, 6);
  MockRefinerServer server({MockMode::reference});
  server.start();
  CHECK(run({"refine", (dir / "input.png").string(), (dir / "mask.png").string(), "--ref", (dir / "ref.png").string(),
             "--instruction", "paste", "--backend", "external", "--backend-url", server.url(), "--out",
             (dir / "out.png").string(), "--dump-debug", (dir / "debug").string()}) == cli::kOk);
  const RasterImage in = read_png(dir / "input.png"), out = read_png(dir / "out.png");
  const BinaryMask m = read_mask_png(dir / "mask.png");
  const auto spec = nlohmann::json::parse(read_file(dir / "debug" / "crop_spec.json")).get<CropSpec>();
  // Where the canvas alpha saturates, the output is the original plus the
  // upsampled (reference - focused view) residual, i.e. the reference composite.
  const RasterImage ref_canvas = resize(read_png(dir / "ref.png"), spec.box.height(), spec.box.width());
  const BinaryMask core = erode(m, 11);
  REQUIRE(core.any());
  double err = 0.0;
  Index n = 0;
  for (Index y = 0; y < in.height(); ++y)
    for (Index x = 0; x < in.width(); ++x) {
      if (!core(y, x)) continue;
      for (Index c = 0; c < 3; ++c) {
        err += std::abs(out(y, x, c) - ref_canvas(y - spec.box.y1, x - spec.box.x1, c));
        ++n;
      }
    }
  CHECK(err / static_cast<double>(n) < 0.05);
  CHECK(!(out == in));
  fs::remove_all(dir);
}

TEST_CASE("band command") {
  const fs::path dir = oracle::scratch("cli_band");
  write_mask_png(dir / "empty.png", BinaryMask(40, 40));
  CHECK(run({"band", (dir / "empty.png").string(), "--out", (dir / "b0.png").string()}) == cli::kOk);
  CHECK(!read_mask_png(dir / "b0.png").any());
  const BinaryMask d = oracle::disk(80, 80, 40, 40, 20);
  write_mask_png(dir / "disk.png", d);
  CHECK(run({"band", (dir / "disk.png").string(), "--out", (dir / "b1.png").string(), "--heat",
             (dir / "heat.png").string()}) == cli::kOk);
  const BinaryMask b = read_mask_png(dir / "b1.png");
  CHECK(!mask_and(b, erode(d, 17)).any());
  CHECK(!mask_and_not(mask_and_not(d, erode(d, 3)), b).any());
  CHECK(b(40, 40) == 0);
  CHECK(b(40, 20) == 1);
  CHECK(fs::exists(dir / "heat.png"));
  fs::remove_all(dir);
}

TEST_CASE("degrade and eval are deterministic") {
  const fs::path dir = oracle::scratch("cli_det");
  CHECK(run({"synth", "--out", (dir / "gt").string(), "--count", "5", "--seed", "3", "--height", "80", "--width",
             "96"}) == cli::kOk);
  fs::remove(dir / "gt" / "case_001" / "object_mask.png");
  CHECK(run({"degrade", (dir / "gt").string(), "--out", (dir / "d1").string(), "--seed", "5"}) == cli::kOk);
  CHECK(run({"degrade", (dir / "gt").string(), "--out", (dir / "d2").string(), "--seed", "5", "--workers", "4"}) ==
        cli::kOk);
  CHECK(tree_digest(dir / "d1") == tree_digest(dir / "d2"));
  CHECK(!fs::exists(dir / "d1" / "case_001"));
  CHECK(list_sample_dirs(dir / "d1").size() == 4);

  CHECK(run({"eval", (dir / "d1").string(), "--backend", "identity", "--out", (dir / "r1.json").string(), "--csv",
             (dir / "r1.csv").string()}) == cli::kOk);
  CHECK(run({"eval", (dir / "d1").string(), "--backend", "identity", "--out", (dir / "r2.json").string(), "--workers",
             "4"}) == cli::kOk);
  CHECK(read_file(dir / "r1.json") == read_file(dir / "r2.json"));
  const auto rep = nlohmann::json::parse(read_file(dir / "r1.json"));
  CHECK(rep.at("counts").at("samples") == 4);
  for (const auto& row : rep.at("per_sample")) {
    CHECK(row.at("mse_bg").get<double>() == 0.0);
    CHECK(row.at("lpips") == "n/a");
  }
  CHECK(read_file(dir / "r1.csv").find("identity,4,0,") != std::string::npos);

  // The echoed config re-parses to the config that produced it.
  const PipelineConfig echoed = rep.at("config").get<PipelineConfig>();
  CHECK(echoed == PipelineConfig{});

  CHECK(run({"eval", (dir / "d1").string(), "--backend", "oracle", "--out", (dir / "r3.json").string()}) == cli::kOk);
  const auto orc = nlohmann::json::parse(read_file(dir / "r3.json"));
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(orc["per_sample"][i]["mse"].get<double>() < rep["per_sample"][i]["mse"].get<double>());
  fs::remove_all(dir);
}

TEST_CASE("degrade with nothing usable and eval of an empty folder") {
  const fs::path dir = oracle::scratch("cli_nothing");
  fs::create_directories(dir / "gt" / "only");
  CHECK(run({"degrade", (dir / "gt").string(), "--out", (dir / "d").string()}) == cli::kNoSamples);
  fs::create_directories(dir / "empty");
  CHECK(run({"eval", (dir / "empty").string()}) == cli::kIo);
  CHECK_THROWS_AS(run_benchmark(dir / "empty", {}), IoError);
  fs::remove_all(dir);
}

TEST_CASE("pipeline config") {
  const PipelineConfig def;
  CHECK(def.focus.margin == 64);
  CHECK(def.focus.budget == 1024 * 1024);
  CHECK(def.focus.granule == 8);
  CHECK(def.blend.dilate_size == 7);
  CHECK(def.blend.blur_size == 11);
  CHECK(def.band == BandParams{17, 17, 9.0});

  const auto partial = nlohmann::json::parse(R"({"margin": 32, "blend": {"sigma": 2.5}, "band": {"alpha": 3}})");
  const PipelineConfig c = partial.get<PipelineConfig>();
  CHECK(c.focus.margin == 32);
  CHECK(c.blend.blur_size == 11);
  CHECK(*c.blend.sigma == 2.5);
  CHECK(c.band.alpha == 3.0);
  CHECK(nlohmann::json(c).get<PipelineConfig>() == c);
  CHECK_THROWS_AS(nlohmann::json::parse(R"({"blend": {"r": 4}})").get<PipelineConfig>(), ParameterError);
}

TEST_CASE("report aggregates are row means") {
  const fs::path dir = oracle::scratch("eval_mean");
  write_synthetic_cases(dir / "gt", 3, 8, 64, 80);
  generate_dataset(dir / "gt", dir / "d", {}, 1, 1);
  PipelineConfig cfg;
  cfg.backend.kind = BackendKind::oracle;
  const MetricReport rep = run_benchmark(dir / "d", cfg);
  REQUIRE(rep.succeeded == 3);
  double m = 0.0, s = 0.0;
  for (const auto& r : rep.per_sample) m += r.mse, s += r.ssim_bg;
  CHECK(rep.aggregate.mse == doctest::Approx(m / 3).epsilon(1e-15));
  CHECK(rep.aggregate.ssim_bg == doctest::Approx(s / 3).epsilon(1e-15));
  CHECK(aggregate_line(rep).rfind("MSE ", 0) == 0);
  fs::remove_all(dir);
}

}  // TEST_SUITE
