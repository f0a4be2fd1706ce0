#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "regionrefine/metrics.hpp"
#include "regionrefine/pipeline.hpp"

namespace rr {

// Foreground is the annotated object box; background is everything else.
struct RegionSplit {
  BBox fg_box;
};

struct SampleRow {
  std::string id;
  double mse = 0.0;
  double ssim = 0.0;
  double mse_bg = 0.0;
  double ssim_bg = 0.0;
  std::optional<std::string> error;  // set when the sample failed; metrics then meaningless
};

struct MetricReport {
  std::vector<SampleRow> per_sample;
  SampleRow aggregate;  // arithmetic means over successful rows, id "mean"
  int samples = 0;
  int succeeded = 0;
  int failed = 0;
  nlohmann::json config;
};

// fg metrics compare output with gt inside the box, bg metrics compare output
// with input outside it.
SampleRow evaluate_sample(const RasterImage& output, const RasterImage& gt, const RasterImage& input,
                          const RegionSplit& split, const SsimParams& ssim_params = {});

struct BenchmarkOptions {
  int workers = 1;
  SsimParams ssim;
};

// For every sample folder (sorted): focus -> refine -> paste back -> evaluate.
// Per-sample failures become error rows. Throws IoError("no samples") for an
// empty dataset.
MetricReport run_benchmark(const std::filesystem::path& dataset_dir, const PipelineConfig& pipeline,
                           const BenchmarkOptions& options = {});

// Columns not computed here (LPIPS, VGG, DINO, CLIP) are written as "n/a".
nlohmann::json report_to_json(const MetricReport& report);
std::string report_to_csv(const MetricReport& report);
// One human-readable aggregate line, three decimals (four for SSIM_bg).
std::string aggregate_line(const MetricReport& report);

}  // namespace rr
