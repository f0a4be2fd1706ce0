#include "regionrefine/evalbench.hpp"

#include <atomic>
#include <cstdio>
#include <thread>

#include "regionrefine/degrade.hpp"
#include "regionrefine/png_io.hpp"

namespace fs = std::filesystem;

namespace rr {

SampleRow evaluate_sample(const RasterImage& output, const RasterImage& gt, const RasterImage& input,
                          const RegionSplit& split, const SsimParams& ssim_params) {
  if (!output.same_shape(gt) || !output.same_shape(input)) throw ParameterError("evaluate_sample: shape mismatch");
  const BinaryMask fg = box_region(split.fg_box, output.height(), output.width());
  const BinaryMask bg = mask_not(fg);
  SampleRow row;
  row.mse = mse(output, gt, fg);
  row.ssim = ssim(output, gt, fg, ssim_params);
  row.mse_bg = mse(output, input, bg);
  row.ssim_bg = ssim(output, input, bg, ssim_params);
  return row;
}

MetricReport run_benchmark(const fs::path& dataset_dir, const PipelineConfig& pipeline,
                           const BenchmarkOptions& options) {
  const auto dirs = list_sample_dirs(dataset_dir);
  if (dirs.empty()) throw IoError("no samples in " + dataset_dir.string());

  MetricReport report;
  report.per_sample.resize(dirs.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < dirs.size(); i = next++) {
      SampleRow& row = report.per_sample[i];
      row.id = dirs[i].filename().string();
      try {
        const DegradedSample s = read_sample(dirs[i]);
        const auto backend = make_refiner(pipeline.backend, &s.gt);
        const RefineOutcome out = refine_region(s.input, s.mask, s.reference, s.instruction, pipeline, *backend);
        // Score what would be written to disk.
        SampleRow scored = evaluate_sample(quantize8(out.output), s.gt, s.input, {s.fg_box}, options.ssim);
        scored.id = row.id;
        row = scored;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const int n = std::max(1, options.workers);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  // Fixed reduction order: sample id order.
  report.samples = static_cast<int>(dirs.size());
  report.aggregate.id = "mean";
  for (const auto& row : report.per_sample) {
    if (row.error) {
      ++report.failed;
      continue;
    }
    ++report.succeeded;
    report.aggregate.mse += row.mse;
    report.aggregate.ssim += row.ssim;
    report.aggregate.mse_bg += row.mse_bg;
    report.aggregate.ssim_bg += row.ssim_bg;
  }
  if (report.succeeded > 0) {
    const double k = report.succeeded;
    report.aggregate.mse /= k;
    report.aggregate.ssim /= k;
    report.aggregate.mse_bg /= k;
    report.aggregate.ssim_bg /= k;
  }

  nlohmann::json cfg = pipeline;
  cfg["ssim"] = {{"window", options.ssim.window},
                 {"sigma", options.ssim.sigma},
                 {"k1", options.ssim.k1},
                 {"k2", options.ssim.k2},
                 {"data_range", options.ssim.data_range}};
  cfg["dataset"] = dataset_dir.filename().string();
  report.config = cfg;
  return report;
}

namespace {

nlohmann::json row_json(const SampleRow& r) {
  nlohmann::json j = {{"id", r.id}, {"lpips", "n/a"}, {"vgg", "n/a"}, {"dino", "n/a"}, {"clip", "n/a"},
                      {"lpips_bg", "n/a"}};
  if (r.error) {
    j["error"] = *r.error;
    return j;
  }
  j["mse"] = r.mse;
  j["ssim"] = r.ssim;
  j["mse_bg"] = r.mse_bg;
  j["ssim_bg"] = r.ssim_bg;
  return j;
}

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

nlohmann::json report_to_json(const MetricReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.per_sample) rows.push_back(row_json(r));
  return {{"config", report.config},
          {"per_sample", rows},
          {"aggregate", row_json(report.aggregate)},
          {"counts", {{"samples", report.samples}, {"succeeded", report.succeeded}, {"failed", report.failed}}}};
}

std::string report_to_csv(const MetricReport& report) {
  const std::string backend = report.config.contains("backend") ? report.config["backend"].value("kind", "") : "";
  const auto& a = report.aggregate;
  std::string out = "backend,samples,failed,mse,lpips,vgg,dino,clip,ssim,mse_bg,lpips_bg,ssim_bg\n";
  out += backend + "," + std::to_string(report.samples) + "," + std::to_string(report.failed) + "," +
         fmt(a.mse, 6) + ",n/a,n/a,n/a,n/a," + fmt(a.ssim, 6) + "," + fmt(a.mse_bg, 6) + ",n/a," +
         fmt(a.ssim_bg, 6) + "\n";
  return out;
}

std::string aggregate_line(const MetricReport& report) {
  const auto& a = report.aggregate;
  return "MSE " + fmt(a.mse, 3) + "  SSIM " + fmt(a.ssim, 3) + "  MSE_bg " + fmt(a.mse_bg, 3) + "  SSIM_bg " +
         fmt(a.ssim_bg, 4) + "  (" + std::to_string(report.succeeded) + "/" + std::to_string(report.samples) +
         " samples)";
}

}  // namespace rr
