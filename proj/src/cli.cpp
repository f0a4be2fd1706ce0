#include "regionrefine/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "regionrefine/boundary_loss.hpp"
#include "regionrefine/degrade.hpp"
#include "regionrefine/evalbench.hpp"
#include "regionrefine/pipeline.hpp"
#include "regionrefine/png_io.hpp"

namespace fs = std::filesystem;

namespace rr::cli {

namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  usage error\n"
    "  3  I/O error (missing or unwritable file)\n"
    "  4  decode error (bad PNG or JSON)\n"
    "  5  backend error (transport, timeout, HTTP status, payload, dimensions)\n"
    "  6  geometry error (empty region, invalid kernel size, shape mismatch)\n"
    "  7  no sample succeeded (degrade / eval)\n";

PipelineConfig resolve_pipeline(const std::string& config_path) {
  return config_path.empty() ? PipelineConfig{} : load_pipeline_config(config_path);
}

void log_config(const char* what, const nlohmann::json& j) { std::cerr << what << " config: " << j.dump() << "\n"; }

BBox parse_box(const std::string& text) {
  BBox b;
  char c1 = 0, c2 = 0, c3 = 0;
  std::istringstream in(text);
  if (!(in >> b.x1 >> c1 >> b.y1 >> c2 >> b.x2 >> c3 >> b.y2) || c1 != ',' || c2 != ',' || c3 != ',')
    throw ParameterError("--box expects x1,y1,x2,y2");
  return b;
}

struct RefineArgs {
  std::string input, mask, box, ref, instruction, config, out, backend, url, dump_dir, paste_mode;
};

int cmd_refine(const RefineArgs& a) {
  PipelineConfig cfg = resolve_pipeline(a.config);
  if (!a.backend.empty()) cfg.backend.kind = backend_kind_from_string(a.backend);
  if (!a.url.empty()) cfg.backend.http.base_url = a.url;
  if (!a.paste_mode.empty()) {
    nlohmann::json j = cfg;
    j["paste_mode"] = a.paste_mode;
    cfg = j.get<PipelineConfig>();
  }
  log_config("refine", cfg);

  const RasterImage input = read_png(a.input);
  BinaryMask mask;
  if (!a.box.empty())
    mask = mask_from_box(parse_box(a.box), input.height(), input.width());
  else
    mask = read_mask_png(a.mask);
  std::optional<RasterImage> ref;
  if (!a.ref.empty()) ref = read_png(a.ref);

  if (cfg.backend.kind == BackendKind::oracle) throw ParameterError("the oracle backend is only available in eval");
  const auto backend = make_refiner(cfg.backend);
  const RefineOutcome out = refine_region(input, mask, ref, a.instruction, cfg, *backend);
  write_png(a.out, out.output);

  if (!a.dump_dir.empty()) {
    const fs::path d = a.dump_dir;
    fs::create_directories(d);
    write_png(d / "crop.png", out.focused);
    write_png(d / "refined_crop.png", out.refined.refined);
    write_mask_png(d / "mask_c.png", out.mask_c);
    write_soft_png(d / "blend_mask.png", out.crop_alpha);
    write_soft_png(d / "canvas_alpha.png", out.canvas_alpha);
    write_file(d / "crop_spec.json", nlohmann::json(out.spec).dump(2) + "\n");
  }
  const auto& b = out.spec.box;
  std::cout << "refined region (" << b.x1 << "," << b.y1 << ")-(" << b.x2 << "," << b.y2 << ") at "
            << out.spec.target_w << "x" << out.spec.target_h << " via " << out.refined.backend_id << " -> " << a.out
            << "\n";
  return kOk;
}

int cmd_degrade(const std::string& gt_dir, const std::string& out_dir, const std::string& config_path,
                std::uint64_t seed, int workers) {
  DegradeConfig cfg;
  if (!config_path.empty()) {
    try {
      cfg = nlohmann::json::parse(read_file(config_path)).get<DegradeConfig>();
    } catch (const nlohmann::json::exception& e) {
      throw DecodeError(config_path + ": " + e.what());
    }
  }
  log_config("degrade", cfg);
  const DatasetReport rep = generate_dataset(gt_dir, out_dir, cfg, seed, workers);
  for (const auto& [name, reason] : rep.skipped) std::cerr << "skipped " << name << ": " << reason << "\n";
  std::cout << "wrote " << rep.written.size() << " samples, skipped " << rep.skipped.size() << " -> " << out_dir
            << "\n";
  return rep.written.empty() ? kNoSamples : kOk;
}

int cmd_eval(const std::string& dataset, const std::string& backend, const std::string& config_path,
             const std::string& url, const std::string& out, const std::string& csv, int workers) {
  PipelineConfig cfg = resolve_pipeline(config_path);
  if (!backend.empty()) {
    if (fs::is_regular_file(backend))
      cfg.backend = load_pipeline_config(backend).backend;
    else
      cfg.backend.kind = backend_kind_from_string(backend);
  }
  if (!url.empty()) cfg.backend.http.base_url = url;
  log_config("eval", cfg);

  BenchmarkOptions opts;
  opts.workers = workers;
  const MetricReport rep = run_benchmark(dataset, cfg, opts);
  if (!out.empty()) write_file(out, report_to_json(rep).dump(2) + "\n");
  if (!csv.empty()) write_file(csv, report_to_csv(rep));
  for (const auto& row : rep.per_sample)
    if (row.error) std::cerr << "sample " << row.id << " failed: " << *row.error << "\n";
  std::cout << to_string(cfg.backend.kind) << ": " << aggregate_line(rep) << "\n";
  return rep.succeeded == 0 ? kNoSamples : kOk;
}

int cmd_band(const std::string& mask_path, const std::string& config_path, const std::string& out,
             const std::string& heat_out) {
  const PipelineConfig cfg = resolve_pipeline(config_path);
  log_config("band", cfg);
  const BinaryMask mask = read_mask_png(mask_path);
  const BinaryMask band = boundary_band(mask, cfg.band);
  write_mask_png(out, band);
  if (!heat_out.empty()) {
    // Per-pixel loss weight 1 + alpha * B, scaled to [0,1].
    const double top = 1.0 + cfg.band.alpha;
    SoftMask heat((band.px.cast<float>() * static_cast<float>(cfg.band.alpha) + 1.0f) / static_cast<float>(top));
    write_soft_png(heat_out, heat);
  }
  std::cout << "band pixels: " << band.count() << " -> " << out << "\n";
  return kOk;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const EmptyRegion& e) {
    std::cerr << "error: empty region: " << e.what() << "\n";
    return kGeometry;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kGeometry;
  } catch (const DecodeError& e) {
    std::cerr << "error: decode: " << e.what() << "\n";
    return kDecode;
  } catch (const IoError& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return kIo;
  } catch (const BackendError& e) {
    std::cerr << "error: backend: " << e.what() << "\n";
    return kBackend;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Region-specific image refinement: focus, refine, paste back."};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  RefineArgs ra;
  auto* refine = app.add_subcommand("refine", "Refine the masked region of one image");
  refine->add_option("input", ra.input, "Input PNG")->required();
  auto* mask_opt = refine->add_option("mask", ra.mask, "Scribble mask PNG (pixel > 127 is inside)");
  auto* box_opt = refine->add_option("--box", ra.box, "Region box x1,y1,x2,y2 instead of a mask");
  mask_opt->excludes(box_opt);
  refine->add_option("--ref", ra.ref, "Reference PNG");
  refine->add_option("--instruction", ra.instruction, "Refinement instruction")->required();
  refine->add_option("--config", ra.config, "Pipeline config JSON");
  refine->add_option("--out", ra.out, "Output PNG")->required();
  refine->add_option("--backend", ra.backend, "identity | external (overrides config)");
  refine->add_option("--backend-url", ra.url, "External backend base URL (else $REGIONREFINE_BACKEND_URL)");
  refine->add_option("--dump-debug", ra.dump_dir, "Directory for crop, blend masks and crop spec");
  refine->add_option("--paste-mode", ra.paste_mode, "canvas | crop_literal");

  std::string gt_dir, deg_out, deg_config;
  std::uint64_t deg_seed = 0;
  int deg_workers = 1;
  auto* degrade = app.add_subcommand("degrade", "Build a degraded dataset from clean cases");
  degrade->add_option("gt_dir", gt_dir, "Folder of cases (gt.png, object_mask.png, [ref.png], [instruction.txt])")
      ->required();
  degrade->add_option("--out", deg_out, "Dataset output folder")->required();
  degrade->add_option("--config", deg_config, "Degradation config JSON");
  degrade->add_option("--seed", deg_seed, "Global seed");
  degrade->add_option("--workers", deg_workers, "Worker threads")->check(CLI::PositiveNumber);

  std::string ev_dir, ev_backend, ev_config, ev_url, ev_out, ev_csv;
  int ev_workers = 1;
  auto* eval = app.add_subcommand("eval", "Run a backend over a dataset and report fg/bg metrics");
  eval->add_option("dataset_dir", ev_dir, "Dataset folder written by degrade")->required();
  eval->add_option("--backend", ev_backend, "identity | oracle | external, or a config JSON path");
  eval->add_option("--config", ev_config, "Pipeline config JSON");
  eval->add_option("--backend-url", ev_url, "External backend base URL");
  eval->add_option("--out", ev_out, "Report JSON path");
  eval->add_option("--csv", ev_csv, "Aggregate CSV path");
  eval->add_option("--workers", ev_workers, "Worker threads")->check(CLI::PositiveNumber);

  std::string band_mask, band_config, band_out, band_heat;
  auto* band = app.add_subcommand("band", "Write the boundary band of a mask");
  band->add_option("mask", band_mask, "Mask PNG")->required();
  band->add_option("--config", band_config, "Pipeline config JSON (band section)");
  band->add_option("--out", band_out, "Band PNG")->required();
  band->add_option("--heat", band_heat, "Optional PNG of the per-pixel loss weight");

  std::string syn_out;
  int syn_count = 10;
  std::uint64_t syn_seed = 0;
  Index syn_h = 192, syn_w = 256;
  auto* synth = app.add_subcommand("synth", "Write procedural clean cases for degrade");
  synth->add_option("--out", syn_out, "Output folder")->required();
  synth->add_option("--count", syn_count, "Number of cases")->check(CLI::PositiveNumber);
  synth->add_option("--seed", syn_seed, "Seed");
  synth->add_option("--height", syn_h, "Canvas height");
  synth->add_option("--width", syn_w, "Canvas width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  return guarded([&] {
    if (*refine) {
      if (ra.mask.empty() && ra.box.empty()) {
        std::cerr << "error: refine needs a mask or --box\n";
        return static_cast<int>(kUsage);
      }
      return cmd_refine(ra);
    }
    if (*degrade) return cmd_degrade(gt_dir, deg_out, deg_config, deg_seed, deg_workers);
    if (*eval) return cmd_eval(ev_dir, ev_backend, ev_config, ev_url, ev_out, ev_csv, ev_workers);
    if (*band) return cmd_band(band_mask, band_config, band_out, band_heat);
    if (*synth) {
      write_synthetic_cases(syn_out, syn_count, syn_seed, syn_h, syn_w);
      std::cout << "wrote " << syn_count << " cases -> " << syn_out << "\n";
      return static_cast<int>(kOk);
    }
    return static_cast<int>(kUsage);
  });
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("regionrefine");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace rr::cli
