#include "regionrefine/degrade.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

#include "regionrefine/metrics.hpp"
#include "regionrefine/png_io.hpp"
#include "regionrefine/rng.hpp"

namespace fs = std::filesystem;

namespace rr {

// ---------------------------------------------------------------------------
// Scribbles

namespace {

void stamp_disc(BinaryMask& mask, double cx, double cy, double radius) {
  const Index y0 = std::max<Index>(0, static_cast<Index>(std::ceil(cy - radius)));
  const Index y1 = std::min<Index>(mask.height() - 1, static_cast<Index>(std::floor(cy + radius)));
  const Index x0 = std::max<Index>(0, static_cast<Index>(std::ceil(cx - radius)));
  const Index x1 = std::min<Index>(mask.width() - 1, static_cast<Index>(std::floor(cx + radius)));
  const double r2 = radius * radius;
  for (Index y = y0; y <= y1; ++y) {
    const double dy = static_cast<double>(y) - cy;
    for (Index x = x0; x <= x1; ++x) {
      const double dx = static_cast<double>(x) - cx;
      if (dx * dx + dy * dy <= r2) mask(y, x) = 1;
    }
  }
}

void stamp_quadratic(BinaryMask& mask, const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                     const Eigen::Vector2d& p2, double radius) {
  // Spacing of half a radius keeps consecutive discs overlapping.
  const double spacing = std::max(0.25, 0.5 * radius);
  const double len = (p1 - p0).norm() + (p2 - p1).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(len / spacing)));
  for (int j = 0; j <= steps; ++j) {
    const double t = static_cast<double>(j) / steps;
    const double u = 1.0 - t;
    const Eigen::Vector2d p = u * u * p0 + 2.0 * u * t * p1 + t * t * p2;
    stamp_disc(mask, p.x(), p.y(), radius);
  }
}

}  // namespace

void rasterize_stroke(BinaryMask& mask, const std::vector<Eigen::Vector2d>& pts, double radius) {
  if (pts.empty()) return;
  if (pts.size() == 1) {
    stamp_disc(mask, pts[0].x(), pts[0].y(), radius);
    return;
  }
  std::size_t i = 0;
  for (; i + 2 < pts.size(); i += 2) stamp_quadratic(mask, pts[i], pts[i + 1], pts[i + 2], radius);
  if (i + 1 < pts.size()) stamp_quadratic(mask, pts[i], 0.5 * (pts[i] + pts[i + 1]), pts[i + 1], radius);
}

BinaryMask sample_scribble(const BinaryMask& object_mask, const ScribbleParams& p) {
  if (p.strokes_min < 1 || p.strokes_max < p.strokes_min) throw ParameterError("scribble: bad stroke count range");
  if (!(p.width_min > 0.0) || p.width_max < p.width_min) throw ParameterError("scribble: bad width range");
  if (p.curve_points < 2) throw ParameterError("scribble: need at least two control points");
  const BBox obj = bbox_from_mask(object_mask);
  const BinaryMask support = dilate(object_mask, p.object_dilate);

  std::vector<Eigen::Vector2d> candidates;
  for (Index y = 0; y < support.height(); ++y)
    for (Index x = 0; x < support.width(); ++x)
      if (support(y, x)) candidates.emplace_back(static_cast<double>(x), static_cast<double>(y));
  const double diag = std::hypot(static_cast<double>(obj.width()), static_cast<double>(obj.height()));

  Rng rng(p.seed);
  for (int attempt = 0; attempt <= p.max_retries; ++attempt) {
    BinaryMask strokes(object_mask.height(), object_mask.width());
    const auto n = rng.uniform_int(p.strokes_min, p.strokes_max);
    for (std::int64_t s = 0; s < n; ++s) {
      const double width = diag * rng.uniform(p.width_min, p.width_max);
      std::vector<Eigen::Vector2d> pts;
      for (int k = 0; k < p.curve_points; ++k)
        pts.push_back(candidates[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(candidates.size()) - 1))]);
      rasterize_stroke(strokes, pts, std::max(0.5, 0.5 * width));
    }
    BinaryMask out = mask_and(strokes, support);
    if (out.any()) return out;
  }
  throw EmptyRegion("scribble sampling produced an empty mask after " + std::to_string(p.max_retries) + " retries");
}

// ---------------------------------------------------------------------------
// Inpainting

std::string inpainter_id(const InpainterConfig& c) {
  if (c.kind == InpainterKind::external) return "external";
  return "normconv-k" + std::to_string(c.kernel_size);
}

namespace {

RasterImage inpaint_builtin(const RasterImage& gt, const BinaryMask& mask, const InpainterConfig& cfg,
                            std::uint64_t noise_seed) {
  RasterImage out = gt;
  if (!mask.any()) return out;
  const Index h = gt.height(), w = gt.width();

  if (mask.count() == h * w) {
    out = gaussian_blur(gt, cfg.kernel_size, cfg.sigma);
  } else {
    // blur(I * K) / blur(K) over the known set K. The border renormalization of
    // gaussian_blur divides numerator and denominator alike, so it cancels.
    Plane<double> known = (mask.px == 0).cast<double>();
    std::vector<Plane<double>> values;
    for (Index c = 0; c < gt.channels(); ++c) values.push_back(gt.channel(c).cast<double>() * known);
    while ((known == 0.0).any()) {
      const Plane<double> den = gaussian_blur(known, cfg.kernel_size, cfg.sigma);
      const Plane<bool> fill = (known == 0.0) && (den > 0.0);
      if (!fill.any()) throw ParameterError("inpaint: hole pixels without any known support");
      for (Index c = 0; c < gt.channels(); ++c) {
        const Plane<double> num = gaussian_blur(values[static_cast<std::size_t>(c)], cfg.kernel_size, cfg.sigma);
        values[static_cast<std::size_t>(c)] = fill.select(num / den, values[static_cast<std::size_t>(c)]);
      }
      known = fill.select(1.0, known);
    }
    for (Index c = 0; c < gt.channels(); ++c) {
      const Plane<float> filled = values[static_cast<std::size_t>(c)].cast<float>();
      out.channel(c) = (mask.px != 0).select(filled, gt.channel(c));
    }
  }

  if (cfg.noise_amplitude > 0.0) {
    Rng rng(noise_seed);
    for (Index c = 0; c < out.channels(); ++c)
      for (Index y = 0; y < h; ++y)
        for (Index x = 0; x < w; ++x) {
          if (!mask(y, x)) continue;
          const double v = static_cast<double>(out(y, x, c)) + cfg.noise_amplitude * rng.uniform(-1.0, 1.0);
          out(y, x, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
  }
  return out;
}

RasterImage inpaint_external(const RasterImage& gt, const BinaryMask& mask, const InpainterConfig& cfg) {
  CropSpec full;
  full.box = {0, 0, gt.width() - 1, gt.height() - 1};
  full.canvas_h = full.target_h = gt.height();
  full.canvas_w = full.target_w = gt.width();
  HttpRefiner client(cfg.http);
  RefineRequest request{gt, std::nullopt, mask, "inpaint the masked region", full};
  return refine(request, client).refined;
}

}  // namespace

RasterImage inpaint(const RasterImage& gt, const BinaryMask& mask, const InpainterConfig& config,
                    std::uint64_t noise_seed) {
  if (mask.height() != gt.height() || mask.width() != gt.width())
    throw ParameterError("inpaint: mask and image differ in shape");
  require_odd_size(config.kernel_size, "inpaint kernel");
  if (config.kind == InpainterKind::external) return inpaint_external(gt, mask, config);
  return inpaint_builtin(gt, mask, config, noise_seed);
}

// ---------------------------------------------------------------------------
// Samples

void to_json(nlohmann::json& j, const DegradeConfig& c) {
  const auto& s = c.scribble;
  const auto& in = c.inpainter;
  j = {{"scribble",
        {{"seed", s.seed},
         {"strokes", {s.strokes_min, s.strokes_max}},
         {"width", {s.width_min, s.width_max}},
         {"object_dilate", s.object_dilate},
         {"curve_points", s.curve_points},
         {"max_retries", s.max_retries}}},
       {"inpainter",
        {{"kind", in.kind == InpainterKind::builtin ? "builtin" : "external"},
         {"kernel_size", in.kernel_size},
         {"sigma", in.sigma ? nlohmann::json(*in.sigma) : nlohmann::json("auto")},
         {"noise_amplitude", in.noise_amplitude},
         {"url", in.http.base_url}}},
       {"light_blend", {{"r", c.light_blend.dilate_size}, {"k", c.light_blend.blur_size}}},
       {"validator", {{"min_region_mse", c.validator.min_region_mse}}},
       {"fg_pad", c.fg_pad}};
}

void from_json(const nlohmann::json& j, DegradeConfig& c) {
  if (j.contains("scribble")) {
    const auto& s = j["scribble"];
    auto& d = c.scribble;
    if (s.contains("seed")) d.seed = s["seed"].get<std::uint64_t>();
    if (s.contains("strokes")) {
      d.strokes_min = s["strokes"].at(0).get<int>();
      d.strokes_max = s["strokes"].at(1).get<int>();
    }
    if (s.contains("width")) {
      d.width_min = s["width"].at(0).get<double>();
      d.width_max = s["width"].at(1).get<double>();
    }
    if (s.contains("object_dilate")) d.object_dilate = s["object_dilate"].get<int>();
    if (s.contains("curve_points")) d.curve_points = s["curve_points"].get<int>();
    if (s.contains("max_retries")) d.max_retries = s["max_retries"].get<int>();
  }
  if (j.contains("inpainter")) {
    const auto& s = j["inpainter"];
    auto& d = c.inpainter;
    if (s.contains("kind")) {
      const auto k = s["kind"].get<std::string>();
      if (k == "builtin")
        d.kind = InpainterKind::builtin;
      else if (k == "external")
        d.kind = InpainterKind::external;
      else
        throw ParameterError("config: unknown inpainter kind '" + k + "'");
    }
    if (s.contains("kernel_size")) d.kernel_size = s["kernel_size"].get<int>();
    if (s.contains("sigma")) {
      if (s["sigma"].is_number())
        d.sigma = s["sigma"].get<double>();
      else
        d.sigma.reset();
    }
    if (s.contains("noise_amplitude")) d.noise_amplitude = s["noise_amplitude"].get<double>();
    if (s.contains("url")) d.http.base_url = s["url"].get<std::string>();
  }
  if (j.contains("light_blend")) {
    const auto& s = j["light_blend"];
    if (s.contains("r")) c.light_blend.dilate_size = s["r"].get<int>();
    if (s.contains("k")) c.light_blend.blur_size = s["k"].get<int>();
  }
  if (j.contains("validator") && j["validator"].contains("min_region_mse"))
    c.validator.min_region_mse = j["validator"]["min_region_mse"].get<double>();
  if (j.contains("fg_pad")) c.fg_pad = j["fg_pad"].get<Index>();
}

DegradedSample assemble_sample(const RasterImage& gt, const BinaryMask& object_mask,
                               const std::optional<RasterImage>& reference, const std::string& instruction,
                               const DegradeConfig& config) {
  if (object_mask.height() != gt.height() || object_mask.width() != gt.width())
    throw ParameterError("assemble_sample: object mask and image differ in shape");
  DegradedSample s;
  s.gt = quantize8(gt);
  s.reference = reference;
  s.instruction = instruction;
  s.mask = sample_scribble(object_mask, config.scribble);

  const std::uint64_t noise_seed = derive_seed(config.scribble.seed, 0x1A9A1);
  const RasterImage inpainted = inpaint(s.gt, s.mask, config.inpainter, noise_seed);
  s.input = quantize8(composite(inpainted, s.gt, blend_mask(s.mask, config.light_blend)));

  s.object_box = bbox_from_mask(object_mask);
  s.fg_box = expand_box(bbox_from_mask(dilate(object_mask, config.scribble.object_dilate)), config.fg_pad,
                        gt.height(), gt.width());
  s.provenance.seed = config.scribble.seed;
  s.provenance.inpainter_id = inpainter_id(config.inpainter);
  s.provenance.params = config;
  return s;
}

Verdict validate_sample(const DegradedSample& sample, const ValidatorConfig& validator) {
  if (!sample.mask.any()) return {false, "empty mask"};
  const double m = mse(sample.input, sample.gt, sample.mask);
  if (m == 0.0) return {false, "no defect"};
  if (m < validator.min_region_mse)
    return {false, "degradation below threshold (region mse " + std::to_string(m) + ")"};
  return {true, ""};
}

void write_sample(const fs::path& dir, const DegradedSample& s) {
  fs::create_directories(dir);
  write_png(dir / "input.png", s.input);
  write_png(dir / "gt.png", s.gt);
  write_mask_png(dir / "mask.png", s.mask);
  if (s.reference) write_png(dir / "ref.png", *s.reference);
  const nlohmann::json meta = {{"instruction", s.instruction},
                               {"object_box", s.object_box},
                               {"fg_box", s.fg_box},
                               {"scribble_box", bbox_from_mask(s.mask)},
                               {"has_reference", s.reference.has_value()},
                               {"provenance",
                                {{"seed", s.provenance.seed},
                                 {"inpainter_id", s.provenance.inpainter_id},
                                 {"params", s.provenance.params}}}};
  write_file(dir / "meta.json", meta.dump(2) + "\n");
}

DegradedSample read_sample(const fs::path& dir) {
  DegradedSample s;
  s.input = read_png(dir / "input.png");
  s.gt = read_png(dir / "gt.png");
  s.mask = read_mask_png(dir / "mask.png");
  if (fs::exists(dir / "ref.png")) s.reference = read_png(dir / "ref.png");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(dir / "meta.json"));
    s.instruction = meta.at("instruction").get<std::string>();
    s.object_box = meta.at("object_box").get<BBox>();
    s.fg_box = meta.at("fg_box").get<BBox>();
    if (meta.contains("provenance")) {
      const auto& p = meta["provenance"];
      s.provenance.seed = p.value("seed", std::uint64_t{0});
      s.provenance.inpainter_id = p.value("inpainter_id", std::string());
      if (p.contains("params")) s.provenance.params = p["params"];
    }
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError((dir / "meta.json").string() + ": " + e.what());
  }
  if (!s.input.same_shape(s.gt)) throw DecodeError(dir.string() + ": input and gt differ in shape");
  if (s.mask.height() != s.input.height() || s.mask.width() != s.input.width())
    throw DecodeError(dir.string() + ": mask and input differ in shape");
  return s;
}

std::vector<fs::path> list_sample_dirs(const fs::path& dataset_dir) {
  if (!fs::is_directory(dataset_dir)) throw IoError("not a directory: " + dataset_dir.string());
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(dataset_dir))
    if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

DatasetReport generate_dataset(const fs::path& gt_dir, const fs::path& out_dir, const DegradeConfig& config,
                               std::uint64_t global_seed, int workers) {
  const auto cases = list_sample_dirs(gt_dir);
  std::vector<std::string> error(cases.size());
  std::vector<char> ok(cases.size(), 0);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      const fs::path& dir = cases[i];
      try {
        if (!fs::exists(dir / "gt.png")) throw IoError("missing gt.png");
        if (!fs::exists(dir / "object_mask.png")) throw IoError("missing object_mask.png");
        const RasterImage gt = read_png(dir / "gt.png");
        const BinaryMask obj = read_mask_png(dir / "object_mask.png");
        std::optional<RasterImage> ref;
        if (fs::exists(dir / "ref.png")) ref = read_png(dir / "ref.png");
        std::string instruction = "refine the marked region";
        if (fs::exists(dir / "instruction.txt")) {
          instruction = read_file(dir / "instruction.txt");
          while (!instruction.empty() && (instruction.back() == '\n' || instruction.back() == '\r'))
            instruction.pop_back();
        }
        DegradeConfig cfg = config;
        cfg.scribble.seed = derive_seed(global_seed, i);
        const DegradedSample s = assemble_sample(gt, obj, ref, instruction, cfg);
        const Verdict v = validate_sample(s, cfg.validator);
        if (!v.accepted) throw std::runtime_error("rejected by validator: " + v.reason);
        write_sample(out_dir / dir.filename(), s);
        ok[i] = 1;
      } catch (const std::exception& e) {
        error[i] = e.what();
      }
    }
  };

  fs::create_directories(out_dir);
  const int n = std::max(1, workers);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  DatasetReport report;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string name = cases[i].filename().string();
    if (ok[i])
      report.written.push_back(name);
    else
      report.skipped.emplace_back(name, error[i]);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Synthetic scenes

SyntheticCase make_synthetic_case(std::uint64_t seed, Index h, Index w, Index channels) {
  Rng rng(seed);
  SyntheticCase sc;
  sc.gt = RasterImage(h, w, channels);

  std::vector<double> base(static_cast<std::size_t>(channels)), gx(base.size()), gy(base.size());
  for (std::size_t c = 0; c < base.size(); ++c) {
    base[c] = rng.uniform(0.25, 0.55);
    gx[c] = rng.uniform(-0.2, 0.2);
    gy[c] = rng.uniform(-0.2, 0.2);
  }
  // Object ellipse; occasionally pushed against the canvas edge.
  const double ry = rng.uniform(0.08, 0.16) * static_cast<double>(h);
  const double rx = rng.uniform(0.08, 0.16) * static_cast<double>(w);
  const bool at_edge = rng.uniform() < 0.2;
  const double cy = at_edge ? ry * 0.6 : rng.uniform(ry + 4.0, static_cast<double>(h) - ry - 4.0);
  const double cx = rng.uniform(rx + 4.0, static_cast<double>(w) - rx - 4.0);
  const double angle = rng.uniform(0.0, std::numbers::pi);
  const double period = rng.uniform(10.0, 18.0);
  std::vector<double> tint(base.size());
  for (auto& t : tint) t = rng.uniform(0.35, 0.75);

  // A disc and a bar in the background so that it is not a pure gradient.
  const double dcy = rng.uniform(0.0, static_cast<double>(h)), dcx = rng.uniform(0.0, static_cast<double>(w));
  const double dr = rng.uniform(6.0, 14.0);
  const double bar_y = rng.uniform(0.0, static_cast<double>(h));

  sc.object_mask = BinaryMask(h, w);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      const double fy = static_cast<double>(y) / static_cast<double>(h);
      const double fx = static_cast<double>(x) / static_cast<double>(w);
      const double ey = (static_cast<double>(y) - cy) / ry, ex = (static_cast<double>(x) - cx) / rx;
      const bool inside = ex * ex + ey * ey <= 1.0;
      const bool disc = std::hypot(static_cast<double>(y) - dcy, static_cast<double>(x) - dcx) <= dr;
      const bool bar = std::abs(static_cast<double>(y) - bar_y) <= 2.0;
      const double stripes =
          std::sin(2.0 * std::numbers::pi * (static_cast<double>(x) * std::cos(angle) + static_cast<double>(y) * std::sin(angle)) /
                   period);
      for (Index c = 0; c < channels; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        double v = base[ci] + gx[ci] * fx + gy[ci] * fy;
        if (disc) v += 0.15;
        if (bar) v -= 0.1;
        if (inside) v = tint[ci] + 0.2 * stripes;
        sc.gt(y, x, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
      sc.object_mask(y, x) = inside ? 1 : 0;
    }
  }
  sc.gt = quantize8(sc.gt);
  const BBox ob = bbox_from_mask(sc.object_mask);
  sc.reference = resize(crop(sc.gt, ob), 64, 64, Interp::bilinear);
  sc.instruction = "restore the striped object";
  return sc;
}

void write_synthetic_cases(const fs::path& gt_dir, int count, std::uint64_t seed, Index height, Index width) {
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "case_%03d", i);
    const fs::path dir = gt_dir / name;
    fs::create_directories(dir);
    const SyntheticCase sc = make_synthetic_case(derive_seed(seed, static_cast<std::uint64_t>(i)), height, width);
    write_png(dir / "gt.png", sc.gt);
    write_mask_png(dir / "object_mask.png", sc.object_mask);
    write_png(dir / "ref.png", sc.reference);
    write_file(dir / "instruction.txt", sc.instruction + "\n");
  }
}

}  // namespace rr
