#include "regionrefine/pipeline.hpp"

#include "regionrefine/png_io.hpp"

namespace rr {

bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
  return a.focus.margin == b.focus.margin && a.focus.budget == b.focus.budget &&
         a.focus.granule == b.focus.granule && a.blend == b.blend && a.band == b.band && a.backend == b.backend &&
         a.paste_mode == b.paste_mode && a.seed == b.seed;
}

namespace {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& dst) {
  if (j.contains(key) && !j[key].is_null()) dst = j[key].get<T>();
}

}  // namespace

void to_json(nlohmann::json& j, const PipelineConfig& c) {
  nlohmann::json sigma = c.blend.sigma ? nlohmann::json(*c.blend.sigma) : nlohmann::json("auto");
  j = {{"margin", c.focus.margin},
       {"budget", c.focus.budget},
       {"granule", c.focus.granule},
       {"blend", {{"r", c.blend.dilate_size}, {"k", c.blend.blur_size}, {"sigma", sigma}}},
       {"band", {{"r_out", c.band.r_out}, {"r_in", c.band.r_in}, {"alpha", c.band.alpha}}},
       {"backend",
        {{"kind", to_string(c.backend.kind)},
         {"url", c.backend.http.base_url},
         {"timeout_ms", c.backend.http.timeout_ms},
         {"retries", c.backend.http.retries},
         {"max_concurrent", c.backend.http.max_concurrent}}},
       {"paste_mode", c.paste_mode == PasteMode::canvas ? "canvas" : "crop_literal"},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, PipelineConfig& c) {
  if (!j.is_object()) throw ParameterError("config: expected a JSON object");
  read_opt(j, "margin", c.focus.margin);
  read_opt(j, "budget", c.focus.budget);
  read_opt(j, "granule", c.focus.granule);
  read_opt(j, "seed", c.seed);
  if (j.contains("blend")) {
    const auto& b = j["blend"];
    read_opt(b, "r", c.blend.dilate_size);
    read_opt(b, "k", c.blend.blur_size);
    if (b.contains("sigma")) {
      if (b["sigma"].is_number())
        c.blend.sigma = b["sigma"].get<double>();
      else if (b["sigma"].is_null() || b["sigma"] == "auto")
        c.blend.sigma.reset();
      else
        throw ParameterError("config: blend.sigma must be a number or \"auto\"");
    }
  }
  if (j.contains("band")) {
    const auto& b = j["band"];
    read_opt(b, "r_out", c.band.r_out);
    read_opt(b, "r_in", c.band.r_in);
    read_opt(b, "alpha", c.band.alpha);
  }
  if (j.contains("backend")) {
    const auto& b = j["backend"];
    if (b.contains("kind")) c.backend.kind = backend_kind_from_string(b["kind"].get<std::string>());
    read_opt(b, "url", c.backend.http.base_url);
    read_opt(b, "timeout_ms", c.backend.http.timeout_ms);
    read_opt(b, "retries", c.backend.http.retries);
    read_opt(b, "max_concurrent", c.backend.http.max_concurrent);
  }
  if (j.contains("paste_mode")) {
    const auto m = j["paste_mode"].get<std::string>();
    if (m == "canvas")
      c.paste_mode = PasteMode::canvas;
    else if (m == "crop_literal")
      c.paste_mode = PasteMode::crop_literal;
    else
      throw ParameterError("config: unknown paste_mode '" + m + "'");
  }
  require_odd_size(c.blend.dilate_size, "config blend.r");
  require_odd_size(c.blend.blur_size, "config blend.k");
  require_odd_size(c.band.r_out, "config band.r_out");
  require_odd_size(c.band.r_in, "config band.r_in");
  if (c.focus.margin < 0) throw ParameterError("config: margin must be >= 0");
  if (c.focus.granule < 1) throw ParameterError("config: granule must be >= 1");
  if (c.band.alpha < 0.0) throw ParameterError("config: band.alpha must be >= 0");
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
  try {
    return j.get<PipelineConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
}

RefineOutcome refine_region(const RasterImage& input, const BinaryMask& mask,
                            const std::optional<RasterImage>& reference, const std::string& instruction,
                            const PipelineConfig& config, Refiner& backend) {
  if (mask.height() != input.height() || mask.width() != input.width())
    throw ParameterError("mask and input image differ in shape");
  RefineOutcome out;
  out.spec = make_crop_spec(mask, config.focus);
  out.focused = focus_view(input, out.spec);
  out.mask_c = focus_mask(mask, out.spec);

  RefineRequest request{out.focused, reference, out.mask_c, instruction, out.spec};
  out.refined = refine(request, backend);

  PasteResult pasted =
      paste_back_detailed(input, out.refined.refined, out.mask_c, out.spec, config.blend, config.paste_mode);
  out.output = std::move(pasted.image);
  out.crop_alpha = std::move(pasted.crop_alpha);
  out.canvas_alpha = std::move(pasted.canvas_alpha);
  return out;
}

}  // namespace rr
