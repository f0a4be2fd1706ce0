#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>

#include "regionrefine/backend.hpp"
#include "regionrefine/boundary_loss.hpp"
#include "regionrefine/focus.hpp"
#include "regionrefine/pasteback.hpp"

namespace rr {

struct PipelineConfig {
  FocusParams focus;
  BlendParams blend;
  BandParams band;
  BackendConfig backend;
  PasteMode paste_mode = PasteMode::canvas;
  std::uint64_t seed = 0;
};

bool operator==(const PipelineConfig& a, const PipelineConfig& b);

// Keys absent from the JSON keep their defaults; to_json always writes the
// fully resolved config.
void to_json(nlohmann::json& j, const PipelineConfig& c);
void from_json(const nlohmann::json& j, PipelineConfig& c);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct RefineOutcome {
  RasterImage output;
  CropSpec spec;
  RasterImage focused;  // I_c at target resolution
  BinaryMask mask_c;    // M_c at target resolution
  RefineResult refined;
  SoftMask crop_alpha;
  SoftMask canvas_alpha;
};

// Localize, focus, refine, paste back.
RefineOutcome refine_region(const RasterImage& input, const BinaryMask& mask,
                            const std::optional<RasterImage>& reference, const std::string& instruction,
                            const PipelineConfig& config, Refiner& backend);

}  // namespace rr
