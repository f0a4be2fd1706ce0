#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "regionrefine/backend.hpp"
#include "regionrefine/focus.hpp"
#include "regionrefine/pasteback.hpp"
#include "regionrefine/raster.hpp"

namespace rr {

struct ScribbleParams {
  std::uint64_t seed = 0;
  int strokes_min = 2;
  int strokes_max = 4;
  // Stroke width as a fraction of the object bounding-box diagonal.
  double width_min = 0.08;
  double width_max = 0.16;
  int object_dilate = 15;
  int curve_points = 3;  // control points per stroke; consecutive triples form quadratic segments
  int max_retries = 16;

  friend bool operator==(const ScribbleParams&, const ScribbleParams&) = default;
};

enum class InpainterKind { builtin, external };

struct InpainterConfig {
  InpainterKind kind = InpainterKind::builtin;
  int kernel_size = 31;  // normalized-convolution window
  std::optional<double> sigma;
  double noise_amplitude = 0.08;
  HttpBackendOptions http;  // external only

  friend bool operator==(const InpainterConfig& a, const InpainterConfig& b) {
    return a.kind == b.kind && a.kernel_size == b.kernel_size && a.sigma == b.sigma &&
           a.noise_amplitude == b.noise_amplitude && a.http.base_url == b.http.base_url &&
           a.http.timeout_ms == b.http.timeout_ms && a.http.retries == b.http.retries;
  }
};

struct ValidatorConfig {
  double min_region_mse = 1e-4;
};

struct DegradeConfig {
  ScribbleParams scribble;
  InpainterConfig inpainter;
  BlendParams light_blend{3, 5, std::nullopt};
  ValidatorConfig validator;
  Index fg_pad = 16;  // padding around the dilated object box for the fg split
};

void to_json(nlohmann::json& j, const DegradeConfig& c);
void from_json(const nlohmann::json& j, DegradeConfig& c);

struct Provenance {
  std::uint64_t seed = 0;
  std::string inpainter_id;
  nlohmann::json params;
};

struct DegradedSample {
  RasterImage input;  // I
  RasterImage gt;     // I*
  std::optional<RasterImage> reference;
  BinaryMask mask;  // M
  std::string instruction;
  Provenance provenance;
  BBox object_box;
  BBox fg_box;
};

// Seeded quadratic-Bezier strokes with round caps, clipped to
// dilate(object_mask, object_dilate). Throws EmptyRegion for an empty object
// mask or when every retry comes back empty.
//
// Draw sequence (Rng, one attempt):
//   n = uniform_int(strokes_min, strokes_max)
//   per stroke: width = diag * uniform(width_min, width_max)
//               curve_points x { i = uniform_int(0, support_count - 1) }
// Control points are the centres of support pixels, enumerated row-major.
BinaryMask sample_scribble(const BinaryMask& object_mask, const ScribbleParams& params);

// Disc-stamps a stroke through the control points into `mask`.
void rasterize_stroke(BinaryMask& mask, const std::vector<Eigen::Vector2d>& points, double radius);

// Built-in: masked pixels are replaced by the mask-aware normalized
// convolution of the known surround (repeated until every hole pixel has
// support) plus uniform noise in [-amplitude, amplitude]; unmasked pixels are
// returned untouched. External: forwarded over the refiner protocol.
RasterImage inpaint(const RasterImage& gt, const BinaryMask& mask, const InpainterConfig& config,
                    std::uint64_t noise_seed);

std::string inpainter_id(const InpainterConfig& config);

DegradedSample assemble_sample(const RasterImage& gt, const BinaryMask& object_mask,
                               const std::optional<RasterImage>& reference, const std::string& instruction,
                               const DegradeConfig& config);

struct Verdict {
  bool accepted = false;
  std::string reason;
};

// Stand-in for a VLM defect judge: accept iff MSE(input, gt) over the mask
// reaches the configured floor.
Verdict validate_sample(const DegradedSample& sample, const ValidatorConfig& validator);

// Dataset layout, one folder per sample:
//   input.png gt.png mask.png [ref.png] meta.json
void write_sample(const std::filesystem::path& dir, const DegradedSample& sample);
DegradedSample read_sample(const std::filesystem::path& dir);
std::vector<std::filesystem::path> list_sample_dirs(const std::filesystem::path& dataset_dir);

struct DatasetReport {
  std::vector<std::string> written;
  std::vector<std::pair<std::string, std::string>> skipped;  // (sample, reason)
};

// gt_dir holds one folder per case with gt.png and object_mask.png (plus
// optional ref.png and instruction.txt). Sample i uses seed
// derive_seed(global_seed, i) in sorted folder order, so results do not
// depend on `workers`.
DatasetReport generate_dataset(const std::filesystem::path& gt_dir, const std::filesystem::path& out_dir,
                               const DegradeConfig& config, std::uint64_t global_seed, int workers = 1);

// Procedural clean scene plus object mask for tests and demos: smooth
// gradient background, a textured elliptical object and a few shapes.
struct SyntheticCase {
  RasterImage gt;
  BinaryMask object_mask;
  RasterImage reference;
  std::string instruction;
};
SyntheticCase make_synthetic_case(std::uint64_t seed, Index height, Index width, Index channels = 3);

// Writes `count` synthetic cases in the gt_dir layout generate_dataset reads.
void write_synthetic_cases(const std::filesystem::path& gt_dir, int count, std::uint64_t seed, Index height,
                           Index width);

}  // namespace rr
