#pragma once

#include <optional>

#include "regionrefine/focus.hpp"
#include "regionrefine/raster.hpp"

namespace rr {

struct BlendParams {
  int dilate_size = 7;  // r
  int blur_size = 11;   // k
  std::optional<double> sigma;

  friend bool operator==(const BlendParams&, const BlendParams&) = default;
};

enum class PasteMode {
  // Composite at canvas resolution: the refined layer is the original plus
  // the upsampled crop residual, alpha is the resized blend mask. Pixels with
  // alpha == 0 are never written.
  canvas,
  // Composite at crop resolution against the resampled crop, then resize the
  // whole crop back into the rectangle. Kept for comparison; resampling
  // perturbs background pixels inside the rectangle.
  crop_literal,
};

// Blur(Dilate(mask, r), k).
SoftMask blend_mask(const BinaryMask& mask_c, const BlendParams& params);

// Focused view of the canvas: crop to spec.box, bilinear resize to target.
RasterImage focus_view(const RasterImage& full, const CropSpec& spec);
// Crop-resolution scribble mask: crop to spec.box, nearest resize to target.
BinaryMask focus_mask(const BinaryMask& full_mask, const CropSpec& spec);

struct PasteResult {
  RasterImage image;
  SoftMask crop_alpha;    // blend mask at target resolution
  SoftMask canvas_alpha;  // full-canvas alpha actually applied
};

PasteResult paste_back_detailed(const RasterImage& original_full, const RasterImage& refined_crop,
                                const BinaryMask& mask_c, const CropSpec& spec, const BlendParams& params,
                                PasteMode mode = PasteMode::canvas);

RasterImage paste_back(const RasterImage& original_full, const RasterImage& refined_crop, const BinaryMask& mask_c,
                       const CropSpec& spec, const BlendParams& params, PasteMode mode = PasteMode::canvas);

}  // namespace rr
