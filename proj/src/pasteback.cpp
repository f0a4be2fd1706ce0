#include "regionrefine/pasteback.hpp"

namespace rr {

SoftMask blend_mask(const BinaryMask& mask_c, const BlendParams& params) {
  require_odd_size(params.dilate_size, "blend_mask dilate");
  require_odd_size(params.blur_size, "blend_mask blur");
  return gaussian_blur(to_soft(dilate(mask_c, params.dilate_size)), params.blur_size, params.sigma);
}

RasterImage focus_view(const RasterImage& full, const CropSpec& spec) {
  return resize(crop(full, spec.box), spec.target_h, spec.target_w, Interp::bilinear);
}

BinaryMask focus_mask(const BinaryMask& full_mask, const CropSpec& spec) {
  return resize(crop(full_mask, spec.box), spec.target_h, spec.target_w);
}

namespace {

void check_inputs(const RasterImage& original, const RasterImage& refined, const BinaryMask& mask_c,
                  const CropSpec& spec) {
  if (original.height() != spec.canvas_h || original.width() != spec.canvas_w)
    throw ParameterError("paste_back: original does not match crop spec canvas");
  require_within(spec.box, spec.canvas_h, spec.canvas_w);
  if (refined.height() != spec.target_h || refined.width() != spec.target_w)
    throw ParameterError("paste_back: refined crop does not match crop spec target");
  if (refined.channels() != original.channels()) throw ParameterError("paste_back: channel count mismatch");
  if (mask_c.height() != spec.target_h || mask_c.width() != spec.target_w)
    throw ParameterError("paste_back: crop mask does not match crop spec target");
}

}  // namespace

PasteResult paste_back_detailed(const RasterImage& original_full, const RasterImage& refined_crop,
                                const BinaryMask& mask_c, const CropSpec& spec, const BlendParams& params,
                                PasteMode mode) {
  check_inputs(original_full, refined_crop, mask_c, spec);
  const BBox& box = spec.box;
  PasteResult res;
  res.crop_alpha = blend_mask(mask_c, params);
  res.image = original_full;
  res.canvas_alpha = SoftMask(spec.canvas_h, spec.canvas_w, 0.0f);

  const RasterImage focused = focus_view(original_full, spec);

  if (mode == PasteMode::crop_literal) {
    const RasterImage blended = composite(refined_crop, focused, res.crop_alpha);
    paste(res.image, resize(blended, box.height(), box.width(), Interp::bilinear), box);
    res.canvas_alpha.px.block(box.y1, box.x1, box.height(), box.width()).setOnes();
    return res;
  }

  const Plane<float> alpha = resize(res.crop_alpha.px, box.height(), box.width(), Interp::bilinear);
  res.canvas_alpha.px.block(box.y1, box.x1, box.height(), box.width()) = alpha;

  for (Index c = 0; c < original_full.channels(); ++c) {
    const Plane<double> residual =
        refined_crop.channel(c).cast<double>() - focused.channel(c).cast<double>();
    const Plane<double> residual_box = resize(residual, box.height(), box.width(), Interp::bilinear);
    auto& dst = res.image.channel(c);
    for (Index y = 0; y < box.height(); ++y) {
      for (Index x = 0; x < box.width(); ++x) {
        const float a = alpha(y, x);
        if (a <= 0.0f) continue;
        float& px = dst(box.y1 + y, box.x1 + x);
        const double layer = std::clamp(static_cast<double>(px) + residual_box(y, x), 0.0, 1.0);
        px = blend_pixel(static_cast<float>(layer), px, a);
      }
    }
  }
  return res;
}

RasterImage paste_back(const RasterImage& original_full, const RasterImage& refined_crop, const BinaryMask& mask_c,
                       const CropSpec& spec, const BlendParams& params, PasteMode mode) {
  return paste_back_detailed(original_full, refined_crop, mask_c, spec, params, mode).image;
}

}  // namespace rr
