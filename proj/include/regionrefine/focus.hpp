#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>

#include "regionrefine/raster.hpp"

namespace rr {

// Inclusive pixel box, x = column, y = row.
struct BBox {
  Index x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  Index width() const { return x2 - x1 + 1; }
  Index height() const { return y2 - y1 + 1; }
  bool contains(Index x, Index y) const { return x >= x1 && x <= x2 && y >= y1 && y <= y2; }
  bool contains(const BBox& o) const { return o.x1 >= x1 && o.y1 >= y1 && o.x2 <= x2 && o.y2 <= y2; }
  bool within(Index canvas_h, Index canvas_w) const {
    return x1 >= 0 && y1 >= 0 && x1 <= x2 && y1 <= y2 && x2 < canvas_w && y2 < canvas_h;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct CropSpec {
  BBox box;  // expanded focus region on the canvas
  Index canvas_h = 0, canvas_w = 0;
  Index target_h = 0, target_w = 0;  // focus resolution handed to the refiner
  Index margin = 0;

  friend bool operator==(const CropSpec&, const CropSpec&) = default;
};

struct FocusParams {
  Index margin = 64;
  std::int64_t budget = 1024 * 1024;  // max target area in pixels
  Index granule = 8;
};

// Tight box around the 1-pixels. Throws EmptyRegion for an empty mask.
BBox bbox_from_mask(const BinaryMask& mask);

// Push every side out by `margin`, then clip to the canvas.
BBox expand_box(const BBox& box, Index margin, Index canvas_h, Index canvas_w);

// Filled rectangle, used when the caller supplies a box instead of a scribble.
BinaryMask mask_from_box(const BBox& box, Index canvas_h, Index canvas_w);

void require_within(const BBox& box, Index canvas_h, Index canvas_w);

template <typename Scalar>
Plane<Scalar> crop(const Plane<Scalar>& src, const BBox& box) {
  require_within(box, src.rows(), src.cols());
  return src.block(box.y1, box.x1, box.height(), box.width());
}

RasterImage crop(const RasterImage& img, const BBox& box);
BinaryMask crop(const BinaryMask& mask, const BBox& box);
SoftMask crop(const SoftMask& mask, const BBox& box);

// Writes `patch` into `canvas` at the box origin. Inverse of crop.
void paste(RasterImage& canvas, const RasterImage& patch, const BBox& box);

// Largest granule multiples (tw, th) with tw/th tracking box aspect and
// tw * th <= budget. Each side lands below its ideal by less than one granule.
void focus_target_dims(Index box_w, Index box_h, std::int64_t budget, Index granule, Index& target_w,
                       Index& target_h);

CropSpec make_crop_spec(const BinaryMask& mask, const FocusParams& params);
CropSpec make_crop_spec(const BBox& region, Index canvas_h, Index canvas_w, const FocusParams& params);

void to_json(nlohmann::json& j, const BBox& b);
void from_json(const nlohmann::json& j, BBox& b);
void to_json(nlohmann::json& j, const CropSpec& s);
void from_json(const nlohmann::json& j, CropSpec& s);

}  // namespace rr
