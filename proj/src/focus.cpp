#include "regionrefine/focus.hpp"

#include <cmath>
#include <string>

namespace rr {

BBox bbox_from_mask(const BinaryMask& mask) {
  Index x1 = mask.width(), y1 = mask.height(), x2 = -1, y2 = -1;
  for (Index y = 0; y < mask.height(); ++y) {
    for (Index x = 0; x < mask.width(); ++x) {
      if (!mask(y, x)) continue;
      x1 = std::min(x1, x);
      x2 = std::max(x2, x);
      y1 = std::min(y1, y);
      y2 = std::max(y2, y);
    }
  }
  if (x2 < 0) throw EmptyRegion("mask has no foreground pixels");
  return {x1, y1, x2, y2};
}

BBox expand_box(const BBox& box, Index margin, Index canvas_h, Index canvas_w) {
  if (margin < 0) throw ParameterError("expand_box: negative margin");
  return {std::max<Index>(0, box.x1 - margin), std::max<Index>(0, box.y1 - margin),
          std::min<Index>(canvas_w - 1, box.x2 + margin), std::min<Index>(canvas_h - 1, box.y2 + margin)};
}

BinaryMask mask_from_box(const BBox& box, Index canvas_h, Index canvas_w) {
  require_within(box, canvas_h, canvas_w);
  BinaryMask m(canvas_h, canvas_w);
  m.px.block(box.y1, box.x1, box.height(), box.width()).setOnes();
  return m;
}

void require_within(const BBox& box, Index canvas_h, Index canvas_w) {
  if (!box.within(canvas_h, canvas_w))
    throw ParameterError("box (" + std::to_string(box.x1) + "," + std::to_string(box.y1) + "," +
                         std::to_string(box.x2) + "," + std::to_string(box.y2) + ") outside " +
                         std::to_string(canvas_h) + "x" + std::to_string(canvas_w) + " canvas");
}

RasterImage crop(const RasterImage& img, const BBox& box) {
  std::vector<Plane<float>> planes;
  for (Index c = 0; c < img.channels(); ++c) planes.push_back(crop(img.channel(c), box));
  return RasterImage(std::move(planes));
}

BinaryMask crop(const BinaryMask& mask, const BBox& box) { return BinaryMask(crop(mask.px, box)); }

SoftMask crop(const SoftMask& mask, const BBox& box) { return SoftMask(crop(mask.px, box)); }

void paste(RasterImage& canvas, const RasterImage& patch, const BBox& box) {
  require_within(box, canvas.height(), canvas.width());
  if (patch.height() != box.height() || patch.width() != box.width() || patch.channels() != canvas.channels())
    throw ParameterError("paste: patch does not match box");
  for (Index c = 0; c < canvas.channels(); ++c)
    canvas.channel(c).block(box.y1, box.x1, box.height(), box.width()) = patch.channel(c);
}

namespace {

// Largest multiple of g, n, with n^2 * den <= num.
Index largest_multiple(std::int64_t num, std::int64_t den, Index g) {
  const double ideal = std::sqrt(static_cast<double>(num) / static_cast<double>(den));
  auto fits = [&](Index n) {
    const auto nn = static_cast<__int128>(n) * n;
    return nn * den <= static_cast<__int128>(num);
  };
  Index n = static_cast<Index>(std::floor(ideal / static_cast<double>(g))) * g;
  while (n > 0 && !fits(n)) n -= g;
  while (fits(n + g)) n += g;
  return n;
}

}  // namespace

void focus_target_dims(Index box_w, Index box_h, std::int64_t budget, Index granule, Index& target_w,
                       Index& target_h) {
  if (box_w < 1 || box_h < 1) throw ParameterError("focus_target_dims: empty box");
  if (granule < 1) throw ParameterError("focus_target_dims: granule must be >= 1");
  if (budget < granule * granule) throw ParameterError("focus_target_dims: budget smaller than one granule cell");
  // tw = sqrt(budget * w / h), th = sqrt(budget * h / w); their product is budget.
  target_w = std::max(granule, largest_multiple(budget * box_w, box_h, granule));
  target_h = std::max(granule, largest_multiple(budget * box_h, box_w, granule));
}

CropSpec make_crop_spec(const BBox& region, Index canvas_h, Index canvas_w, const FocusParams& params) {
  require_within(region, canvas_h, canvas_w);
  CropSpec spec;
  spec.box = expand_box(region, params.margin, canvas_h, canvas_w);
  spec.canvas_h = canvas_h;
  spec.canvas_w = canvas_w;
  spec.margin = params.margin;
  focus_target_dims(spec.box.width(), spec.box.height(), params.budget, params.granule, spec.target_w,
                    spec.target_h);
  return spec;
}

CropSpec make_crop_spec(const BinaryMask& mask, const FocusParams& params) {
  return make_crop_spec(bbox_from_mask(mask), mask.height(), mask.width(), params);
}

void to_json(nlohmann::json& j, const BBox& b) { j = {{"x1", b.x1}, {"y1", b.y1}, {"x2", b.x2}, {"y2", b.y2}}; }

void from_json(const nlohmann::json& j, BBox& b) {
  b.x1 = j.at("x1").get<Index>();
  b.y1 = j.at("y1").get<Index>();
  b.x2 = j.at("x2").get<Index>();
  b.y2 = j.at("y2").get<Index>();
}

void to_json(nlohmann::json& j, const CropSpec& s) {
  j = {{"box", s.box},
       {"canvas", {{"h", s.canvas_h}, {"w", s.canvas_w}}},
       {"target", {{"h", s.target_h}, {"w", s.target_w}}},
       {"margin", s.margin}};
}

void from_json(const nlohmann::json& j, CropSpec& s) {
  s.box = j.at("box").get<BBox>();
  s.canvas_h = j.at("canvas").at("h").get<Index>();
  s.canvas_w = j.at("canvas").at("w").get<Index>();
  s.target_h = j.at("target").at("h").get<Index>();
  s.target_w = j.at("target").at("w").get<Index>();
  s.margin = j.at("margin").get<Index>();
}

}  // namespace rr
