#pragma once

#include "regionrefine/focus.hpp"
#include "regionrefine/raster.hpp"

namespace rr {

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double data_range = 1.0;
};

// Mean squared difference over all pixels and channels.
double mse(const RasterImage& a, const RasterImage& b);
// Restricted to pixels where region == 1. Empty region -> ParameterError.
double mse(const RasterImage& a, const RasterImage& b, const BinaryMask& region);

// Gaussian-windowed SSIM. The map is defined at every pixel whose full window
// fits on the canvas; the score is the mean of the map (per channel, then
// averaged over channels).
double ssim(const RasterImage& a, const RasterImage& b, const SsimParams& params = {});
// Averages the map over window centres inside `region`.
double ssim(const RasterImage& a, const RasterImage& b, const BinaryMask& region, const SsimParams& params = {});

// Per-channel SSIM map over valid centres, size (H - window + 1) x (W - window + 1).
Plane<double> ssim_map(const Plane<float>& a, const Plane<float>& b, const SsimParams& params = {});

BinaryMask box_region(const BBox& box, Index canvas_h, Index canvas_w);
BinaryMask outside_box_region(const BBox& box, Index canvas_h, Index canvas_w);

}  // namespace rr
