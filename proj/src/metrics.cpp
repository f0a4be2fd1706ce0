#include "regionrefine/metrics.hpp"

namespace rr {

namespace {

void require_same(const RasterImage& a, const RasterImage& b, const char* what) {
  if (!a.same_shape(b)) throw ParameterError(std::string(what) + ": image shapes differ");
}

// 'valid' separable correlation: output has (H - k + 1) x (W - k + 1) samples.
Plane<double> filter_valid(const Plane<double>& src, const std::vector<double>& k) {
  const Index n = static_cast<Index>(k.size());
  const Index h = src.rows(), w = src.cols();
  Plane<double> horiz = Plane<double>::Zero(h, w - n + 1);
  for (Index i = 0; i < n; ++i) horiz += k[static_cast<std::size_t>(i)] * src.middleCols(i, w - n + 1);
  Plane<double> out = Plane<double>::Zero(h - n + 1, w - n + 1);
  for (Index i = 0; i < n; ++i) out += k[static_cast<std::size_t>(i)] * horiz.middleRows(i, h - n + 1);
  return out;
}

}  // namespace

double mse(const RasterImage& a, const RasterImage& b) {
  require_same(a, b, "mse");
  double acc = 0.0;
  for (Index c = 0; c < a.channels(); ++c)
    acc += (a.channel(c).cast<double>() - b.channel(c).cast<double>()).square().sum();
  return acc / static_cast<double>(a.height() * a.width() * a.channels());
}

double mse(const RasterImage& a, const RasterImage& b, const BinaryMask& region) {
  require_same(a, b, "mse");
  if (region.height() != a.height() || region.width() != a.width())
    throw ParameterError("mse: region shape differs from images");
  const Index n = region.count();
  if (n == 0) throw ParameterError("mse: empty region");
  const Plane<double> sel = (region.px != 0).cast<double>();
  double acc = 0.0;
  for (Index c = 0; c < a.channels(); ++c)
    acc += (sel * (a.channel(c).cast<double>() - b.channel(c).cast<double>()).square()).sum();
  return acc / static_cast<double>(n * a.channels());
}

Plane<double> ssim_map(const Plane<float>& a, const Plane<float>& b, const SsimParams& p) {
  require_odd_size(p.window, "ssim window");
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ParameterError("ssim: plane shapes differ");
  if (a.rows() < p.window || a.cols() < p.window)
    throw ParameterError("ssim: image smaller than the " + std::to_string(p.window) + "px window");
  const auto k = gaussian_kernel(p.window, p.sigma);
  const double c1 = (p.k1 * p.data_range) * (p.k1 * p.data_range);
  const double c2 = (p.k2 * p.data_range) * (p.k2 * p.data_range);

  const Plane<double> x = a.cast<double>(), y = b.cast<double>();
  const Plane<double> mx = filter_valid(x, k), my = filter_valid(y, k);
  const Plane<double> sxx = filter_valid(x * x, k) - mx * mx;
  const Plane<double> syy = filter_valid(y * y, k) - my * my;
  const Plane<double> sxy = filter_valid(x * y, k) - mx * my;
  return ((2.0 * mx * my + c1) * (2.0 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2));
}

double ssim(const RasterImage& a, const RasterImage& b, const SsimParams& params) {
  require_same(a, b, "ssim");
  double acc = 0.0;
  for (Index c = 0; c < a.channels(); ++c) acc += ssim_map(a.channel(c), b.channel(c), params).mean();
  return acc / static_cast<double>(a.channels());
}

double ssim(const RasterImage& a, const RasterImage& b, const BinaryMask& region, const SsimParams& params) {
  require_same(a, b, "ssim");
  if (region.height() != a.height() || region.width() != a.width())
    throw ParameterError("ssim: region shape differs from images");
  require_odd_size(params.window, "ssim window");
  if (a.height() < params.window || a.width() < params.window)
    throw ParameterError("ssim: image smaller than the window");
  const Index r = params.window / 2;
  const Plane<double> centres =
      (region.px.block(r, r, a.height() - 2 * r, a.width() - 2 * r) != 0).cast<double>();
  const double n = centres.sum();
  if (n == 0.0) throw ParameterError("ssim: region has no valid window centre (smaller than the window?)");
  double acc = 0.0;
  for (Index c = 0; c < a.channels(); ++c) acc += (ssim_map(a.channel(c), b.channel(c), params) * centres).sum() / n;
  return acc / static_cast<double>(a.channels());
}

BinaryMask box_region(const BBox& box, Index canvas_h, Index canvas_w) {
  require_within(box, canvas_h, canvas_w);
  BinaryMask m(canvas_h, canvas_w);
  m.px.block(box.y1, box.x1, box.height(), box.width()).setOnes();
  return m;
}

BinaryMask outside_box_region(const BBox& box, Index canvas_h, Index canvas_w) {
  return mask_not(box_region(box, canvas_h, canvas_w));
}

}  // namespace rr
