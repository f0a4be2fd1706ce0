#include "regionrefine/raster.hpp"

#include <string>

namespace rr {

void require_odd_size(int size, const char* what) {
  if (size < 1 || size % 2 == 0)
    throw ParameterError(std::string(what) + ": kernel size must be odd and >= 1, got " + std::to_string(size));
}

namespace {

// Count of ones in the clipped window [i - r, i + r] along one axis, then the
// predicate decides the output. `all` tests count == window length.
Plane<std::uint8_t> window_pass(const Plane<std::uint8_t>& src, Index radius, bool horizontal, bool all) {
  const Index h = src.rows(), w = src.cols();
  Plane<std::uint8_t> out(h, w);
  const Index lines = horizontal ? h : w;
  const Index len = horizontal ? w : h;
  std::vector<Index> prefix(static_cast<std::size_t>(len + 1));
  for (Index l = 0; l < lines; ++l) {
    prefix[0] = 0;
    for (Index i = 0; i < len; ++i) {
      const auto v = horizontal ? src(l, i) : src(i, l);
      prefix[static_cast<std::size_t>(i + 1)] = prefix[static_cast<std::size_t>(i)] + (v != 0 ? 1 : 0);
    }
    for (Index i = 0; i < len; ++i) {
      const Index lo = std::max<Index>(0, i - radius);
      const Index hi = std::min<Index>(len - 1, i + radius);
      const Index ones = prefix[static_cast<std::size_t>(hi + 1)] - prefix[static_cast<std::size_t>(lo)];
      const bool on = all ? ones == hi - lo + 1 : ones > 0;
      (horizontal ? out(l, i) : out(i, l)) = on ? 1 : 0;
    }
  }
  return out;
}

BinaryMask morph(const BinaryMask& mask, int size, bool all, const char* what) {
  require_odd_size(size, what);
  if (size == 1) return BinaryMask((mask.px != 0).cast<std::uint8_t>());
  const Index r = size / 2;
  // A clipped square window is the product of two clipped intervals, so the
  // square max/min separates exactly.
  return BinaryMask(window_pass(window_pass(mask.px, r, true, all), r, false, all));
}

void require_same(const BinaryMask& a, const BinaryMask& b) {
  if (a.height() != b.height() || a.width() != b.width()) throw ParameterError("mask shapes differ");
}

}  // namespace

BinaryMask dilate(const BinaryMask& mask, int size) { return morph(mask, size, false, "dilate"); }

BinaryMask erode(const BinaryMask& mask, int size) { return morph(mask, size, true, "erode"); }

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
  require_same(a, b);
  return BinaryMask(((a.px != 0) && (b.px != 0)).cast<std::uint8_t>());
}

BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b) {
  require_same(a, b);
  return BinaryMask(((a.px != 0) && (b.px == 0)).cast<std::uint8_t>());
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
  require_same(a, b);
  return BinaryMask(((a.px != 0) || (b.px != 0)).cast<std::uint8_t>());
}

BinaryMask mask_not(const BinaryMask& a) { return BinaryMask((a.px == 0).cast<std::uint8_t>()); }

SoftMask to_soft(const BinaryMask& mask) { return SoftMask((mask.px != 0).cast<float>()); }

double default_sigma(int size) { return 0.3 * ((size - 1) * 0.5 - 1.0) + 0.8; }

std::vector<double> gaussian_kernel(int size, std::optional<double> sigma) {
  require_odd_size(size, "gaussian_kernel");
  const double s = sigma.value_or(default_sigma(size));
  if (!(s > 0.0)) throw ParameterError("gaussian_kernel: sigma must be positive");
  const int r = size / 2;
  std::vector<double> k(static_cast<std::size_t>(size));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    const double v = std::exp(-static_cast<double>(i * i) / (2.0 * s * s));
    k[static_cast<std::size_t>(i + r)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

SoftMask gaussian_blur(const SoftMask& mask, int size, std::optional<double> sigma) {
  return SoftMask(gaussian_blur(mask.px, size, sigma));
}

RasterImage gaussian_blur(const RasterImage& img, int size, std::optional<double> sigma) {
  std::vector<Plane<float>> planes;
  planes.reserve(static_cast<std::size_t>(img.channels()));
  for (Index c = 0; c < img.channels(); ++c) planes.push_back(gaussian_blur(img.channel(c), size, sigma));
  return RasterImage(std::move(planes));
}

RasterImage resize(const RasterImage& img, Index out_h, Index out_w, Interp mode) {
  std::vector<Plane<float>> planes;
  planes.reserve(static_cast<std::size_t>(img.channels()));
  for (Index c = 0; c < img.channels(); ++c) planes.push_back(resize(img.channel(c), out_h, out_w, mode));
  return RasterImage(std::move(planes));
}

SoftMask resize(const SoftMask& mask, Index out_h, Index out_w, Interp mode) {
  return SoftMask(resize(mask.px, out_h, out_w, mode));
}

BinaryMask resize(const BinaryMask& mask, Index out_h, Index out_w) {
  return BinaryMask(resize(mask.px, out_h, out_w, Interp::nearest));
}

RasterImage composite(const RasterImage& a, const RasterImage& b, const SoftMask& alpha) {
  if (!a.same_shape(b) || alpha.height() != a.height() || alpha.width() != a.width())
    throw ParameterError("composite: shape mismatch");
  RasterImage out = b;
  for (Index c = 0; c < a.channels(); ++c) {
    auto& dst = out.channel(c);
    const auto& src = a.channel(c);
    for (Index y = 0; y < a.height(); ++y)
      for (Index x = 0; x < a.width(); ++x) dst(y, x) = blend_pixel(src(y, x), dst(y, x), alpha(y, x));
  }
  return out;
}

void normalize_in_place(RasterImage& img) {
  for (Index c = 0; c < img.channels(); ++c) {
    auto& p = img.channel(c);
    p = p.isFinite().select(p, 0.0f).cwiseMax(0.0f).cwiseMin(1.0f);
  }
}

}  // namespace rr
