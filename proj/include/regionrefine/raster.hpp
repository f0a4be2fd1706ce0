#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "regionrefine/errors.hpp"

namespace rr {

using Index = Eigen::Index;

// One row-major channel of samples.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// H x W x C image stored as C planes. Intensities for RasterImage live in [0,1].
template <typename Scalar>
class Image {
 public:
  Image() = default;
  Image(Index height, Index width, Index channels, Scalar fill = Scalar(0))
      : planes_(static_cast<std::size_t>(channels), Plane<Scalar>::Constant(height, width, fill)) {
    if (height < 1 || width < 1 || channels < 1)
      throw ParameterError("image dimensions must be positive");
  }
  explicit Image(std::vector<Plane<Scalar>> planes) : planes_(std::move(planes)) {
    if (planes_.empty()) throw ParameterError("image needs at least one channel");
    for (const auto& p : planes_)
      if (p.rows() != planes_[0].rows() || p.cols() != planes_[0].cols())
        throw ParameterError("image planes differ in shape");
  }

  Index height() const { return planes_.empty() ? 0 : planes_[0].rows(); }
  Index width() const { return planes_.empty() ? 0 : planes_[0].cols(); }
  Index channels() const { return static_cast<Index>(planes_.size()); }
  bool empty() const { return planes_.empty(); }

  Plane<Scalar>& channel(Index c) { return planes_[static_cast<std::size_t>(c)]; }
  const Plane<Scalar>& channel(Index c) const { return planes_[static_cast<std::size_t>(c)]; }

  Scalar& operator()(Index y, Index x, Index c) { return channel(c)(y, x); }
  Scalar operator()(Index y, Index x, Index c) const { return channel(c)(y, x); }

  bool same_shape(const Image& o) const {
    return height() == o.height() && width() == o.width() && channels() == o.channels();
  }

  friend bool operator==(const Image& a, const Image& b) {
    if (!a.same_shape(b)) return false;
    for (Index c = 0; c < a.channels(); ++c)
      if (!(a.channel(c) == b.channel(c)).all()) return false;
    return true;
  }

 private:
  std::vector<Plane<Scalar>> planes_;
};

using RasterImage = Image<float>;

// {0,1} region indicator.
struct BinaryMask {
  Plane<std::uint8_t> px;

  BinaryMask() = default;
  BinaryMask(Index height, Index width, std::uint8_t fill = 0)
      : px(Plane<std::uint8_t>::Constant(height, width, fill ? 1 : 0)) {}
  explicit BinaryMask(Plane<std::uint8_t> values) : px(std::move(values)) {}

  Index height() const { return px.rows(); }
  Index width() const { return px.cols(); }
  std::uint8_t& operator()(Index y, Index x) { return px(y, x); }
  std::uint8_t operator()(Index y, Index x) const { return px(y, x); }
  Index count() const { return (px != 0).count(); }
  bool any() const { return (px != 0).any(); }

  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.px.rows() == b.px.rows() && a.px.cols() == b.px.cols() && (a.px == b.px).all();
  }
};

// [0,1] blend weights.
struct SoftMask {
  Plane<float> px;

  SoftMask() = default;
  SoftMask(Index height, Index width, float fill = 0.0f)
      : px(Plane<float>::Constant(height, width, fill)) {}
  explicit SoftMask(Plane<float> values) : px(std::move(values)) {}

  Index height() const { return px.rows(); }
  Index width() const { return px.cols(); }
  float& operator()(Index y, Index x) { return px(y, x); }
  float operator()(Index y, Index x) const { return px(y, x); }

  friend bool operator==(const SoftMask& a, const SoftMask& b) {
    return a.px.rows() == b.px.rows() && a.px.cols() == b.px.cols() && (a.px == b.px).all();
  }
};

enum class KernelKind { dilate, erode, gaussian };

struct KernelSpec {
  KernelKind kind = KernelKind::gaussian;
  int size = 1;
  std::optional<double> sigma;  // gaussian only
};

enum class Interp { bilinear, nearest };

void require_odd_size(int size, const char* what);

// ---------------------------------------------------------------------------
// Morphology. Square size x size structuring element, window clipped at the
// canvas border.

BinaryMask dilate(const BinaryMask& mask, int size);
BinaryMask erode(const BinaryMask& mask, int size);

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_not(const BinaryMask& a);
SoftMask to_soft(const BinaryMask& mask);

// ---------------------------------------------------------------------------
// Gaussian blur

// 0.3 * ((size - 1) * 0.5 - 1) + 0.8
double default_sigma(int size);

// Normalized size-tap kernel, centre tap at index size / 2.
std::vector<double> gaussian_kernel(int size, std::optional<double> sigma = std::nullopt);

namespace detail {

// 1-D pass along rows (horizontal == true) or columns. Taps that fall off the
// canvas are dropped and the remaining weights renormalized.
template <typename In>
Plane<double> blur_pass(const Eigen::ArrayBase<In>& src, const std::vector<double>& kernel, bool horizontal) {
  const Index h = src.rows(), w = src.cols();
  const Index radius = static_cast<Index>(kernel.size() / 2);
  Plane<double> out(h, w);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      double acc = 0.0, norm = 0.0;
      for (Index k = -radius; k <= radius; ++k) {
        const Index yy = horizontal ? y : y + k;
        const Index xx = horizontal ? x + k : x;
        if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
        const double wk = kernel[static_cast<std::size_t>(k + radius)];
        acc += wk * static_cast<double>(src(yy, xx));
        norm += wk;
      }
      out(y, x) = acc / norm;
    }
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
Plane<Scalar> gaussian_blur(const Plane<Scalar>& src, int size, std::optional<double> sigma = std::nullopt) {
  require_odd_size(size, "gaussian_blur");
  if (sigma && !(*sigma > 0.0)) throw ParameterError("gaussian_blur: sigma must be positive");
  if (size == 1 || src.size() == 0) return src;
  const auto kernel = gaussian_kernel(size, sigma);
  const Plane<double> horiz = detail::blur_pass(src, kernel, true);
  const Plane<double> both = detail::blur_pass(horiz, kernel, false);
  // A convex combination can land an ulp outside the input range in double.
  const double lo = static_cast<double>(src.minCoeff());
  const double hi = static_cast<double>(src.maxCoeff());
  return both.cwiseMax(lo).cwiseMin(hi).template cast<Scalar>();
}

SoftMask gaussian_blur(const SoftMask& mask, int size, std::optional<double> sigma = std::nullopt);
RasterImage gaussian_blur(const RasterImage& img, int size, std::optional<double> sigma = std::nullopt);

// ---------------------------------------------------------------------------
// Resize. Bilinear samples at half-pixel centres with edge clamping; nearest
// takes the source pixel whose centre is closest to the mapped coordinate.

template <typename Scalar>
Plane<Scalar> resize(const Plane<Scalar>& src, Index out_h, Index out_w, Interp mode) {
  if (out_h < 1 || out_w < 1) throw ParameterError("resize: target dimensions must be >= 1");
  const Index in_h = src.rows(), in_w = src.cols();
  if (in_h < 1 || in_w < 1) throw ParameterError("resize: empty source");
  if (in_h == out_h && in_w == out_w) return src;

  const double sy = static_cast<double>(in_h) / static_cast<double>(out_h);
  const double sx = static_cast<double>(in_w) / static_cast<double>(out_w);
  Plane<Scalar> out(out_h, out_w);

  if (mode == Interp::nearest) {
    std::vector<Index> col(static_cast<std::size_t>(out_w));
    for (Index x = 0; x < out_w; ++x)
      col[static_cast<std::size_t>(x)] =
          std::min<Index>(in_w - 1, static_cast<Index>(std::floor((static_cast<double>(x) + 0.5) * sx)));
    for (Index y = 0; y < out_h; ++y) {
      const Index sy_i =
          std::min<Index>(in_h - 1, static_cast<Index>(std::floor((static_cast<double>(y) + 0.5) * sy)));
      for (Index x = 0; x < out_w; ++x) out(y, x) = src(sy_i, col[static_cast<std::size_t>(x)]);
    }
    return out;
  }

  struct Tap {
    Index i0, i1;
    double f;
  };
  auto taps = [](Index out_n, Index in_n, double scale) {
    std::vector<Tap> t(static_cast<std::size_t>(out_n));
    for (Index i = 0; i < out_n; ++i) {
      double s = (static_cast<double>(i) + 0.5) * scale - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(in_n - 1));
      const Index i0 = static_cast<Index>(std::floor(s));
      const Index i1 = std::min<Index>(i0 + 1, in_n - 1);
      t[static_cast<std::size_t>(i)] = {i0, i1, s - static_cast<double>(i0)};
    }
    return t;
  };
  const auto ty = taps(out_h, in_h, sy);
  const auto tx = taps(out_w, in_w, sx);
  for (Index y = 0; y < out_h; ++y) {
    const Tap& a = ty[static_cast<std::size_t>(y)];
    for (Index x = 0; x < out_w; ++x) {
      const Tap& b = tx[static_cast<std::size_t>(x)];
      const double top = (1.0 - b.f) * static_cast<double>(src(a.i0, b.i0)) + b.f * static_cast<double>(src(a.i0, b.i1));
      const double bot = (1.0 - b.f) * static_cast<double>(src(a.i1, b.i0)) + b.f * static_cast<double>(src(a.i1, b.i1));
      out(y, x) = static_cast<Scalar>((1.0 - a.f) * top + a.f * bot);
    }
  }
  return out;
}

RasterImage resize(const RasterImage& img, Index out_h, Index out_w, Interp mode = Interp::bilinear);
SoftMask resize(const SoftMask& mask, Index out_h, Index out_w, Interp mode = Interp::bilinear);
// Masks only resize with nearest so they stay binary.
BinaryMask resize(const BinaryMask& mask, Index out_h, Index out_w);

// ---------------------------------------------------------------------------
// out = alpha * a + (1 - alpha) * b, alpha broadcast over channels.
// alpha == 0 yields b and alpha == 1 yields a bit-exactly.
RasterImage composite(const RasterImage& a, const RasterImage& b, const SoftMask& alpha);

// Per-pixel version of composite, exposed for in-place paste loops.
inline float blend_pixel(float a, float b, float alpha) {
  if (alpha <= 0.0f) return b;
  if (alpha >= 1.0f) return a;
  return static_cast<float>(static_cast<double>(b) +
                            static_cast<double>(alpha) * (static_cast<double>(a) - static_cast<double>(b)));
}

// Clamp to [0,1] and replace non-finite values with 0.
void normalize_in_place(RasterImage& img);

}  // namespace rr
