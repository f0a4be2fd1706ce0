#pragma once

#include <cstdint>
#include <vector>

#include "regionrefine/raster.hpp"

namespace rr {

// C x H x W latent tensor. Same container as images, without the [0,1] range.
template <typename Scalar>
using LatentGrid = Image<Scalar>;

struct BandParams {
  int r_out = 17;
  int r_in = 17;
  double alpha = 9.0;

  friend bool operator==(const BandParams&, const BandParams&) = default;
};

// Dilate(mask, r_out) AND NOT Erode(mask, r_in).
BinaryMask boundary_band(const BinaryMask& mask_c, const BandParams& params);

// Area-average downsampling: each output cell holds the fraction of its
// footprint covered by band pixels.
SoftMask resize_band(const BinaryMask& band, Index out_h, Index out_w);

template <typename Scalar>
struct FlowSample {
  LatentGrid<Scalar> z_t;
  LatentGrid<Scalar> v_t;
};

namespace detail {
template <typename Scalar>
void require_same_grid(const LatentGrid<Scalar>& a, const LatentGrid<Scalar>& b, const char* what) {
  if (!a.same_shape(b)) throw ParameterError(std::string(what) + ": latent shapes differ");
}
}  // namespace detail

// z_t = t z0 + (1 - t) z1,  v_t = z0 - z1.
template <typename Scalar>
FlowSample<Scalar> flow_interpolate(const LatentGrid<Scalar>& z0, const LatentGrid<Scalar>& z1, Scalar t) {
  detail::require_same_grid(z0, z1, "flow_interpolate");
  if (!(t >= Scalar(0) && t <= Scalar(1))) throw ParameterError("flow_interpolate: t outside [0,1]");
  FlowSample<Scalar> out{z0, z0};
  for (Index c = 0; c < z0.channels(); ++c) {
    // Endpoints are special-cased so t = 0 / t = 1 reproduce z1 / z0 exactly.
    if (t == Scalar(1))
      out.z_t.channel(c) = z0.channel(c);
    else if (t == Scalar(0))
      out.z_t.channel(c) = z1.channel(c);
    else
      out.z_t.channel(c) = t * z0.channel(c) + (Scalar(1) - t) * z1.channel(c);
    out.v_t.channel(c) = z0.channel(c) - z1.channel(c);
  }
  return out;
}

// Per-cell squared error summed over channels.
template <typename Scalar>
LatentGrid<Scalar> base_loss_map(const LatentGrid<Scalar>& v_pred, const LatentGrid<Scalar>& v_target) {
  detail::require_same_grid(v_pred, v_target, "base_loss_map");
  Plane<Scalar> acc = Plane<Scalar>::Zero(v_pred.height(), v_pred.width());
  for (Index c = 0; c < v_pred.channels(); ++c) acc += (v_pred.channel(c) - v_target.channel(c)).square();
  return LatentGrid<Scalar>({std::move(acc)});
}

// mean over cells of loss * (1 + alpha * band).
template <typename Scalar, typename Band>
Scalar weighted_loss(const LatentGrid<Scalar>& loss_map, const Eigen::ArrayBase<Band>& band, Scalar alpha) {
  if (loss_map.channels() != 1) throw ParameterError("weighted_loss: loss map must have one channel");
  if (band.rows() != loss_map.height() || band.cols() != loss_map.width())
    throw ParameterError("weighted_loss: band and loss map differ in shape");
  const auto& l = loss_map.channel(0);
  if (alpha == Scalar(0)) return l.mean();
  return (l * (Scalar(1) + alpha * band.template cast<Scalar>())).mean();
}

template <typename Scalar>
Scalar weighted_loss(const LatentGrid<Scalar>& loss_map, const SoftMask& band, Scalar alpha) {
  return weighted_loss(loss_map, band.px, alpha);
}

template <typename Scalar>
Scalar weighted_loss(const LatentGrid<Scalar>& loss_map, const BinaryMask& band, Scalar alpha) {
  return weighted_loss(loss_map, band.px, alpha);
}

// dL/dv_pred = (2 / N) (1 + alpha * band) (v_pred - v_target), N = H * W.
template <typename Scalar, typename Band>
LatentGrid<Scalar> weighted_loss_gradient(const LatentGrid<Scalar>& v_pred, const LatentGrid<Scalar>& v_target,
                                          const Eigen::ArrayBase<Band>& band, Scalar alpha) {
  detail::require_same_grid(v_pred, v_target, "weighted_loss_gradient");
  const Scalar n = static_cast<Scalar>(v_pred.height() * v_pred.width());
  const Plane<Scalar> w = (Scalar(1) + alpha * band.template cast<Scalar>()) * (Scalar(2) / n);
  LatentGrid<Scalar> g = v_pred;
  for (Index c = 0; c < g.channels(); ++c) g.channel(c) = w * (v_pred.channel(c) - v_target.channel(c));
  return g;
}

// Max relative error between the analytic gradient and central finite
// differences of weighted_loss(base_loss_map(v_pred, v_target), band, alpha).
double gradient_check(const LatentGrid<double>& v_pred, const LatentGrid<double>& v_target, const SoftMask& band,
                      double alpha, double step = 1e-4);

// ---------------------------------------------------------------------------
// Toy flow-matching trainer. Every latent cell owns a linear predictor
// v = a * z_t + b * t + d fitted by preconditioned gradient descent on the
// boundary-weighted objective over a fixed, seeded set of (t, z1) draws. The
// target latent z0 is a smooth 1-channel pattern.

struct ToyTrainerConfig {
  Index latent_h = 16;
  Index latent_w = 16;
  int samples = 32;  // (t, z1) draws per cell
  int steps = 500;
  // Whitened step for a cell of unit weight. Fixed independently of alpha so
  // runs at different alpha share one step size.
  double base_step = 0.005;
  std::uint64_t seed = 1;
};

struct ToyTrainResult {
  std::vector<double> loss_history;  // objective before each step, plus the final value
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double band_residual = 0.0;  // band-weighted mean of the unweighted per-cell loss
};

// `band` is the latent-resolution band (e.g. from resize_band).
ToyTrainResult train_toy(const ToyTrainerConfig& config, const SoftMask& band, double alpha);

}  // namespace rr
