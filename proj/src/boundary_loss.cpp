#include "regionrefine/boundary_loss.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "regionrefine/rng.hpp"

namespace rr {

BinaryMask boundary_band(const BinaryMask& mask_c, const BandParams& params) {
  require_odd_size(params.r_out, "boundary_band r_out");
  require_odd_size(params.r_in, "boundary_band r_in");
  return mask_and_not(dilate(mask_c, params.r_out), erode(mask_c, params.r_in));
}

namespace {

// Row i holds the normalized overlap of output interval i with each input pixel.
Eigen::MatrixXd area_weights(Index out_n, Index in_n) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(out_n, in_n);
  const double scale = static_cast<double>(in_n) / static_cast<double>(out_n);
  for (Index i = 0; i < out_n; ++i) {
    const double lo = static_cast<double>(i) * scale;
    const double hi = static_cast<double>(i + 1) * scale;
    for (Index k = static_cast<Index>(std::floor(lo)); k < in_n && static_cast<double>(k) < hi; ++k) {
      const double overlap = std::min(hi, static_cast<double>(k + 1)) - std::max(lo, static_cast<double>(k));
      if (overlap > 0.0) w(i, k) = overlap / scale;
    }
  }
  return w;
}

}  // namespace

SoftMask resize_band(const BinaryMask& band, Index out_h, Index out_w) {
  if (out_h < 1 || out_w < 1) throw ParameterError("resize_band: target dimensions must be >= 1");
  const Eigen::MatrixXd b = (band.px != 0).cast<double>().matrix();
  const Eigen::MatrixXd cover = area_weights(out_h, band.height()) * b * area_weights(out_w, band.width()).transpose();
  return SoftMask(cover.array().cwiseMax(0.0).cwiseMin(1.0).cast<float>());
}

double gradient_check(const LatentGrid<double>& v_pred, const LatentGrid<double>& v_target, const SoftMask& band,
                      double alpha, double step) {
  const LatentGrid<double> analytic = weighted_loss_gradient(v_pred, v_target, band.px, alpha);
  auto loss = [&](const LatentGrid<double>& v) { return weighted_loss(base_loss_map(v, v_target), band, alpha); };

  double worst = 0.0;
  LatentGrid<double> probe = v_pred;
  for (Index c = 0; c < v_pred.channels(); ++c) {
    for (Index y = 0; y < v_pred.height(); ++y) {
      for (Index x = 0; x < v_pred.width(); ++x) {
        const double orig = probe(y, x, c);
        probe(y, x, c) = orig + step;
        const double up = loss(probe);
        probe(y, x, c) = orig - step;
        const double down = loss(probe);
        probe(y, x, c) = orig;
        const double numeric = (up - down) / (2.0 * step);
        const double a = analytic(y, x, c);
        const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
        worst = std::max(worst, std::abs(a - numeric) / denom);
      }
    }
  }
  return worst;
}

ToyTrainResult train_toy(const ToyTrainerConfig& cfg, const SoftMask& band, double alpha) {
  const Index h = cfg.latent_h, w = cfg.latent_w;
  if (band.height() != h || band.width() != w) throw ParameterError("train_toy: band must match the latent grid");
  if (cfg.samples < 4 || cfg.steps < 1) throw ParameterError("train_toy: need >= 4 samples and >= 1 step");
  const int s_count = cfg.samples;
  const double n_cells = static_cast<double>(h * w);

  LatentGrid<double> z0(h, w, 1);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      z0(y, x, 0) = 3.0 + std::sin(2.0 * std::numbers::pi * static_cast<double>(y) / static_cast<double>(h)) *
                              std::cos(2.0 * std::numbers::pi * static_cast<double>(x) / static_cast<double>(w));

  // Draw order: samples outermost, then cells row-major, t before z1.
  Rng rng(cfg.seed);
  std::vector<FlowSample<double>> flow;
  flow.reserve(static_cast<std::size_t>(s_count));
  std::vector<Plane<double>> t_grid;
  for (int s = 0; s < s_count; ++s) {
    LatentGrid<double> z1(h, w, 1);
    Plane<double> tg(h, w);
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x) {
        tg(y, x) = rng.uniform();
        z1(y, x, 0) = rng.normal();
      }
    // flow_interpolate takes one t per grid, so build z_t per cell directly
    // from the same interpolant with the per-cell t.
    FlowSample<double> fs{z0, z0};
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x) {
        const auto one = flow_interpolate(LatentGrid<double>(1, 1, 1, z0(y, x, 0)),
                                          LatentGrid<double>(1, 1, 1, z1(y, x, 0)), tg(y, x));
        fs.z_t(y, x, 0) = one.z_t(0, 0, 0);
        fs.v_t(y, x, 0) = one.v_t(0, 0, 0);
      }
    flow.push_back(std::move(fs));
    t_grid.push_back(std::move(tg));
  }

  // Per-cell feature second moments for the preconditioner.
  using Vec3 = Eigen::Vector3d;
  using Mat3 = Eigen::Matrix3d;
  std::vector<Eigen::LDLT<Mat3>> precond(static_cast<std::size_t>(h * w));
  auto features = [&](int s, Index y, Index x) {
    return Vec3(flow[static_cast<std::size_t>(s)].z_t(y, x, 0), t_grid[static_cast<std::size_t>(s)](y, x), 1.0);
  };
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      Mat3 g = Mat3::Zero();
      for (int s = 0; s < s_count; ++s) {
        const Vec3 f = features(s, y, x);
        g += f * f.transpose();
      }
      precond[static_cast<std::size_t>(y * w + x)].compute(g / s_count);
    }

  std::vector<Vec3> theta(static_cast<std::size_t>(h * w), Vec3::Zero());
  auto predict = [&](int s) {
    LatentGrid<double> v(h, w, 1);
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x) v(y, x, 0) = theta[static_cast<std::size_t>(y * w + x)].dot(features(s, y, x));
    return v;
  };
  auto objective = [&]() {
    double total = 0.0;
    for (int s = 0; s < s_count; ++s)
      total += weighted_loss(base_loss_map(predict(s), flow[static_cast<std::size_t>(s)].v_t), band, alpha);
    return total / s_count;
  };

  ToyTrainResult res;
  res.loss_history.reserve(static_cast<std::size_t>(cfg.steps + 1));
  for (int step = 0; step < cfg.steps; ++step) {
    std::vector<Vec3> grad(theta.size(), Vec3::Zero());
    double total = 0.0;
    for (int s = 0; s < s_count; ++s) {
      const LatentGrid<double> v = predict(s);
      const auto& target = flow[static_cast<std::size_t>(s)].v_t;
      total += weighted_loss(base_loss_map(v, target), band, alpha);
      const LatentGrid<double> g = weighted_loss_gradient(v, target, band.px, alpha);
      for (Index y = 0; y < h; ++y)
        for (Index x = 0; x < w; ++x) grad[static_cast<std::size_t>(y * w + x)] += g(y, x, 0) * features(s, y, x);
    }
    res.loss_history.push_back(total / s_count);
    for (std::size_t i = 0; i < theta.size(); ++i)
      theta[i] -= cfg.base_step * (n_cells / 2.0) * precond[i].solve(grad[i] / s_count);
  }
  res.loss_history.push_back(objective());
  res.initial_loss = res.loss_history.front();
  res.final_loss = res.loss_history.back();

  Plane<double> per_cell = Plane<double>::Zero(h, w);
  for (int s = 0; s < s_count; ++s)
    per_cell += base_loss_map(predict(s), flow[static_cast<std::size_t>(s)].v_t).channel(0);
  per_cell /= s_count;
  const Plane<double> b = band.px.cast<double>();
  res.band_residual = b.sum() > 0.0 ? (b * per_cell).sum() / b.sum() : 0.0;
  return res;
}

}  // namespace rr
