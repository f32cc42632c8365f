#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "latent_painter/core.hpp"
#include "latent_painter/frame_sink.hpp"
#include "latent_painter/painter.hpp"

namespace latent_painter {

enum class Interpolation { linear, spherical };

/// Source schedule played backward, then the destination schedule forward.
/// Iteration indices are renumbered 0..n-1.
inline LatentTrajectory build_transition_trajectory(const LatentTrajectory& source,
                                                    const LatentTrajectory& destination) {
  validate(source);
  validate(destination);
  if (source.shape() != destination.shape()) {
    throw InvalidArgument("transition endpoints differ in shape: " + to_string(source.shape()) + " vs " +
                          to_string(destination.shape()));
  }
  std::vector<Latent> snaps;
  snaps.reserve(source.size() + destination.size());
  snaps.insert(snaps.end(), source.snapshots.rbegin(), source.snapshots.rend());
  snaps.insert(snaps.end(), destination.snapshots.begin(), destination.snapshots.end());
  return make_trajectory(std::move(snaps));
}

/// n latents from src to dst inclusive. Spherical mode follows the great circle of
/// the flattened vectors and falls back to linear for zero-norm inputs or angles
/// below 1e-6 rad. Endpoints are copied exactly.
inline LatentTrajectory interpolate_latents(const Latent& src, const Latent& dst, int n,
                                            Interpolation mode = Interpolation::linear) {
  if (src.shape() != dst.shape()) {
    throw InvalidArgument("interpolation endpoints differ in shape: " + to_string(src.shape()) + " vs " +
                          to_string(dst.shape()));
  }
  if (n < 2) throw InvalidArgument("interpolation needs at least 2 steps");

  const auto a = src.values();
  const auto b = dst.values();
  double omega = 0.0;
  bool spherical = mode == Interpolation::spherical;
  if (spherical) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      dot += double(a[i]) * double(b[i]);
      na += double(a[i]) * double(a[i]);
      nb += double(b[i]) * double(b[i]);
    }
    if (na == 0.0 || nb == 0.0) {
      spherical = false;
    } else {
      omega = std::acos(std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0));
      if (omega < 1e-6) spherical = false;
    }
  }

  std::vector<Latent> snaps;
  snaps.reserve(std::size_t(n));
  snaps.push_back(src);
  for (int k = 1; k < n - 1; ++k) {
    const double s = double(k) / double(n - 1);
    Latent z(src.shape());
    auto out = z.values();
    if (spherical) {
      const double so = std::sin(omega);
      const double wa = std::sin((1.0 - s) * omega) / so;
      const double wb = std::sin(s * omega) / so;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = float(wa * double(a[i]) + wb * double(b[i]));
    } else {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = float(double(a[i]) + s * (double(b[i]) - double(a[i])));
    }
    snaps.push_back(std::move(z));
  }
  snaps.push_back(dst);
  return make_trajectory(std::move(snaps));
}

struct TransitionResult {
  std::vector<Latent> frames;
  /// Cumulative heatmap at the end of every iteration (and of the flush).
  std::vector<Field<std::uint32_t>> heatmaps;
  PaintResult paint;
};

/// Paints a transition trajectory with the configured effect and collects frames.
inline TransitionResult transition_paint(const LatentTrajectory& trajectory, const PainterConfig& config,
                                         FrameSink* extra_sink = nullptr) {
  FrameCollector collector;
  TeeSink tee({&collector});
  if (extra_sink != nullptr) tee = TeeSink({&collector, extra_sink});
  TransitionResult result;
  result.paint = paint(trajectory, config, &tee);
  result.frames = std::move(collector.frames);
  result.heatmaps = std::move(collector.heatmaps);
  return result;
}

}  // namespace latent_painter
