#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "latent_painter/core.hpp"
#include "latent_painter/random.hpp"

namespace latent_painter {

/// Knobs for a synthetic denoising trajectory: a dense, smoothly textured "final
/// latent" plus an error field whose amplitude shrinks geometrically, so the first
/// steps carry most of the change.
struct SyntheticOptions {
  /// Gaussian correlation length of the texture, in latent pixels.
  double correlation = 1.5;
  double initial_error = 0.25;
  double decay = 0.05;
  /// Per-step jitter amplitude relative to the shared error.
  double jitter = 0.3;
};

namespace detail {

/// Unit-variance, zero-mean Gaussian noise blurred with a separable Gaussian kernel,
/// renormalized per channel.
inline Latent smooth_noise(const Shape& shape, double correlation, Rng& rng) {
  Latent z(shape);
  for (float& v : z.values()) v = float(rng.normal());
  if (correlation <= 0.0) return z;
  const int radius = std::max(1, int(std::ceil(3.0 * correlation)));
  std::vector<double> kernel(std::size_t(2 * radius + 1));
  for (int i = -radius; i <= radius; ++i) {
    kernel[std::size_t(i + radius)] = std::exp(-double(i * i) / (2.0 * correlation * correlation));
  }
  const int h = shape.height;
  const int w = shape.width;
  std::vector<double> tmp(shape.plane());
  for (int c = 0; c < shape.channels; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int xi = std::clamp(x + i, 0, w - 1);
          s += kernel[std::size_t(i + radius)] * double(z.at(c, xi, y));
        }
        tmp[std::size_t(y) * std::size_t(w) + std::size_t(x)] = s;
      }
    }
    std::vector<double> out(shape.plane());
    double mean = 0.0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int yi = std::clamp(y + i, 0, h - 1);
          s += kernel[std::size_t(i + radius)] * tmp[std::size_t(yi) * std::size_t(w) + std::size_t(x)];
        }
        out[std::size_t(y) * std::size_t(w) + std::size_t(x)] = s;
        mean += s;
      }
    }
    mean /= double(out.size());
    double var = 0.0;
    for (double v : out) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / double(out.size()));
    auto dst = z.channel(c);
    for (std::size_t i = 0; i < out.size(); ++i) dst[i] = float(sd > 0.0 ? (out[i] - mean) / sd : 0.0);
  }
  return z;
}

}  // namespace detail

/// Deterministic trajectory emulating fast early convergence of predicted originals:
/// D_t = F + e·decay^t·E + j·e·decay^t·N_t. The error E is shared by all steps so the
/// predictions drift coherently toward F; N_t is a fresh per-step jitter.
inline LatentTrajectory make_converging_trajectory(const Shape& shape, int steps, std::uint64_t seed,
                                                   const SyntheticOptions& opts = {}) {
  if (steps < 1) throw InvalidArgument("synthetic trajectory needs at least one step");
  Rng rng(seed);
  const Latent final_field = detail::smooth_noise(shape, opts.correlation, rng);
  const Latent error = detail::smooth_noise(shape, opts.correlation, rng);
  std::vector<Latent> snaps;
  snaps.reserve(std::size_t(steps));
  for (int t = 0; t < steps; ++t) {
    const Latent jitter = detail::smooth_noise(shape, opts.correlation, rng);
    const double a = opts.initial_error * std::pow(opts.decay, double(t));
    Latent d = final_field;
    auto dv = d.values();
    auto ev = error.values();
    auto jv = jitter.values();
    for (std::size_t i = 0; i < dv.size(); ++i) {
      dv[i] += float(a * (double(ev[i]) + opts.jitter * double(jv[i])));
    }
    snaps.push_back(std::move(d));
  }
  return make_trajectory(std::move(snaps));
}

/// The 12-step 4×64×64 fixture used by the acceptance suite and the README demo.
inline LatentTrajectory bundled_fixture() { return make_converging_trajectory(Shape{4, 64, 64}, 12, 2024); }

/// Independent uniform values in [lo, hi); handy for property tests.
inline Latent random_latent(const Shape& shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Latent z(shape);
  for (float& v : z.values()) v = float(lo + (hi - lo) * rng.uniform());
  return z;
}

}  // namespace latent_painter
