#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latent_painter/errors.hpp"
#include "latent_painter/tensor.hpp"

namespace latent_painter {

/// Recorded predicted-original latents, one per denoising step, in schedule order.
struct LatentTrajectory {
  std::vector<Latent> snapshots;
  std::vector<int> iteration_indices;

  [[nodiscard]] std::size_t size() const { return snapshots.size(); }
  [[nodiscard]] const Shape& shape() const { return snapshots.front().shape(); }
  [[nodiscard]] const Latent& last() const { return snapshots.back(); }
};

/// Throws InvalidArgument unless the trajectory is non-empty, uniformly shaped,
/// finite and strictly increasing in iteration index.
inline void validate(const LatentTrajectory& traj) {
  if (traj.snapshots.empty()) {
    throw InvalidArgument("trajectory has no snapshots");
  }
  if (traj.iteration_indices.size() != traj.snapshots.size()) {
    throw InvalidArgument("trajectory iteration index count does not match snapshot count");
  }
  const Shape shape = traj.snapshots.front().shape();
  for (std::size_t t = 0; t < traj.snapshots.size(); ++t) {
    if (traj.snapshots[t].shape() != shape) {
      throw InvalidArgument("snapshot " + std::to_string(t) + " has shape " +
                            to_string(traj.snapshots[t].shape()) + ", expected " + to_string(shape));
    }
    for (float v : traj.snapshots[t].values()) {
      if (!std::isfinite(v)) {
        throw InvalidArgument("snapshot " + std::to_string(t) + " contains a non-finite value");
      }
    }
    if (t > 0 && traj.iteration_indices[t] <= traj.iteration_indices[t - 1]) {
      throw InvalidArgument("trajectory iteration indices must be strictly increasing");
    }
  }
}

/// Builds a trajectory with iteration indices 0..T-1.
inline LatentTrajectory make_trajectory(std::vector<Latent> snapshots) {
  LatentTrajectory traj;
  traj.iteration_indices.resize(snapshots.size());
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    traj.iteration_indices[i] = int(i);
  }
  traj.snapshots = std::move(snapshots);
  validate(traj);
  return traj;
}

/// Painter state: the evolving latent plus a per-pixel count of released cells.
struct Canvas {
  Latent z;
  Field<std::uint32_t> heatmap;
  std::int64_t frame_counter = 0;
  /// Strokes applied to the frame that has not been emitted yet.
  int pending_strokes = 0;

  [[nodiscard]] const Shape& shape() const { return z.shape(); }
};

struct StrokeEvent {
  std::int64_t frame_index = 0;
  int iteration = 0;
  int channel = 0;
  int center_x = 0;
  int center_y = 0;
  int radius = 0;

  friend bool operator==(const StrokeEvent&, const StrokeEvent&) = default;
};

struct Coord {
  int channel = 0;
  int x = 0;
  int y = 0;

  friend bool operator==(const Coord&, const Coord&) = default;
  friend auto operator<=>(const Coord&, const Coord&) = default;
};

/// Ordered frame groups of coordinates to copy from one target snapshot.
struct ReleasePlan {
  int target_iteration = 0;
  std::vector<std::vector<Coord>> frames;

  [[nodiscard]] std::size_t coord_count() const {
    std::size_t n = 0;
    for (const auto& f : frames) n += f.size();
    return n;
  }
};

enum class CostMode { near, far, off };
enum class Effect { strokes, glow, dissolve, fade, flip, passthrough };
enum class DissolveMode { random, content, vertical };

struct EffectParams {
  /// Frames per iteration (K). When unset, content-driven plans chunk by chunk_size
  /// and fade/flip fall back to kDefaultFrames.
  std::optional<int> frames_per_iteration;
  DissolveMode dissolve_mode = DissolveMode::random;
  int chunk_size = 256;
  std::uint64_t seed = 0;

  static constexpr int kDefaultFrames = 8;

  friend bool operator==(const EffectParams&, const EffectParams&) = default;
};

struct PainterConfig {
  double theta = 0.05;
  double rho = 0.1;
  int radius = 2;
  double sigma = 8.0;
  double epsilon = 0.25;
  CostMode cost_mode = CostMode::near;
  std::optional<int> stroke_cap;
  int strokes_per_frame = 1;
  bool final_flush = true;
  std::uint64_t seed = 0;
  Effect effect = Effect::strokes;
  EffectParams effect_params;
  /// Worker threads for per-stroke field computation. Results do not depend on it.
  int threads = 1;

  friend bool operator==(const PainterConfig&, const PainterConfig&) = default;
};

/// Everything needed to rebuild a stroke animation from its trajectory.
struct StrokeLog {
  static constexpr int kFormatVersion = 1;

  Shape shape;
  PainterConfig config;
  std::vector<StrokeEvent> events;
  /// Iteration index of the terminal flush record; empty when no flush was run.
  std::optional<int> flush_iteration;

  friend bool operator==(const StrokeLog&, const StrokeLog&) = default;
};

inline void validate(const PainterConfig& cfg) {
  if (!(cfg.theta > 0.0) || !std::isfinite(cfg.theta)) throw InvalidArgument("theta must be > 0");
  if (!(cfg.rho >= 0.0 && cfg.rho <= 1.0)) throw InvalidArgument("rho must lie in [0, 1]");
  if (cfg.radius < 0) throw InvalidArgument("radius must be >= 0");
  if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma)) throw InvalidArgument("sigma must be > 0");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0)) throw InvalidArgument("epsilon must lie in (0, 1]");
  if (cfg.stroke_cap && *cfg.stroke_cap < 1) throw InvalidArgument("stroke cap must be positive");
  if (cfg.strokes_per_frame < 1) throw InvalidArgument("strokes per frame must be positive");
  if (cfg.threads < 1) throw InvalidArgument("thread count must be positive");
  const auto& p = cfg.effect_params;
  if (p.frames_per_iteration && *p.frames_per_iteration < 1) {
    throw InvalidArgument("frames per iteration must be positive");
  }
  if (p.chunk_size < 1) throw InvalidArgument("chunk size must be positive");
}

inline std::string_view to_string(CostMode m) {
  switch (m) {
    case CostMode::near: return "near";
    case CostMode::far: return "far";
    case CostMode::off: return "off";
  }
  return "?";
}

inline std::string_view to_string(Effect e) {
  switch (e) {
    case Effect::strokes: return "strokes";
    case Effect::glow: return "glow";
    case Effect::dissolve: return "dissolve";
    case Effect::fade: return "fade";
    case Effect::flip: return "flip";
    case Effect::passthrough: return "passthrough";
  }
  return "?";
}

inline std::string_view to_string(DissolveMode m) {
  switch (m) {
    case DissolveMode::random: return "random";
    case DissolveMode::content: return "content";
    case DissolveMode::vertical: return "vertical";
  }
  return "?";
}

inline CostMode parse_cost_mode(std::string_view s) {
  if (s == "near") return CostMode::near;
  if (s == "far") return CostMode::far;
  if (s == "off") return CostMode::off;
  throw InvalidArgument("unknown cost mode '" + std::string(s) + "'");
}

inline Effect parse_effect(std::string_view s) {
  for (Effect e : {Effect::strokes, Effect::glow, Effect::dissolve, Effect::fade, Effect::flip,
                   Effect::passthrough}) {
    if (to_string(e) == s) return e;
  }
  throw InvalidArgument("unknown effect '" + std::string(s) + "'");
}

inline DissolveMode parse_dissolve_mode(std::string_view s) {
  if (s == "random") return DissolveMode::random;
  if (s == "content") return DissolveMode::content;
  if (s == "vertical") return DissolveMode::vertical;
  throw InvalidArgument("unknown dissolve mode '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Canvas operations

inline Canvas canvas_new(int c, int h, int w) {
  if (c < 1 || h < 1 || w < 1) {
    throw InvalidArgument("canvas dimensions must be positive, got " + std::to_string(c) + "x" +
                          std::to_string(h) + "x" + std::to_string(w));
  }
  Canvas canvas;
  canvas.z = Latent(Shape{c, h, w});
  canvas.heatmap = Field<std::uint32_t>(h, w, 0U);
  return canvas;
}

inline Canvas canvas_new(const Shape& s) { return canvas_new(s.channels, s.height, s.width); }

namespace detail {

inline void require_same_shape(const Canvas& canvas, const Latent& target) {
  if (canvas.shape() != target.shape()) {
    throw InvalidArgument("shape mismatch: canvas " + to_string(canvas.shape()) + " vs target " +
                          to_string(target.shape()));
  }
}

inline void require_channel(const Shape& s, int channel) {
  if (channel < 0 || channel >= s.channels) {
    throw InvalidArgument("channel " + std::to_string(channel) + " out of range [0, " +
                          std::to_string(s.channels) + ")");
  }
}

}  // namespace detail

/// Copies target into the canvas at exactly the given coordinates and bumps the
/// heatmap once per released coordinate. Validates every coordinate before writing.
inline void release_coords(Canvas& canvas, const Latent& target, std::span<const Coord> coords) {
  detail::require_same_shape(canvas, target);
  const Shape& s = canvas.shape();
  for (const Coord& k : coords) {
    if (!s.contains(k.channel, k.x, k.y)) {
      throw InvalidArgument("release coordinate (" + std::to_string(k.channel) + ", " +
                            std::to_string(k.x) + ", " + std::to_string(k.y) + ") out of bounds");
    }
  }
  for (const Coord& k : coords) {
    canvas.z.at(k.channel, k.x, k.y) = target.at(k.channel, k.x, k.y);
    ++canvas.heatmap(k.x, k.y);
  }
}

/// Σ|Z − target| accumulated in double, channel-major then row-major.
inline double l1_gap(const Canvas& canvas, const Latent& target, std::optional<int> channel = std::nullopt) {
  detail::require_same_shape(canvas, target);
  int c0 = 0;
  int c1 = canvas.shape().channels;
  if (channel) {
    detail::require_channel(canvas.shape(), *channel);
    c0 = *channel;
    c1 = *channel + 1;
  }
  double sum = 0.0;
  for (int c = c0; c < c1; ++c) {
    auto z = canvas.z.channel(c);
    auto d = target.channel(c);
    for (std::size_t i = 0; i < z.size(); ++i) {
      sum += double(std::fabs(z[i] - d[i]));
    }
  }
  return sum;
}

/// Coordinates whose canvas value is not bitwise identical to target (so -0 vs +0 counts).
inline std::vector<Coord> unequal_coords(const Canvas& canvas, const Latent& target) {
  detail::require_same_shape(canvas, target);
  const Shape& s = canvas.shape();
  std::vector<Coord> out;
  for (int c = 0; c < s.channels; ++c) {
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x) {
        if (std::bit_cast<std::uint32_t>(canvas.z.at(c, x, y)) !=
            std::bit_cast<std::uint32_t>(target.at(c, x, y))) {
          out.push_back({c, x, y});
        }
      }
    }
  }
  return out;
}

/// Coordinates where the canvas differs from target by strictly more than threshold.
inline std::vector<Coord> differing_coords(const Canvas& canvas, const Latent& target, double threshold) {
  detail::require_same_shape(canvas, target);
  const Shape& s = canvas.shape();
  std::vector<Coord> out;
  for (int c = 0; c < s.channels; ++c) {
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x) {
        if (double(std::fabs(canvas.z.at(c, x, y) - target.at(c, x, y))) > threshold) {
          out.push_back({c, x, y});
        }
      }
    }
  }
  return out;
}

}  // namespace latent_painter
