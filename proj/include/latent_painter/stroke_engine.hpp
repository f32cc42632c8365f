#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ranges>
#include <thread>
#include <vector>

#include "latent_painter/core.hpp"
#include "latent_painter/frame_sink.hpp"

namespace latent_painter {

/// Memory of the iteration-gating policy: largest gaps seen so far.
struct PolicyState {
  double max_total_gap = 0.0;
  std::vector<double> per_channel_max_gap;
};

struct IterationReport {
  int iteration = 0;
  bool qualified = false;
  std::vector<int> channels_painted;
  std::vector<StrokeEvent> strokes;
  double start_gap = 0.0;
  /// Σ|Z − D_t| left over once the iteration finished; carried into the next snapshot.
  double residual_gap = 0.0;
};

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct PaintResult {
  std::vector<IterationReport> reports;
  StrokeLog log;
  Canvas canvas;
};

namespace detail {

/// Splits [0, rows) into contiguous bands, one per worker. Each row is written by
/// exactly one worker, so the result never depends on the thread count.
template <typename Fn>
void for_each_row_band(int rows, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, std::max(rows, 1));
  if (threads == 1) {
    fn(0, rows);
    return;
  }
  const int base = rows / threads;
  const int extra = rows % threads;
  std::vector<std::pair<int, int>> bands;
  int begin = 0;
  for (int t = 0; t < threads; ++t) {
    const int len = base + (t < extra ? 1 : 0);
    bands.emplace_back(begin, begin + len);
    begin += len;
  }
  std::vector<std::jthread> workers;
  workers.reserve(std::size_t(threads - 1));
  for (int t = 1; t < threads; ++t) {
    workers.emplace_back([&fn, band = bands[std::size_t(t)]] { fn(band.first, band.second); });
  }
  fn(bands[0].first, bands[0].second);
}

inline float move_cost_value(double d2, double sigma, double epsilon, CostMode mode) {
  if (mode == CostMode::off) return 1.0F;
  const double g = std::exp(-d2 / (2.0 * sigma * sigma));
  if (mode == CostMode::near) return float(epsilon + (1.0 - epsilon) * g);
  return float(1.0 - (1.0 - epsilon) * g);
}

inline void check_cost_params(double sigma, double epsilon) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be > 0");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidArgument("epsilon must lie in (0, 1]");
}

/// Move-cost values depend only on (|dx|, |dy|); tabulate them once per channel pass.
class MoveCostTable {
 public:
  MoveCostTable(int h, int w, double sigma, double epsilon, CostMode mode)
      : w_(w), values_(std::size_t(h) * std::size_t(w)) {
    for (int dy = 0; dy < h; ++dy) {
      for (int dx = 0; dx < w; ++dx) {
        const double d2 = double(dx) * double(dx) + double(dy) * double(dy);
        values_[std::size_t(dy) * std::size_t(w) + std::size_t(dx)] = move_cost_value(d2, sigma, epsilon, mode);
      }
    }
  }
  [[nodiscard]] float at(int dx, int dy) const {
    return values_[std::size_t(std::abs(dy)) * std::size_t(w_) + std::size_t(std::abs(dx))];
  }

 private:
  int w_;
  std::vector<float> values_;
};

/// Window sums of v over the clipped (2r+1)² square at every region cell, then the
/// argmax scanning y then x. Each window sum is the top-to-bottom sum of its
/// left-to-right row sums, in double; the brute-force oracle uses the same order.
inline Point box_argmax(const RealField& v, const Mask& region, int radius, int threads,
                        std::vector<double>& row_sums, std::vector<double>& box) {
  const int h = v.height();
  const int w = v.width();
  row_sums.resize(std::size_t(h) * std::size_t(w));
  box.resize(std::size_t(h) * std::size_t(w));
  for_each_row_band(h, threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        const int xa = std::max(0, x - radius);
        const int xb = std::min(w - 1, x + radius);
        double s = 0.0;
        for (int xi = xa; xi <= xb; ++xi) s += double(v(xi, y));
        row_sums[std::size_t(y) * std::size_t(w) + std::size_t(x)] = s;
      }
    }
  });
  for_each_row_band(h, threads, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      const int ya = std::max(0, y - radius);
      const int yb = std::min(h - 1, y + radius);
      for (int x = 0; x < w; ++x) {
        if (!region(x, y)) continue;
        double s = 0.0;
        for (int yi = ya; yi <= yb; ++yi) s += row_sums[std::size_t(yi) * std::size_t(w) + std::size_t(x)];
        box[std::size_t(y) * std::size_t(w) + std::size_t(x)] = s;
      }
    }
  });
  bool found = false;
  Point best;
  double best_sum = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!region(x, y)) continue;
      const double s = box[std::size_t(y) * std::size_t(w) + std::size_t(x)];
      if (!found || s > best_sum) {
        found = true;
        best = {x, y};
        best_sum = s;
      }
    }
  }
  if (!found) throw PreconditionViolation("cannot pick a stroke point from an empty region");
  return best;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Policy

/// True iff the canvas-to-snapshot gap exceeds rho times the largest gap seen so far.
inline bool qualify_iteration(const Canvas& canvas, const Latent& snapshot, const PolicyState& policy,
                              double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidArgument("rho must lie in [0, 1]");
  const double gap = l1_gap(canvas, snapshot);
  return gap > rho * policy.max_total_gap;
}

/// Channels worth painting this iteration, largest gap first (ties by channel index).
/// A channel qualifies when its gap beats rho times its own historical maximum and
/// it has at least one cell above theta. Folds this iteration's gaps into the policy.
inline std::vector<int> select_channels(const Canvas& canvas, const Latent& snapshot, PolicyState& policy,
                                        double rho, double theta) {
  detail::require_same_shape(canvas, snapshot);
  const int channels = canvas.shape().channels;
  policy.per_channel_max_gap.resize(std::size_t(channels), 0.0);

  std::vector<double> gaps(std::size_t(channels), 0.0);
  std::vector<int> selected;
  for (int c = 0; c < channels; ++c) {
    gaps[std::size_t(c)] = l1_gap(canvas, snapshot, c);
    if (!(gaps[std::size_t(c)] > rho * policy.per_channel_max_gap[std::size_t(c)])) continue;
    const auto z = canvas.z.channel(c);
    const auto d = snapshot.channel(c);
    const bool any_above = std::ranges::any_of(std::views::iota(std::size_t{0}, z.size()),
                                               [&](std::size_t i) { return double(std::fabs(z[i] - d[i])) > theta; });
    if (any_above) selected.push_back(c);
  }
  std::stable_sort(selected.begin(), selected.end(),
                   [&](int a, int b) { return gaps[std::size_t(a)] > gaps[std::size_t(b)]; });
  for (int c = 0; c < channels; ++c) {
    policy.per_channel_max_gap[std::size_t(c)] =
        std::max(policy.per_channel_max_gap[std::size_t(c)], gaps[std::size_t(c)]);
  }
  return selected;
}

// ---------------------------------------------------------------------------
// Fields

/// Cells of one channel where |Z − D_t| > theta (strict).
inline Mask stroke_region(const Canvas& canvas, const Latent& snapshot, int channel, double theta) {
  detail::require_same_shape(canvas, snapshot);
  detail::require_channel(canvas.shape(), channel);
  const Shape& s = canvas.shape();
  Mask mask(s.height, s.width, 0);
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      mask(x, y) = double(std::fabs(canvas.z.at(channel, x, y) - snapshot.at(channel, x, y))) > theta ? 1 : 0;
    }
  }
  return mask;
}

inline RealField info_gain(const Canvas& canvas, const Latent& snapshot, int channel) {
  detail::require_same_shape(canvas, snapshot);
  detail::require_channel(canvas.shape(), channel);
  const Shape& s = canvas.shape();
  RealField gain(s.height, s.width, 0.0F);
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      gain(x, y) = std::fabs(canvas.z.at(channel, x, y) - snapshot.at(channel, x, y));
    }
  }
  return gain;
}

/// Brush move cost. All ones before the first stroke of a pass or with cost off;
/// near: ε + (1−ε)·g, far: 1 − (1−ε)·g, with g = exp(−d²/2σ²) around center.
inline RealField move_cost_field(std::optional<Point> center, int h, int w, double sigma, double epsilon,
                                 CostMode mode) {
  detail::check_cost_params(sigma, epsilon);
  if (h < 1 || w < 1) throw InvalidArgument("move cost field needs positive dimensions");
  RealField m(h, w, 1.0F);
  if (!center || mode == CostMode::off) return m;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = double(x - center->x);
      const double dy = double(y - center->y);
      m(x, y) = detail::move_cost_value(dx * dx + dy * dy, sigma, epsilon, mode);
    }
  }
  return m;
}

/// V = G · M element-wise.
inline RealField motivation_field(const RealField& gain, const RealField& cost) {
  if (!gain.same_shape(cost)) throw InvalidArgument("gain and cost fields differ in shape");
  RealField v(gain.height(), gain.width(), 0.0F);
  auto out = v.values();
  auto g = gain.values();
  auto m = cost.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = g[i] * m[i];
  return v;
}

/// Region cell whose clipped (2r+1)² neighborhood has the largest sum of v.
/// Ties go to the smallest y, then the smallest x.
inline Point pick_stroke_point(const RealField& v, const Mask& region, int radius, int threads = 1) {
  if (!v.same_shape(region)) throw InvalidArgument("motivation field and region differ in shape");
  if (radius < 0) throw InvalidArgument("radius must be >= 0");
  std::vector<double> row_sums;
  std::vector<double> box;
  return detail::box_argmax(v, region, radius, threads, row_sums, box);
}

// ---------------------------------------------------------------------------
// Strokes

/// Copies the snapshot into one channel over the clipped square footprint, bumps the
/// heatmap there, and closes the frame once strokes_per_frame strokes are pending.
inline StrokeEvent apply_stroke(Canvas& canvas, const Latent& snapshot, int channel, Point center, int radius,
                                int iteration = 0, int strokes_per_frame = 1, FrameSink* sink = nullptr) {
  detail::require_same_shape(canvas, snapshot);
  detail::require_channel(canvas.shape(), channel);
  const Shape& s = canvas.shape();
  if (!s.contains_pixel(center.x, center.y)) {
    throw InvalidArgument("stroke center (" + std::to_string(center.x) + ", " + std::to_string(center.y) +
                          ") outside canvas " + to_string(s));
  }
  if (radius < 0) throw InvalidArgument("radius must be >= 0");
  if (strokes_per_frame < 1) throw InvalidArgument("strokes per frame must be positive");

  const int x0 = std::max(0, center.x - radius);
  const int x1 = std::min(s.width - 1, center.x + radius);
  const int y0 = std::max(0, center.y - radius);
  const int y1 = std::min(s.height - 1, center.y + radius);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      canvas.z.at(channel, x, y) = snapshot.at(channel, x, y);
      ++canvas.heatmap(x, y);
    }
  }
  StrokeEvent ev{canvas.frame_counter, iteration, channel, center.x, center.y, radius};
  if (++canvas.pending_strokes >= strokes_per_frame) emit_frame(canvas, sink);
  return ev;
}

namespace detail {

/// Stroke loop shared by regular channel passes (theta from config) and the
/// terminal flush pass (theta = 0, no cap).
inline std::vector<StrokeEvent> paint_pass(Canvas& canvas, const Latent& snapshot, int channel,
                                           const PainterConfig& config, double theta, std::optional<int> cap,
                                           int iteration, FrameSink* sink) {
  const int h = canvas.shape().height;
  const int w = canvas.shape().width;
  const int r = config.radius;

  Mask region = stroke_region(canvas, snapshot, channel, theta);
  std::size_t remaining = std::size_t(std::count(region.values().begin(), region.values().end(), 1));
  RealField gain = info_gain(canvas, snapshot, channel);
  const MoveCostTable cost(h, w, config.sigma, config.epsilon, config.cost_mode);
  RealField v(h, w, 0.0F);
  std::vector<double> row_sums;
  std::vector<double> box;
  std::optional<Point> last;

  std::vector<StrokeEvent> events;
  while (remaining > 0) {
    if (cap && events.size() >= std::size_t(*cap)) break;

    if (!last || config.cost_mode == CostMode::off) {
      std::ranges::copy(gain.values(), v.values().begin());
    } else {
      const Point c = *last;
      for_each_row_band(h, config.threads, [&](int ya, int yb) {
        for (int y = ya; y < yb; ++y) {
          for (int x = 0; x < w; ++x) v(x, y) = gain(x, y) * cost.at(x - c.x, y - c.y);
        }
      });
    }
    const Point p = box_argmax(v, region, r, config.threads, row_sums, box);
    events.push_back(apply_stroke(canvas, snapshot, channel, p, r, iteration, config.strokes_per_frame, sink));

    for (int y = std::max(0, p.y - r); y <= std::min(h - 1, p.y + r); ++y) {
      for (int x = std::max(0, p.x - r); x <= std::min(w - 1, p.x + r); ++x) {
        if (region(x, y)) {
          region(x, y) = 0;
          --remaining;
        }
        gain(x, y) = std::fabs(canvas.z.at(channel, x, y) - snapshot.at(channel, x, y));
      }
    }
    last = p;
  }
  return events;
}

}  // namespace detail

/// One channel pass: stroke the highest-motivation neighborhood until the region
/// above theta is exhausted or the stroke cap is hit.
inline std::vector<StrokeEvent> paint_channel(Canvas& canvas, const Latent& snapshot, int channel,
                                              const PainterConfig& config, int iteration = 0,
                                              FrameSink* sink = nullptr) {
  validate(config);
  detail::require_same_shape(canvas, snapshot);
  detail::require_channel(canvas.shape(), channel);
  return detail::paint_pass(canvas, snapshot, channel, config, config.theta, config.stroke_cap, iteration, sink);
}

/// Releases whatever is still not bitwise equal to the final snapshot as one frame,
/// then closes the flush stage.
inline void final_flush(Canvas& canvas, const Latent& last_snapshot, FrameSink* sink) {
  if (canvas.pending_strokes > 0) emit_frame(canvas, sink);
  const auto coords = unequal_coords(canvas, last_snapshot);
  if (!coords.empty()) {
    release_coords(canvas, last_snapshot, coords);
    emit_frame(canvas, sink);
  }
  if (sink != nullptr) sink->on_stage_end(canvas);
}

/// Runs the full stroke painter over a trajectory. Frames go to sink as they close;
/// the complete stroke log and per-iteration reports are returned.
inline PaintResult paint_trajectory(const LatentTrajectory& trajectory, const PainterConfig& config,
                                    FrameSink* sink = nullptr) {
  validate(trajectory);
  validate(config);
  PaintResult result;
  result.canvas = canvas_new(trajectory.shape());
  result.log.shape = trajectory.shape();
  result.log.config = config;
  Canvas& canvas = result.canvas;
  PolicyState policy;

  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const Latent& snapshot = trajectory.snapshots[t];
    IterationReport report;
    report.iteration = trajectory.iteration_indices[t];
    report.start_gap = l1_gap(canvas, snapshot);
    report.qualified = report.start_gap > config.rho * policy.max_total_gap;
    if (report.qualified) {
      policy.max_total_gap = std::max(policy.max_total_gap, report.start_gap);
      report.channels_painted = select_channels(canvas, snapshot, policy, config.rho, config.theta);
      for (int c : report.channels_painted) {
        auto strokes = paint_channel(canvas, snapshot, c, config, report.iteration, sink);
        report.strokes.insert(report.strokes.end(), strokes.begin(), strokes.end());
      }
    }
    if (canvas.pending_strokes > 0) emit_frame(canvas, sink);
    report.residual_gap = l1_gap(canvas, snapshot);
    if (sink != nullptr) sink->on_stage_end(canvas);
    result.log.events.insert(result.log.events.end(), report.strokes.begin(), report.strokes.end());
    result.reports.push_back(std::move(report));
  }

  if (config.final_flush) {
    final_flush(canvas, trajectory.last(), sink);
    result.log.flush_iteration = trajectory.iteration_indices.back();
  }
  return result;
}

}  // namespace latent_painter
