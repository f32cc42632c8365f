#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "latent_painter/core.hpp"

namespace latent_painter {

/// Receives every animation frame as it is produced. Painting calls on_frame with
/// the canvas right after a frame closes, and on_stage_end after each trajectory
/// iteration and after the terminal flush.
class FrameSink {
 public:
  virtual ~FrameSink() = default;
  virtual void on_frame(const Canvas& canvas) = 0;
  virtual void on_stage_end(const Canvas& /*canvas*/) {}
};

/// Closes the open frame: bumps the counter and hands the canvas to the sink.
inline void emit_frame(Canvas& canvas, FrameSink* sink) {
  ++canvas.frame_counter;
  canvas.pending_strokes = 0;
  if (sink != nullptr) sink->on_frame(canvas);
}

/// Keeps every frame and the cumulative heatmap at each stage end in memory.
class FrameCollector : public FrameSink {
 public:
  void on_frame(const Canvas& canvas) override { frames.push_back(canvas.z); }
  void on_stage_end(const Canvas& canvas) override { heatmaps.push_back(canvas.heatmap); }

  std::vector<Latent> frames;
  std::vector<Field<std::uint32_t>> heatmaps;
};

/// Records Σ|frame_f − frame_{f−1}| per frame, starting from an all-zero frame.
class ReleaseMeter : public FrameSink {
 public:
  void on_frame(const Canvas& canvas) override {
    const auto cur = canvas.z.values();
    if (previous_.empty()) previous_.assign(cur.size(), 0.0F);
    double sum = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      sum += double(std::fabs(cur[i] - previous_[i]));
    }
    released.push_back(sum);
    previous_.assign(cur.begin(), cur.end());
  }

  /// Population coefficient of variation (stddev / mean) of the released amounts.
  [[nodiscard]] double coefficient_of_variation() const {
    if (released.empty()) return 0.0;
    double mean = 0.0;
    for (double r : released) mean += r;
    mean /= double(released.size());
    if (mean == 0.0) return 0.0;
    double var = 0.0;
    for (double r : released) var += (r - mean) * (r - mean);
    var /= double(released.size());
    return std::sqrt(var) / mean;
  }

  std::vector<double> released;

 private:
  std::vector<float> previous_;
};

/// Forwards to several sinks in order.
class TeeSink : public FrameSink {
 public:
  explicit TeeSink(std::vector<FrameSink*> sinks) : sinks_(std::move(sinks)) {}
  void on_frame(const Canvas& canvas) override {
    for (auto* s : sinks_) s->on_frame(canvas);
  }
  void on_stage_end(const Canvas& canvas) override {
    for (auto* s : sinks_) s->on_stage_end(canvas);
  }

 private:
  std::vector<FrameSink*> sinks_;
};

}  // namespace latent_painter
