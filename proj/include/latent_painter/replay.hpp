#pragma once

#include <algorithm>
#include <climits>
#include <vector>

#include "latent_painter/core.hpp"
#include "latent_painter/frame_sink.hpp"
#include "latent_painter/stroke_engine.hpp"

namespace latent_painter {

/// Re-applies a stroke log to its trajectory, emitting the same frames and stage
/// heatmaps as the original run. Frame boundaries come from the logged frame indices.
inline Canvas replay(const StrokeLog& log, const LatentTrajectory& trajectory, FrameSink* sink = nullptr) {
  validate(trajectory);
  if (log.shape != trajectory.shape()) {
    throw ValidationError("stroke log shape " + to_string(log.shape) + " does not match trajectory " +
                          to_string(trajectory.shape()));
  }
  if (log.config.effect != Effect::strokes) {
    throw ValidationError("only stroke logs can be replayed; this log was written by effect '" +
                          std::string(to_string(log.config.effect)) + "'");
  }
  const auto& iters = trajectory.iteration_indices;
  auto position_of = [&](int iteration) {
    const auto it = std::lower_bound(iters.begin(), iters.end(), iteration);
    if (it == iters.end() || *it != iteration) {
      throw ValidationError("stroke log references iteration " + std::to_string(iteration) +
                            " missing from the trajectory");
    }
    return std::size_t(it - iters.begin());
  };

  Canvas canvas = canvas_new(trajectory.shape());
  std::size_t stage = 0;
  auto end_stage = [&] {
    if (canvas.pending_strokes > 0) emit_frame(canvas, sink);
    if (sink != nullptr) sink->on_stage_end(canvas);
    ++stage;
  };

  for (const StrokeEvent& e : log.events) {
    const std::size_t pos = position_of(e.iteration);
    if (pos < stage) throw ValidationError("stroke log iterations go backwards");
    while (stage < pos) end_stage();
    if (e.frame_index == canvas.frame_counter + 1 && canvas.pending_strokes > 0) {
      emit_frame(canvas, sink);
    }
    if (e.frame_index != canvas.frame_counter) {
      throw ValidationError("stroke log frame " + std::to_string(e.frame_index) + " does not follow frame " +
                            std::to_string(canvas.frame_counter));
    }
    apply_stroke(canvas, trajectory.snapshots[pos], e.channel, {e.center_x, e.center_y}, e.radius, e.iteration,
                 INT_MAX, sink);
  }
  while (stage < trajectory.size()) end_stage();

  if (log.flush_iteration) {
    if (*log.flush_iteration != iters.back()) {
      throw ValidationError("flush record does not target the final trajectory iteration");
    }
    final_flush(canvas, trajectory.last(), sink);
  }
  return canvas;
}

/// Convenience overload collecting every replayed frame.
inline std::vector<Latent> replay_frames(const StrokeLog& log, const LatentTrajectory& trajectory) {
  FrameCollector collector;
  replay(log, trajectory, &collector);
  return std::move(collector.frames);
}

}  // namespace latent_painter
