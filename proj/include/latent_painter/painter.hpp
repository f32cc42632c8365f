#pragma once

#include <vector>

#include "latent_painter/core.hpp"
#include "latent_painter/effects.hpp"
#include "latent_painter/frame_sink.hpp"
#include "latent_painter/random.hpp"
#include "latent_painter/stroke_engine.hpp"

namespace latent_painter {

namespace detail {

inline void apply_plan(Canvas& canvas, const Latent& snapshot, const ReleasePlan& plan, FrameSink* sink) {
  for (const auto& group : plan.frames) {
    release_coords(canvas, snapshot, group);
    emit_frame(canvas, sink);
  }
}

inline ReleasePlan plan_for(const Canvas& canvas, const Latent& snapshot, const PainterConfig& config,
                            std::size_t step) {
  const int k = config.effect_params.frames_per_iteration.value_or(EffectParams::kDefaultFrames);
  switch (config.effect) {
    case Effect::glow:
      return glow_plan(canvas, snapshot, config.theta, config.effect_params);
    case Effect::dissolve: {
      EffectParams params = config.effect_params;
      params.seed = mix_seed(config.seed, step);
      return dissolve_plan(canvas, snapshot, config.theta, params);
    }
    case Effect::flip:
      return flip_plan(canvas, snapshot, k);
    case Effect::passthrough:
      return passthrough_plan(snapshot);
    case Effect::fade:
    case Effect::strokes:
      break;
  }
  throw InvalidArgument("effect has no release plan");
}

}  // namespace detail

/// Paints a trajectory with the configured effect. Strokes go through the full
/// stroke engine; every other effect releases one plan per iteration. Frames stream
/// into sink; the returned log only carries events for the stroke effect.
inline PaintResult paint(const LatentTrajectory& trajectory, const PainterConfig& config, FrameSink* sink = nullptr) {
  if (config.effect == Effect::strokes) return paint_trajectory(trajectory, config, sink);

  validate(trajectory);
  validate(config);
  PaintResult result;
  result.canvas = canvas_new(trajectory.shape());
  result.log.shape = trajectory.shape();
  result.log.config = config;
  Canvas& canvas = result.canvas;

  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const Latent& snapshot = trajectory.snapshots[t];
    IterationReport report;
    report.iteration = trajectory.iteration_indices[t];
    report.start_gap = l1_gap(canvas, snapshot);
    if (config.effect == Effect::fade) {
      const int k = config.effect_params.frames_per_iteration.value_or(EffectParams::kDefaultFrames);
      auto frames = fade_plan(canvas, snapshot, k);
      for (auto& f : frames) {
        canvas.z = std::move(f);
        emit_frame(canvas, sink);
      }
      for (auto& h : canvas.heatmap.values()) h += std::uint32_t(canvas.shape().channels);
      report.qualified = true;
    } else {
      const ReleasePlan plan = detail::plan_for(canvas, snapshot, config, t);
      report.qualified = !plan.frames.empty();
      detail::apply_plan(canvas, snapshot, plan, sink);
    }
    report.residual_gap = l1_gap(canvas, snapshot);
    if (sink != nullptr) sink->on_stage_end(canvas);
    result.reports.push_back(std::move(report));
  }

  if (config.final_flush) {
    final_flush(canvas, trajectory.last(), sink);
    result.log.flush_iteration = trajectory.iteration_indices.back();
  }
  return result;
}

}  // namespace latent_painter
