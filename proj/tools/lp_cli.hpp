#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "latent_painter/latent_painter.hpp"

namespace lp_cli {

namespace lp = latent_painter;
namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kIoError = 1, kUsage = 2 };

struct PaintOptions {
  lp::PainterConfig config;
  std::string effect = "strokes";
  std::string cost_mode = "near";
  std::string dissolve_mode = "random";
  int stroke_cap = 0;
  int frames_per_iter = 0;
  bool no_flush = false;
  std::string out_frames = "frames.npy";
  std::string out_log;
  std::string out_heatmap;
  std::string pgm_dir;

  [[nodiscard]] lp::PainterConfig resolved() const {
    lp::PainterConfig c = config;
    c.effect = lp::parse_effect(effect);
    c.cost_mode = lp::parse_cost_mode(cost_mode);
    c.effect_params.dissolve_mode = lp::parse_dissolve_mode(dissolve_mode);
    if (stroke_cap > 0) c.stroke_cap = stroke_cap;
    if (frames_per_iter > 0) c.effect_params.frames_per_iteration = frames_per_iter;
    c.final_flush = !no_flush;
    lp::validate(c);
    return c;
  }
};

inline void add_painter_flags(CLI::App* app, PaintOptions& o) {
  auto& c = o.config;
  app->add_option("--effect", o.effect, "Release effect")
      ->check(CLI::IsMember({"strokes", "glow", "dissolve", "fade", "flip", "passthrough"}))
      ->capture_default_str();
  app->add_option("--theta", c.theta, "Stroke threshold on |Z - D|")->capture_default_str();
  app->add_option("--rho", c.rho, "Policy portion of the largest gap seen")->capture_default_str();
  app->add_option("--radius", c.radius, "Brush half-side in latent pixels")->capture_default_str();
  app->add_option("--sigma", c.sigma, "Move-cost Gaussian width")->capture_default_str();
  app->add_option("--epsilon", c.epsilon, "Move-cost floor")->capture_default_str();
  app->add_option("--cost-mode", o.cost_mode, "Move-cost shape")
      ->check(CLI::IsMember({"near", "far", "off"}))
      ->capture_default_str();
  app->add_option("--stroke-cap", o.stroke_cap, "Max strokes per channel pass (0 = none)")->capture_default_str();
  app->add_option("--strokes-per-frame", c.strokes_per_frame, "Strokes grouped into one frame")
      ->capture_default_str();
  app->add_option("--frames-per-iter", o.frames_per_iter,
                  "Frames per iteration for effects (0 = chunked / default)")
      ->capture_default_str();
  app->add_option("--dissolve-mode", o.dissolve_mode, "Dissolve ordering")
      ->check(CLI::IsMember({"random", "content", "vertical"}))
      ->capture_default_str();
  app->add_option("--chunk-size", c.effect_params.chunk_size, "Pixels per frame when --frames-per-iter is 0")
      ->capture_default_str();
  app->add_option("--seed", c.seed, "Seed for randomized effects")->capture_default_str();
  app->add_option("--threads", c.threads, "Worker threads (output does not depend on it)")->capture_default_str();
  app->add_flag("--no-flush", o.no_flush, "Skip the terminal flush to the last snapshot");
  app->add_option("--out-frames", o.out_frames, "Frame stack output (F,C,H,W) .npy")->capture_default_str();
  app->add_option("--out-log", o.out_log, "Stroke log output (.jsonl)");
  app->add_option("--out-heatmap", o.out_heatmap, "Cumulative heatmaps (S,H,W) .npy; a .pgm of the last is written too");
  app->add_option("--pgm-dir", o.pgm_dir, "Directory for per-channel grayscale PGM frames");
}

/// Keeps only the stage-end heatmaps.
class HeatmapSink : public lp::FrameSink {
 public:
  void on_frame(const lp::Canvas&) override {}
  void on_stage_end(const lp::Canvas& canvas) override { maps.push_back(canvas.heatmap); }
  std::vector<lp::Field<std::uint32_t>> maps;
};

inline std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("lp", sink);
  logger->set_pattern("[%l] %v");
  const char* env = std::getenv("LP_LOG_LEVEL");
  const std::string level = env != nullptr ? env : "warn";
  if (level == "error") {
    logger->set_level(spdlog::level::err);
  } else if (level == "info") {
    logger->set_level(spdlog::level::info);
  } else if (level == "debug") {
    logger->set_level(spdlog::level::debug);
  } else {
    logger->set_level(spdlog::level::warn);
  }
  return logger;
}

/// Paints a trajectory and writes every requested artifact.
inline lp::PaintResult paint_to_files(const lp::LatentTrajectory& traj, const PaintOptions& o, std::ostream& out,
                                      spdlog::logger& log) {
  const lp::PainterConfig cfg = o.resolved();
  log.info("painting {} snapshots of {} with effect {}", traj.size(), lp::to_string(traj.shape()),
           std::string(lp::to_string(cfg.effect)));
  lp::NpyFrameSink frames(o.out_frames, traj.shape());
  HeatmapSink heat;
  lp::TeeSink tee({&frames, &heat});
  lp::PaintResult result = lp::paint(traj, cfg, &tee);
  frames.close();
  log.info("wrote {} frames to {}", frames.count(), o.out_frames);

  if (!o.out_log.empty()) lp::write_stroke_log(result.log, fs::path(o.out_log));
  if (!o.out_heatmap.empty()) {
    lp::write_heatmaps(o.out_heatmap, heat.maps);
    fs::path pgm = o.out_heatmap;
    pgm.replace_extension(".pgm");
    lp::write_heatmap_pgm(pgm, heat.maps.back());
  }
  if (!o.pgm_dir.empty()) lp::write_channel_pgms_from_npy(o.out_frames, o.pgm_dir);

  std::size_t strokes = 0;
  for (const auto& r : result.reports) strokes += r.strokes.size();
  out << "frames: " << frames.count() << "\n";
  if (cfg.effect == lp::Effect::strokes) out << "strokes: " << strokes << "\n";
  out << "iter  qualified  strokes  start_gap  residual_gap\n";
  for (const auto& r : result.reports) {
    char line[128];
    std::snprintf(line, sizeof line, "%4d  %9s  %7zu  %9.4f  %12.4f\n", r.iteration, r.qualified ? "yes" : "no",
                  r.strokes.size(), r.start_gap, r.residual_gap);
    out << line;
  }
  return result;
}

inline void inspect(const lp::LatentTrajectory& traj, double rho, double theta, std::ostream& out) {
  const lp::Shape s = traj.shape();
  out << "T=" << traj.size() << " C=" << s.channels << " H=" << s.height << " W=" << s.width << "\n";
  out << "preview assumes every iteration is fully released before the next\n";
  out << "iter  l1_gap      cells>theta  qualifies\n";
  lp::Canvas canvas = lp::canvas_new(s);
  double max_gap = 0.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const lp::Latent& d = traj.snapshots[t];
    const double gap = lp::l1_gap(canvas, d);
    const bool q = gap > rho * max_gap;
    if (q) max_gap = std::max(max_gap, gap);
    const std::size_t above = lp::differing_coords(canvas, d, theta).size();
    char line[128];
    std::snprintf(line, sizeof line, "%4d  %10.4f  %11zu  %s\n", traj.iteration_indices[t], gap, above,
                  q ? "yes" : "no");
    out << line;
    canvas.z = d;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"lp - latent painting animation engine"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; command-line flags override it");
  app.get_config_ptr()->configurable(false);
  app.set_version_flag("--version", "lp 1.0");

  PaintOptions paint_opts;
  std::string paint_traj;
  std::string layout = "tchw";
  auto* paint = app.add_subcommand("paint", "Paint a trajectory into frames");
  paint->add_option("trajectory", paint_traj, "Trajectory .npy (T,C,H,W)")->required();
  paint->add_option("--layout", layout, "Trajectory axis order")
      ->check(CLI::IsMember({"tchw", "thwc"}))
      ->capture_default_str();
  add_painter_flags(paint, paint_opts);

  PaintOptions trans_opts;
  std::string src_path;
  std::string dst_path;
  std::string mode = "schedules";
  std::string interp = "linear";
  int steps = 30;
  auto* trans = app.add_subcommand("transition", "Animate from one generation to another");
  trans->add_option("--src", src_path, "Source trajectory .npy")->required();
  trans->add_option("--dst", dst_path, "Destination trajectory .npy")->required();
  trans->add_option("--mode", mode, "schedules: source backward then destination forward; interp: interpolated finals")
      ->check(CLI::IsMember({"schedules", "interp"}))
      ->capture_default_str();
  trans->add_option("--steps", steps, "Interpolation snapshots (interp mode)")->capture_default_str();
  trans->add_option("--interp", interp, "Interpolation kind")
      ->check(CLI::IsMember({"linear", "slerp"}))
      ->capture_default_str();
  trans->add_option("--layout", layout, "Trajectory axis order")
      ->check(CLI::IsMember({"tchw", "thwc"}))
      ->capture_default_str();
  add_painter_flags(trans, trans_opts);

  std::string log_path;
  std::string replay_traj;
  std::string replay_frames = "frames.npy";
  std::string replay_heatmap;
  std::string replay_pgm;
  auto* rep = app.add_subcommand("replay", "Rebuild frames from a stroke log");
  rep->add_option("--log", log_path, "Stroke log .jsonl")->required();
  rep->add_option("--traj", replay_traj, "Trajectory the log was painted from")->required();
  rep->add_option("--layout", layout, "Trajectory axis order")
      ->check(CLI::IsMember({"tchw", "thwc"}))
      ->capture_default_str();
  rep->add_option("--out-frames", replay_frames, "Frame stack output .npy")->capture_default_str();
  rep->add_option("--out-heatmap", replay_heatmap, "Cumulative heatmaps .npy");
  rep->add_option("--pgm-dir", replay_pgm, "Directory for per-channel PGM frames");

  std::string inspect_traj;
  double inspect_rho = lp::PainterConfig{}.rho;
  double inspect_theta = lp::PainterConfig{}.theta;
  auto* insp = app.add_subcommand("inspect", "Print trajectory shape, gaps and a qualification preview");
  insp->add_option("trajectory", inspect_traj, "Trajectory .npy")->required();
  insp->add_option("--layout", layout, "Trajectory axis order")
      ->check(CLI::IsMember({"tchw", "thwc"}))
      ->capture_default_str();
  insp->add_option("--rho", inspect_rho, "Policy portion")->capture_default_str();
  insp->add_option("--theta", inspect_theta, "Stroke threshold")->capture_default_str();

  std::string synth_out;
  int synth_steps = 12;
  lp::Shape synth_shape{4, 64, 64};
  std::uint64_t synth_seed = 2024;
  lp::SyntheticOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Write a synthetic converging trajectory");
  synth->add_option("--out", synth_out, "Output .npy")->required();
  synth->add_option("--steps", synth_steps, "Snapshots")->capture_default_str();
  synth->add_option("--channels", synth_shape.channels, "Channels")->capture_default_str();
  synth->add_option("--height", synth_shape.height, "Height")->capture_default_str();
  synth->add_option("--width", synth_shape.width, "Width")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Seed")->capture_default_str();
  synth->add_option("--initial-error", synth_opts.initial_error, "Error amplitude at step 0")->capture_default_str();
  synth->add_option("--decay", synth_opts.decay, "Per-step error decay factor")->capture_default_str();
  synth->add_option("--jitter", synth_opts.jitter, "Fresh per-step noise relative to the error")
      ->capture_default_str();
  synth->add_option("--correlation", synth_opts.correlation, "Texture correlation length")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  auto log = make_logger(err);
  try {
    const lp::Layout lay = lp::parse_layout(layout);
    if (*paint) {
      paint_to_files(lp::read_trajectory(paint_traj, lay), paint_opts, out, *log);
    } else if (*trans) {
      const auto src = lp::read_trajectory(src_path, lay);
      const auto dst = lp::read_trajectory(dst_path, lay);
      const auto traj = mode == "schedules"
                            ? lp::build_transition_trajectory(src, dst)
                            : lp::interpolate_latents(src.last(), dst.last(), steps,
                                                      interp == "slerp" ? lp::Interpolation::spherical
                                                                        : lp::Interpolation::linear);
      out << "transition trajectory: " << traj.size() << " snapshots\n";
      paint_to_files(traj, trans_opts, out, *log);
    } else if (*rep) {
      const auto traj = lp::read_trajectory(replay_traj, lay);
      const auto slog = lp::read_stroke_log(fs::path(log_path));
      lp::NpyFrameSink frames(replay_frames, traj.shape());
      HeatmapSink heat;
      lp::TeeSink tee({&frames, &heat});
      lp::replay(slog, traj, &tee);
      frames.close();
      if (!replay_heatmap.empty()) lp::write_heatmaps(replay_heatmap, heat.maps);
      if (!replay_pgm.empty()) lp::write_channel_pgms_from_npy(replay_frames, replay_pgm);
      out << "frames: " << frames.count() << "\n";
    } else if (*insp) {
      out << "trajectory: " << inspect_traj << "\n";
      inspect(lp::read_trajectory(inspect_traj, lay), inspect_rho, inspect_theta, out);
    } else if (*synth) {
      const auto traj = lp::make_converging_trajectory(synth_shape, synth_steps, synth_seed, synth_opts);
      lp::write_trajectory(synth_out, traj);
      out << "wrote " << traj.size() << "x" << lp::to_string(synth_shape) << " trajectory to " << synth_out << "\n";
    }
  } catch (const lp::IoError& e) {
    log->error("{}", e.what());
    return kIoError;
  } catch (const lp::ValidationError& e) {
    log->error("{}", e.what());
    return kUsage;
  } catch (const lp::InvalidArgument& e) {
    log->error("{}", e.what());
    return kUsage;
  } catch (const lp::PreconditionViolation& e) {
    log->error("{}", e.what());
    return kUsage;
  } catch (const lp::NoCenterError& e) {
    log->error("{}", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    log->error("{}", e.what());
    return kIoError;
  }
  return kOk;
}

}  // namespace lp_cli
