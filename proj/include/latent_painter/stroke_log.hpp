#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "latent_painter/core.hpp"

namespace latent_painter {

inline constexpr const char* kStrokeLogFormat = "latent-painter/stroke-log";

using ojson = nlohmann::ordered_json;

inline ojson config_to_json(const PainterConfig& c) {
  ojson j;
  j["theta"] = c.theta;
  j["rho"] = c.rho;
  j["radius"] = c.radius;
  j["sigma"] = c.sigma;
  j["epsilon"] = c.epsilon;
  j["cost_mode"] = std::string(to_string(c.cost_mode));
  j["stroke_cap"] = c.stroke_cap ? ojson(*c.stroke_cap) : ojson(nullptr);
  j["strokes_per_frame"] = c.strokes_per_frame;
  j["final_flush"] = c.final_flush;
  j["seed"] = c.seed;
  j["effect"] = std::string(to_string(c.effect));
  const auto& p = c.effect_params;
  j["frames_per_iteration"] = p.frames_per_iteration ? ojson(*p.frames_per_iteration) : ojson(nullptr);
  j["dissolve_mode"] = std::string(to_string(p.dissolve_mode));
  j["chunk_size"] = p.chunk_size;
  j["effect_seed"] = p.seed;
  return j;
}

inline PainterConfig config_from_json(const ojson& j) {
  PainterConfig c;
  c.theta = j.at("theta").get<double>();
  c.rho = j.at("rho").get<double>();
  c.radius = j.at("radius").get<int>();
  c.sigma = j.at("sigma").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.cost_mode = parse_cost_mode(j.at("cost_mode").get<std::string>());
  if (!j.at("stroke_cap").is_null()) c.stroke_cap = j.at("stroke_cap").get<int>();
  c.strokes_per_frame = j.at("strokes_per_frame").get<int>();
  c.final_flush = j.at("final_flush").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.effect = parse_effect(j.at("effect").get<std::string>());
  if (!j.at("frames_per_iteration").is_null()) {
    c.effect_params.frames_per_iteration = j.at("frames_per_iteration").get<int>();
  }
  c.effect_params.dissolve_mode = parse_dissolve_mode(j.at("dissolve_mode").get<std::string>());
  c.effect_params.chunk_size = j.at("chunk_size").get<int>();
  c.effect_params.seed = j.at("effect_seed").get<std::uint64_t>();
  return c;
}

/// JSON Lines: a header object, one object per stroke, then the flush record if any.
inline void write_stroke_log(const StrokeLog& log, std::ostream& out) {
  ojson header;
  header["format"] = kStrokeLogFormat;
  header["version"] = StrokeLog::kFormatVersion;
  header["shape"] = {log.shape.channels, log.shape.height, log.shape.width};
  header["config"] = config_to_json(log.config);
  out << header.dump() << '\n';
  for (const auto& e : log.events) {
    ojson j;
    j["frame"] = e.frame_index;
    j["iter"] = e.iteration;
    j["channel"] = e.channel;
    j["x"] = e.center_x;
    j["y"] = e.center_y;
    j["radius"] = e.radius;
    out << j.dump() << '\n';
  }
  if (log.flush_iteration) {
    ojson j;
    j["flush"] = true;
    j["iter"] = *log.flush_iteration;
    out << j.dump() << '\n';
  }
}

inline void write_stroke_log(const StrokeLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_stroke_log(log, out);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

/// Parses and validates a stroke log: bounds against the header shape, frame indices
/// non-decreasing (strictly increasing at one stroke per frame), iterations non-decreasing.
inline StrokeLog read_stroke_log(std::istream& in) {
  StrokeLog log;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> ValidationError {
    return ValidationError("stroke log line " + std::to_string(line_no) + ": " + what);
  };
  auto parse = [&](const std::string& text) {
    try {
      return ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("stroke log line " + std::to_string(line_no) + ": " + e.what());
    }
  };

  if (!std::getline(in, line)) throw FormatError("stroke log is empty");
  ++line_no;
  try {
    const ojson header = parse(line);
    if (header.value("format", "") != kStrokeLogFormat) throw fail("not a stroke log header");
    if (header.at("version").get<int>() != StrokeLog::kFormatVersion) {
      throw fail("unsupported stroke log version " + header.at("version").dump());
    }
    const auto& shape = header.at("shape");
    if (!shape.is_array() || shape.size() != 3) throw fail("shape must be [C, H, W]");
    log.shape = {shape[0].get<int>(), shape[1].get<int>(), shape[2].get<int>()};
    if (log.shape.channels < 1 || log.shape.height < 1 || log.shape.width < 1) throw fail("non-positive shape");
    log.config = config_from_json(header.at("config"));
    validate(log.config);
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("bad header: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw fail(std::string("bad header config: ") + e.what());
  }

  const bool strict_frames = log.config.strokes_per_frame == 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (log.flush_iteration) throw fail("records after the flush record");
    const ojson j = parse(line);
    try {
      if (j.contains("flush")) {
        log.flush_iteration = j.at("iter").get<int>();
        continue;
      }
      StrokeEvent e;
      e.frame_index = j.at("frame").get<std::int64_t>();
      e.iteration = j.at("iter").get<int>();
      e.channel = j.at("channel").get<int>();
      e.center_x = j.at("x").get<int>();
      e.center_y = j.at("y").get<int>();
      e.radius = j.at("radius").get<int>();
      if (!log.shape.contains(e.channel, e.center_x, e.center_y)) throw fail("stroke out of canvas bounds");
      if (e.radius < 0) throw fail("negative radius");
      if (e.frame_index < 0) throw fail("negative frame index");
      if (!log.events.empty()) {
        const auto& prev = log.events.back();
        if (e.frame_index < prev.frame_index || (strict_frames && e.frame_index == prev.frame_index)) {
          throw fail("frame indices not monotone");
        }
        if (e.iteration < prev.iteration) throw fail("iterations not monotone");
      }
      log.events.push_back(e);
    } catch (const nlohmann::json::exception& e) {
      throw fail(std::string("bad record: ") + e.what());
    }
  }
  return log;
}

inline StrokeLog read_stroke_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_stroke_log(in);
}

}  // namespace latent_painter
