#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "latent_painter/core.hpp"
#include "latent_painter/frame_sink.hpp"
#include "latent_painter/npy.hpp"

namespace latent_painter {

/// Axis order of a trajectory file. Internally everything is channel-major.
enum class Layout { tchw, thwc };

inline Layout parse_layout(std::string_view s) {
  if (s == "tchw") return Layout::tchw;
  if (s == "thwc") return Layout::thwc;
  throw InvalidArgument("unknown layout '" + std::string(s) + "'");
}

/// Reads a rank-4 float32 NPY trajectory; iteration indices are 0..T-1.
inline LatentTrajectory read_trajectory(const std::filesystem::path& path, Layout layout = Layout::tchw) {
  npy::Array arr = npy::read(path);
  if (arr.shape.size() != 4) {
    throw ValidationError("trajectory must be rank 4, got rank " + std::to_string(arr.shape.size()));
  }
  for (std::size_t d : arr.shape) {
    if (d == 0 || d > std::size_t(std::numeric_limits<int>::max())) {
      throw ValidationError("trajectory dimensions must be positive");
    }
  }
  for (float v : arr.data) {
    if (!std::isfinite(v)) throw ValidationError("trajectory contains NaN or Inf");
  }
  const int t_count = int(arr.shape[0]);
  Shape shape = layout == Layout::tchw ? Shape{int(arr.shape[1]), int(arr.shape[2]), int(arr.shape[3])}
                                       : Shape{int(arr.shape[3]), int(arr.shape[1]), int(arr.shape[2])};
  std::vector<Latent> snaps;
  snaps.reserve(std::size_t(t_count));
  const std::size_t per = shape.size();
  for (int t = 0; t < t_count; ++t) {
    const float* src = arr.data.data() + std::size_t(t) * per;
    if (layout == Layout::tchw) {
      snaps.emplace_back(shape, std::vector<float>(src, src + per));
      continue;
    }
    Latent z(shape);
    for (int y = 0; y < shape.height; ++y) {
      for (int x = 0; x < shape.width; ++x) {
        for (int c = 0; c < shape.channels; ++c) {
          z.at(c, x, y) = src[(std::size_t(y) * std::size_t(shape.width) + std::size_t(x)) * std::size_t(shape.channels) +
                              std::size_t(c)];
        }
      }
    }
    snaps.push_back(std::move(z));
  }
  return make_trajectory(std::move(snaps));
}

inline void write_latents(const std::filesystem::path& path, const std::vector<Latent>& latents) {
  if (latents.empty()) throw InvalidArgument("nothing to write: empty latent list");
  const Shape s = latents.front().shape();
  std::vector<float> data;
  data.reserve(latents.size() * s.size());
  for (const auto& z : latents) {
    if (z.shape() != s) throw InvalidArgument("latents differ in shape");
    data.insert(data.end(), z.values().begin(), z.values().end());
  }
  const std::vector<std::size_t> shape{latents.size(), std::size_t(s.channels), std::size_t(s.height),
                                       std::size_t(s.width)};
  npy::write(path, shape, data);
}

inline void write_trajectory(const std::filesystem::path& path, const LatentTrajectory& traj) {
  write_latents(path, traj.snapshots);
}

/// Reads an (F, C, H, W) frame stack.
inline std::vector<Latent> read_frames(const std::filesystem::path& path) {
  return read_trajectory(path).snapshots;
}

// ---------------------------------------------------------------------------
// PGM inspection output

struct ChannelRange {
  float min = std::numeric_limits<float>::infinity();
  float max = -std::numeric_limits<float>::infinity();
};

/// Maps v into 0..255 over [lo, hi]; a zero-width range maps everything to 128.
inline std::uint8_t to_gray(float v, const ChannelRange& r) {
  if (!(r.max > r.min)) return 128;
  const double t = (double(v) - double(r.min)) / (double(r.max) - double(r.min));
  return std::uint8_t(std::clamp<long>(std::lround(t * 255.0), 0, 255));
}

inline void write_pgm(const std::filesystem::path& path, int width, int height, std::span<const std::uint8_t> pixels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), std::streamsize(pixels.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline std::string pgm_name(std::size_t frame, int channel) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "frame_%06zu_c%d.pgm", frame, channel);
  return buf;
}

/// One grayscale PGM per channel per frame, normalized per channel over the whole
/// animation. The ranges go to normalization.txt next to the images.
inline void write_channel_pgms(const std::filesystem::path& dir, const std::vector<Latent>& frames) {
  if (frames.empty()) throw InvalidArgument("nothing to write: empty frame list");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  const Shape s = frames.front().shape();
  std::vector<ChannelRange> ranges(std::size_t(s.channels));
  for (const auto& f : frames) {
    for (int c = 0; c < s.channels; ++c) {
      for (float v : f.channel(c)) {
        ranges[std::size_t(c)].min = std::min(ranges[std::size_t(c)].min, v);
        ranges[std::size_t(c)].max = std::max(ranges[std::size_t(c)].max, v);
      }
    }
  }
  {
    std::ofstream side(dir / "normalization.txt", std::ios::trunc);
    if (!side) throw IoError("cannot write normalization sidecar in '" + dir.string() + "'");
    side << "# channel min max (gray = round(255 * (v - min) / (max - min)); 128 when max == min)\n";
    for (int c = 0; c < s.channels; ++c) {
      char line[96];
      std::snprintf(line, sizeof line, "%d %.9g %.9g\n", c, double(ranges[std::size_t(c)].min),
                    double(ranges[std::size_t(c)].max));
      side << line;
    }
  }
  std::vector<std::uint8_t> pixels(s.plane());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (int c = 0; c < s.channels; ++c) {
      const auto plane = frames[f].channel(c);
      for (std::size_t i = 0; i < plane.size(); ++i) pixels[i] = to_gray(plane[i], ranges[std::size_t(c)]);
      write_pgm(dir / pgm_name(f, c), s.width, s.height, pixels);
    }
  }
}

/// Writes frames as an (F, C, H, W) NPY and optionally per-channel PGMs.
inline void write_frames(const std::vector<Latent>& frames, const std::filesystem::path& path,
                         const std::optional<std::filesystem::path>& pgm_dir = std::nullopt) {
  write_latents(path, frames);
  if (pgm_dir) write_channel_pgms(*pgm_dir, frames);
}

/// Stacks cumulative heatmaps as an (S, H, W) float32 NPY.
inline void write_heatmaps(const std::filesystem::path& path, const std::vector<Field<std::uint32_t>>& maps) {
  if (maps.empty()) throw InvalidArgument("nothing to write: empty heatmap list");
  const int h = maps.front().height();
  const int w = maps.front().width();
  std::vector<float> data;
  data.reserve(maps.size() * maps.front().size());
  for (const auto& m : maps) {
    for (auto v : m.values()) data.push_back(float(v));
  }
  const std::vector<std::size_t> shape{maps.size(), std::size_t(h), std::size_t(w)};
  npy::write(path, shape, data);
}

/// Heatmap as an 8-bit PGM scaled so the hottest cell is white.
inline void write_heatmap_pgm(const std::filesystem::path& path, const Field<std::uint32_t>& map) {
  std::uint32_t peak = 0;
  for (auto v : map.values()) peak = std::max(peak, v);
  std::vector<std::uint8_t> pixels(map.size(), 0);
  if (peak > 0) {
    for (std::size_t i = 0; i < map.size(); ++i) {
      pixels[i] = std::uint8_t(std::lround(255.0 * double(map.values()[i]) / double(peak)));
    }
  }
  write_pgm(path, map.width(), map.height(), pixels);
}

/// Streams frames straight into an NPY file so long animations never sit in memory.
class NpyFrameSink : public FrameSink {
 public:
  NpyFrameSink(const std::filesystem::path& path, const Shape& shape)
      : writer_(path, {std::size_t(shape.channels), std::size_t(shape.height), std::size_t(shape.width)}) {}

  void on_frame(const Canvas& canvas) override { writer_.append(canvas.z.values()); }
  void close() { writer_.close(); }
  [[nodiscard]] std::size_t count() const { return writer_.count(); }

 private:
  npy::StreamWriter writer_;
};

/// Per-channel PGMs for a frame stack already on disk; reads it twice (range, then pixels)
/// one frame at a time.
inline void write_channel_pgms_from_npy(const std::filesystem::path& npy_path, const std::filesystem::path& dir) {
  auto open = [&](npy::Header& h) {
    std::ifstream in(npy_path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + npy_path.string() + "' for reading");
    h = npy::read_header(in);
    if (h.shape.size() != 4) throw ValidationError("frame stack must be rank 4");
    return in;
  };
  npy::Header h;
  auto in = open(h);
  const Shape s{int(h.shape[1]), int(h.shape[2]), int(h.shape[3])};
  const std::size_t frames = h.shape[0];
  if (frames == 0) throw ValidationError("frame stack is empty");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  std::vector<float> buf(s.size());
  std::vector<ChannelRange> ranges(std::size_t(s.channels));
  for (std::size_t f = 0; f < frames; ++f) {
    if (!in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size() * sizeof(float)))) {
      throw FormatError("frame stack payload truncated");
    }
    for (int c = 0; c < s.channels; ++c) {
      for (std::size_t i = 0; i < s.plane(); ++i) {
        const float v = buf[std::size_t(c) * s.plane() + i];
        ranges[std::size_t(c)].min = std::min(ranges[std::size_t(c)].min, v);
        ranges[std::size_t(c)].max = std::max(ranges[std::size_t(c)].max, v);
      }
    }
  }
  {
    std::ofstream side(dir / "normalization.txt", std::ios::trunc);
    if (!side) throw IoError("cannot write normalization sidecar in '" + dir.string() + "'");
    side << "# channel min max (gray = round(255 * (v - min) / (max - min)); 128 when max == min)\n";
    for (int c = 0; c < s.channels; ++c) {
      char line[96];
      std::snprintf(line, sizeof line, "%d %.9g %.9g\n", c, double(ranges[std::size_t(c)].min),
                    double(ranges[std::size_t(c)].max));
      side << line;
    }
  }
  in = open(h);
  std::vector<std::uint8_t> pixels(s.plane());
  for (std::size_t f = 0; f < frames; ++f) {
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size() * sizeof(float)));
    for (int c = 0; c < s.channels; ++c) {
      for (std::size_t i = 0; i < s.plane(); ++i) {
        pixels[i] = to_gray(buf[std::size_t(c) * s.plane() + i], ranges[std::size_t(c)]);
      }
      write_pgm(dir / pgm_name(f, c), s.width, s.height, pixels);
    }
  }
}

}  // namespace latent_painter
