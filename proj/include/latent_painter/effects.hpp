#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "latent_painter/core.hpp"
#include "latent_painter/random.hpp"

namespace latent_painter {

/// Group sizes for splitting n items into k near-equal consecutive groups: the
/// first n mod k groups get one extra item. Zero-size groups are dropped.
inline std::vector<std::size_t> near_equal_partition(std::size_t n, std::size_t k) {
  if (k == 0) throw InvalidArgument("partition needs at least one group");
  std::vector<std::size_t> sizes;
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    if (len > 0) sizes.push_back(len);
  }
  return sizes;
}

struct MassCenter {
  double x = 0.0;
  double y = 0.0;
};

/// Centroid of the per-pixel gap Σ_c |Z − D_t|.
inline MassCenter mass_center(const Canvas& canvas, const Latent& snapshot) {
  detail::require_same_shape(canvas, snapshot);
  const Shape& s = canvas.shape();
  double total = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      double wgt = 0.0;
      for (int c = 0; c < s.channels; ++c) wgt += double(std::fabs(canvas.z.at(c, x, y) - snapshot.at(c, x, y)));
      total += wgt;
      sx += wgt * double(x);
      sy += wgt * double(y);
    }
  }
  if (!(total > 0.0)) throw NoCenterError("canvas already matches snapshot; no mass center");
  return {sx / total, sy / total};
}

namespace detail {

struct Pixel {
  int x = 0;
  int y = 0;
};

/// Pixels where any channel differs by more than theta, row-major.
inline std::vector<Pixel> qualifying_pixels(const Canvas& canvas, const Latent& snapshot, double theta) {
  require_same_shape(canvas, snapshot);
  const Shape& s = canvas.shape();
  std::vector<Pixel> out;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      for (int c = 0; c < s.channels; ++c) {
        if (double(std::fabs(canvas.z.at(c, x, y) - snapshot.at(c, x, y))) > theta) {
          out.push_back({x, y});
          break;
        }
      }
    }
  }
  return out;
}

inline std::vector<Coord> all_channels(const Pixel& p, int channels) {
  std::vector<Coord> out;
  out.reserve(std::size_t(channels));
  for (int c = 0; c < channels; ++c) out.push_back({c, p.x, p.y});
  return out;
}

/// Splits ordered pixels into frames: K near-equal groups when K is set, else
/// chunk_size pixels per frame. Each pixel contributes all of its channels.
inline ReleasePlan group_pixels(const std::vector<Pixel>& ordered, int channels, const EffectParams& params) {
  ReleasePlan plan;
  std::vector<std::size_t> sizes;
  if (params.frames_per_iteration) {
    sizes = near_equal_partition(ordered.size(), std::size_t(*params.frames_per_iteration));
  } else {
    const std::size_t chunk = std::size_t(params.chunk_size);
    for (std::size_t done = 0; done < ordered.size(); done += chunk) {
      sizes.push_back(std::min(chunk, ordered.size() - done));
    }
  }
  std::size_t pos = 0;
  for (std::size_t len : sizes) {
    std::vector<Coord> group;
    group.reserve(len * std::size_t(channels));
    for (std::size_t i = pos; i < pos + len; ++i) {
      auto px = all_channels(ordered[i], channels);
      group.insert(group.end(), px.begin(), px.end());
    }
    plan.frames.push_back(std::move(group));
    pos += len;
  }
  return plan;
}

inline void check_params(const EffectParams& params) {
  if (params.frames_per_iteration && *params.frames_per_iteration < 1) {
    throw InvalidArgument("frames per iteration must be positive");
  }
  if (params.chunk_size < 1) throw InvalidArgument("chunk size must be positive");
}

}  // namespace detail

/// Glow: qualifying pixels radiate outward from the gap's mass center.
inline ReleasePlan glow_plan(const Canvas& canvas, const Latent& snapshot, double theta, const EffectParams& params) {
  detail::check_params(params);
  auto pixels = detail::qualifying_pixels(canvas, snapshot, theta);
  if (pixels.empty()) return {};
  const MassCenter center = mass_center(canvas, snapshot);
  auto dist2 = [&](const detail::Pixel& p) {
    const double dx = double(p.x) - center.x;
    const double dy = double(p.y) - center.y;
    return dx * dx + dy * dy;
  };
  // Pixels arrive row-major, so a stable sort keeps (y, x) order among equal distances.
  std::stable_sort(pixels.begin(), pixels.end(),
                   [&](const detail::Pixel& a, const detail::Pixel& b) { return dist2(a) < dist2(b); });
  return detail::group_pixels(pixels, canvas.shape().channels, params);
}

/// Dissolve: random (seeded shuffle), content (largest summed gain first) or
/// vertical (top row first, seeded shuffle within a row).
inline ReleasePlan dissolve_plan(const Canvas& canvas, const Latent& snapshot, double theta,
                                 const EffectParams& params) {
  detail::check_params(params);
  auto pixels = detail::qualifying_pixels(canvas, snapshot, theta);
  if (pixels.empty()) return {};
  Rng rng(params.seed);
  switch (params.dissolve_mode) {
    case DissolveMode::random:
      rng.shuffle(std::span(pixels));
      break;
    case DissolveMode::content: {
      const int channels = canvas.shape().channels;
      std::vector<std::pair<double, detail::Pixel>> keyed;
      keyed.reserve(pixels.size());
      for (const auto& p : pixels) {
        double g = 0.0;
        for (int c = 0; c < channels; ++c) g += double(std::fabs(canvas.z.at(c, p.x, p.y) - snapshot.at(c, p.x, p.y)));
        keyed.emplace_back(g, p);
      }
      std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      for (std::size_t i = 0; i < keyed.size(); ++i) pixels[i] = keyed[i].second;
      break;
    }
    case DissolveMode::vertical: {
      // Row-major input: each row is already a contiguous run.
      auto row_begin = pixels.begin();
      while (row_begin != pixels.end()) {
        auto row_end = std::find_if(row_begin, pixels.end(), [&](const auto& p) { return p.y != row_begin->y; });
        rng.shuffle(std::span(row_begin, row_end));
        row_begin = row_end;
      }
      break;
    }
  }
  return detail::group_pixels(pixels, canvas.shape().channels, params);
}

/// Fade: K canvases blending linearly from the current canvas to the snapshot.
/// Values are computed in double and rounded once; the last frame is the snapshot itself.
inline std::vector<Latent> fade_plan(const Canvas& canvas, const Latent& snapshot, int frames) {
  detail::require_same_shape(canvas, snapshot);
  if (frames < 1) throw InvalidArgument("fade needs at least one frame");
  std::vector<Latent> out;
  out.reserve(std::size_t(frames));
  const auto z0 = canvas.z.values();
  const auto d = snapshot.values();
  for (int k = 1; k < frames; ++k) {
    Latent frame(snapshot.shape());
    auto f = frame.values();
    const double s = double(k) / double(frames);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = float(double(z0[i]) + s * (double(d[i]) - double(z0[i])));
    }
    out.push_back(std::move(frame));
  }
  out.push_back(snapshot);
  return out;
}

/// Flip: whole columns released left to right in K near-equal bands.
inline ReleasePlan flip_plan(const Canvas& canvas, const Latent& snapshot, int frames) {
  detail::require_same_shape(canvas, snapshot);
  if (frames < 1) throw InvalidArgument("flip needs at least one frame");
  const Shape& s = canvas.shape();
  ReleasePlan plan;
  int x0 = 0;
  for (std::size_t band : near_equal_partition(std::size_t(s.width), std::size_t(frames))) {
    std::vector<Coord> group;
    group.reserve(band * s.plane() / std::size_t(s.width) * std::size_t(s.channels));
    for (int c = 0; c < s.channels; ++c) {
      for (int y = 0; y < s.height; ++y) {
        for (int x = x0; x < x0 + int(band); ++x) group.push_back({c, x, y});
      }
    }
    plan.frames.push_back(std::move(group));
    x0 += int(band);
  }
  return plan;
}

/// The raw predicted-original animation: every coordinate in a single frame.
inline ReleasePlan passthrough_plan(const Latent& snapshot) {
  const Shape& s = snapshot.shape();
  ReleasePlan plan;
  std::vector<Coord> all;
  all.reserve(s.size());
  for (int c = 0; c < s.channels; ++c) {
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x) all.push_back({c, x, y});
    }
  }
  plan.frames.push_back(std::move(all));
  return plan;
}

}  // namespace latent_painter
