#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <unistd.h>

#include "latent_painter/latent_painter.hpp"

namespace lp_test {

namespace lp = latent_painter;
namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("lp_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                                         std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const fs::path& path() const { return path_; }
  [[nodiscard]] fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), std::streamsize(bytes.size()));
}

/// Builds a 1×h×w latent from row-major rows.
inline lp::Latent plane(const std::vector<std::vector<float>>& rows) {
  const int h = int(rows.size());
  const int w = int(rows.front().size());
  std::vector<float> v;
  for (const auto& r : rows) v.insert(v.end(), r.begin(), r.end());
  return lp::Latent(lp::Shape{1, h, w}, v);
}

inline bool bitwise_equal(const lp::Latent& a, const lp::Latent& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.values().data(), b.values().data(), a.values().size() * sizeof(float)) == 0;
}

/// Random trajectory with a converging flavour: D_t = F + a_t * N_t, a_t shrinking,
/// occasionally a repeated snapshot so gating paths get exercised.
inline lp::LatentTrajectory random_trajectory(lp::Rng& rng, const lp::Shape& shape, int steps) {
  const lp::Latent final_field = lp::random_latent(shape, rng, -1.0, 1.0);
  std::vector<lp::Latent> snaps;
  double a = 0.5 + rng.uniform();
  for (int t = 0; t < steps; ++t) {
    if (t > 0 && rng.below(5) == 0) {
      snaps.push_back(snaps.back());
      continue;
    }
    lp::Latent d = final_field;
    const lp::Latent noise = lp::random_latent(shape, rng, -1.0, 1.0);
    for (std::size_t i = 0; i < d.values().size(); ++i) d.values()[i] += float(a * double(noise.values()[i]));
    snaps.push_back(std::move(d));
    a *= 0.2 + 0.6 * rng.uniform();
  }
  return lp::make_trajectory(std::move(snaps));
}

/// Random but valid stroke configuration.
inline lp::PainterConfig random_config(lp::Rng& rng) {
  lp::PainterConfig c;
  c.theta = 0.02 + 0.3 * rng.uniform();
  c.rho = rng.uniform() * 0.5;
  c.radius = int(rng.below(4));
  c.sigma = 0.5 + 8.0 * rng.uniform();
  c.epsilon = 0.05 + 0.95 * rng.uniform();
  c.cost_mode = lp::CostMode(rng.below(3));
  if (rng.below(3) == 0) c.stroke_cap = 1 + int(rng.below(10));
  c.strokes_per_frame = 1 + int(rng.below(3) == 0 ? rng.below(4) : 0);
  c.final_flush = rng.below(4) != 0;
  return c;
}

}  // namespace lp_test
