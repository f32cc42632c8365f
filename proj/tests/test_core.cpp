#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "support.hpp"

namespace {

using namespace latent_painter;
using lp_test::plane;

TEST(CanvasNew, FourChannelZeros) {
  const Canvas c = canvas_new(4, 64, 64);
  EXPECT_EQ(c.shape(), (Shape{4, 64, 64}));
  for (float v : c.z.values()) EXPECT_EQ(v, 0.0F);
  for (auto h : c.heatmap.values()) EXPECT_EQ(h, 0U);
  EXPECT_EQ(c.frame_counter, 0);
  EXPECT_EQ(c.heatmap.height(), 64);
  EXPECT_EQ(c.heatmap.width(), 64);
}

TEST(CanvasNew, SingleCell) {
  const Canvas c = canvas_new(1, 1, 1);
  ASSERT_EQ(c.z.values().size(), 1U);
  EXPECT_EQ(c.z.values()[0], 0.0F);
}

TEST(CanvasNew, DegenerateRejected) {
  EXPECT_THROW(canvas_new(4, 0, 64), InvalidArgument);
  EXPECT_THROW(canvas_new(0, 1, 1), InvalidArgument);
  EXPECT_THROW(canvas_new(1, 1, -3), InvalidArgument);
}

TEST(ReleaseCoords, SingleCellCopy) {
  Canvas c = canvas_new(1, 2, 2);
  const Latent target(Shape{1, 2, 2}, 1.0F);
  const std::vector<Coord> coords{{0, 0, 0}};
  release_coords(c, target, coords);
  EXPECT_EQ(c.z, plane({{1, 0}, {0, 0}}));
  EXPECT_EQ(c.heatmap(0, 0), 1U);
  EXPECT_EQ(c.heatmap(1, 0), 0U);
}

TEST(ReleaseCoords, EmptyReleaseIsNoop) {
  Canvas c = canvas_new(1, 2, 2);
  const Latent target(Shape{1, 2, 2}, 1.0F);
  release_coords(c, target, {});
  EXPECT_EQ(c.z, Latent(Shape{1, 2, 2}));
  for (auto h : c.heatmap.values()) EXPECT_EQ(h, 0U);
}

TEST(ReleaseCoords, FullRelease) {
  Canvas c = canvas_new(1, 2, 2);
  const Latent target = plane({{1, 2}, {3, 4}});
  const std::vector<Coord> coords{{0, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 1, 1}};
  release_coords(c, target, coords);
  EXPECT_EQ(c.z, target);
  for (auto h : c.heatmap.values()) EXPECT_EQ(h, 1U);
}

TEST(ReleaseCoords, HeatmapCountsAcrossChannels) {
  Canvas c = canvas_new(3, 2, 2);
  const Latent target(Shape{3, 2, 2}, 1.0F);
  const std::vector<Coord> coords{{0, 1, 1}, {1, 1, 1}, {2, 1, 1}};
  release_coords(c, target, coords);
  EXPECT_EQ(c.heatmap(1, 1), 3U);
}

TEST(ReleaseCoords, Errors) {
  Canvas c = canvas_new(1, 2, 2);
  const std::vector<Coord> oob{{0, 2, 0}};
  EXPECT_THROW(release_coords(c, Latent(Shape{1, 2, 2}), oob), InvalidArgument);
  const std::vector<Coord> bad_channel{{1, 0, 0}};
  EXPECT_THROW(release_coords(c, Latent(Shape{1, 2, 2}), bad_channel), InvalidArgument);
  EXPECT_THROW(release_coords(c, Latent(Shape{1, 3, 2}), {}), InvalidArgument);
  // nothing written when any coordinate is invalid
  const std::vector<Coord> mixed{{0, 0, 0}, {0, 5, 5}};
  EXPECT_THROW(release_coords(c, Latent(Shape{1, 2, 2}, 7.0F), mixed), InvalidArgument);
  EXPECT_EQ(c.z.at(0, 0, 0), 0.0F);
  EXPECT_EQ(c.heatmap(0, 0), 0U);
}

TEST(ReleaseCoords, Idempotent) {
  Rng rng(3);
  Canvas c = canvas_new(2, 5, 4);
  const Latent target = random_latent(c.shape(), rng);
  const std::vector<Coord> coords{{0, 1, 2}, {1, 3, 4}, {1, 0, 0}};
  release_coords(c, target, coords);
  const Latent once = c.z;
  release_coords(c, target, coords);
  EXPECT_EQ(c.z, once);
  EXPECT_EQ(c.heatmap(1, 2), 2U);
  EXPECT_EQ(c.heatmap(3, 4), 2U);
}

TEST(ReleaseCoords, GapMonotoneUnderRelease) {
  Rng rng(11);
  Canvas c = canvas_new(2, 6, 6);
  const Latent target = random_latent(c.shape(), rng);
  double prev = l1_gap(c, target);
  for (int i = 0; i < 60; ++i) {
    const Coord k{int(rng.below(2)), int(rng.below(6)), int(rng.below(6))};
    const bool differed = c.z.at(k.channel, k.x, k.y) != target.at(k.channel, k.x, k.y);
    const std::vector<Coord> one{k};
    release_coords(c, target, one);
    const double now = l1_gap(c, target);
    if (differed) {
      EXPECT_LT(now, prev);
    } else {
      EXPECT_EQ(now, prev);
    }
    prev = now;
  }
}

TEST(ReleaseCoords, ReleasingEverythingIsBitwise) {
  Rng rng(5);
  Canvas c = canvas_new(3, 4, 5);
  Latent target = random_latent(c.shape(), rng);
  target.at(0, 0, 0) = -0.0F;
  std::vector<Coord> all;
  for (int ch = 0; ch < 3; ++ch)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 5; ++x) all.push_back({ch, x, y});
  release_coords(c, target, all);
  EXPECT_TRUE(lp_test::bitwise_equal(c.z, target));
  EXPECT_TRUE(unequal_coords(c, target).empty());
}

TEST(L1Gap, HalfEverywhere) {
  const Canvas c = canvas_new(1, 2, 2);
  EXPECT_DOUBLE_EQ(l1_gap(c, Latent(Shape{1, 2, 2}, 0.5F)), 2.0);
}

TEST(L1Gap, IdentityIsZero) {
  Rng rng(1);
  Canvas c = canvas_new(2, 3, 3);
  c.z = random_latent(c.shape(), rng);
  EXPECT_EQ(l1_gap(c, c.z), 0.0);
}

TEST(L1Gap, MatchesElementwiseOracle) {
  Rng rng(42);
  Canvas c = canvas_new(4, 8, 8);
  c.z = random_latent(c.shape(), rng);
  const Latent d = random_latent(c.shape(), rng);
  double oracle = 0.0;
  std::vector<double> per(4, 0.0);
  for (int ch = 0; ch < 4; ++ch) {
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        const double a = double(std::fabs(c.z.at(ch, x, y) - d.at(ch, x, y)));  // float32 difference
        oracle += a;
        per[std::size_t(ch)] += a;
      }
    }
  }
  EXPECT_NEAR(l1_gap(c, d), oracle, 1e-9);
  for (int ch = 0; ch < 4; ++ch) EXPECT_NEAR(l1_gap(c, d, ch), per[std::size_t(ch)], 1e-9);
}

TEST(L1Gap, Errors) {
  const Canvas c = canvas_new(2, 2, 2);
  EXPECT_THROW((void)l1_gap(c, Latent(Shape{1, 2, 2})), InvalidArgument);
  EXPECT_THROW((void)l1_gap(c, Latent(Shape{2, 2, 2}), 2), InvalidArgument);
}

TEST(Trajectory, Validation) {
  EXPECT_THROW(make_trajectory({}), InvalidArgument);
  EXPECT_THROW(make_trajectory({Latent(Shape{1, 2, 2}), Latent(Shape{1, 2, 3})}), InvalidArgument);
  Latent bad(Shape{1, 1, 2});
  bad.at(0, 1, 0) = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(make_trajectory({bad}), InvalidArgument);
  LatentTrajectory t = make_trajectory({Latent(Shape{1, 1, 1}), Latent(Shape{1, 1, 1})});
  EXPECT_EQ(t.iteration_indices, (std::vector<int>{0, 1}));
  t.iteration_indices = {3, 3};
  EXPECT_THROW(validate(t), InvalidArgument);
}

TEST(Config, Defaults) {
  const PainterConfig c;
  EXPECT_EQ(c.theta, 0.05);
  EXPECT_EQ(c.rho, 0.1);
  EXPECT_EQ(c.radius, 2);
  EXPECT_EQ(c.sigma, 8.0);
  EXPECT_EQ(c.epsilon, 0.25);
  EXPECT_EQ(c.cost_mode, CostMode::near);
  EXPECT_FALSE(c.stroke_cap.has_value());
  EXPECT_EQ(c.strokes_per_frame, 1);
  EXPECT_TRUE(c.final_flush);
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, Validation) {
  auto bad = [](auto mutate) {
    PainterConfig c;
    mutate(c);
    EXPECT_THROW(validate(c), InvalidArgument);
  };
  bad([](PainterConfig& c) { c.theta = 0.0; });
  bad([](PainterConfig& c) { c.rho = 1.5; });
  bad([](PainterConfig& c) { c.rho = -0.1; });
  bad([](PainterConfig& c) { c.epsilon = 0.0; });
  bad([](PainterConfig& c) { c.epsilon = 1.5; });
  bad([](PainterConfig& c) { c.sigma = 0.0; });
  bad([](PainterConfig& c) { c.radius = -1; });
  bad([](PainterConfig& c) { c.stroke_cap = 0; });
  bad([](PainterConfig& c) { c.strokes_per_frame = 0; });
  bad([](PainterConfig& c) { c.effect_params.frames_per_iteration = 0; });
  bad([](PainterConfig& c) { c.effect_params.chunk_size = 0; });
}

TEST(Enums, RoundTrip) {
  for (auto m : {CostMode::near, CostMode::far, CostMode::off}) EXPECT_EQ(parse_cost_mode(to_string(m)), m);
  for (auto e : {Effect::strokes, Effect::glow, Effect::dissolve, Effect::fade, Effect::flip, Effect::passthrough}) {
    EXPECT_EQ(parse_effect(to_string(e)), e);
  }
  for (auto d : {DissolveMode::random, DissolveMode::content, DissolveMode::vertical}) {
    EXPECT_EQ(parse_dissolve_mode(to_string(d)), d);
  }
  EXPECT_THROW(parse_effect("sparkle"), InvalidArgument);
}

TEST(Random, SeededStreamsAreStable) {
  Rng a(7);
  Rng b(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  Rng c(8);
  EXPECT_NE(Rng(7).next(), c.next());
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_LT(r.below(7), 7U);
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Random, ShuffleIsPermutation) {
  Rng r(9);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[std::size_t(i)] = i;
  auto w = v;
  r.shuffle(std::span(w));
  EXPECT_NE(w, v);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(w, v);
}

}  // namespace
