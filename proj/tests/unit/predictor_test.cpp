#include <gtest/gtest.h>

#include "covertrack/env.hpp"
#include "covertrack/predictor.hpp"

using namespace covertrack;

namespace {

const FieldSpec kField{};

EstimatedState with_targets(std::vector<std::optional<Vec2>> t) {
  EstimatedState s;
  s.cameras = {CameraPose::at(0, 0, kField)};
  s.targets = std::move(t);
  return s;
}

void expect_near(const std::optional<Vec2>& got, Vec2 want) {
  ASSERT_TRUE(got.has_value());
  EXPECT_NEAR(got->x, want.x, 1e-9);
  EXPECT_NEAR(got->y, want.y, 1e-9);
}

}  // namespace

TEST(Classify, AllFourCases) {
  const auto prev = with_targets({Vec2{1, 1}, std::nullopt, Vec2{2, 2}, std::nullopt});
  const auto cur = with_targets({Vec2{1, 1}, Vec2{3, 3}, std::nullopt, std::nullopt});
  const auto f = classify(prev, cur);
  EXPECT_EQ(f, (std::vector<Freshness>{Freshness::observed_both, Freshness::observed_t_only,
                                       Freshness::observed_prev_only, Freshness::unknown}));
}

TEST(Extrapolate, ConstantVelocity) {
  const auto prev = with_targets({Vec2{100, 100}});
  const auto cur = with_targets({Vec2{130, 140}});
  expect_near(extrapolate(prev, cur, 1, kField)[0], {160, 180});
  expect_near(extrapolate(prev, cur, 3, kField)[0], {220, 260});
  EXPECT_THROW(extrapolate(prev, cur, 0, kField), std::invalid_argument);
}

TEST(Extrapolate, ClampedToField) {
  const auto prev = with_targets({Vec2{2300, 50}});
  const auto cur = with_targets({Vec2{2380, 20}});
  expect_near(extrapolate(prev, cur, 2, kField)[0], {2400, 0});
}

TEST(Extrapolate, SingleSightingHoldsPosition) {
  const auto prev = with_targets({std::nullopt, Vec2{500, 600}, std::nullopt});
  const auto cur = with_targets({Vec2{10, 20}, std::nullopt, std::nullopt});
  const auto out = extrapolate(prev, cur, 5, kField);
  expect_near(out[0], {10, 20});
  expect_near(out[1], {500, 600});
  EXPECT_FALSE(out[2].has_value());
}

TEST(Extrapolate, HoldCurrentIgnoresHistory) {
  const auto cur = with_targets({Vec2{10, 20}, std::nullopt});
  const auto out = hold_current(cur);
  expect_near(out[0], {10, 20});
  EXPECT_FALSE(out[1].has_value());
}

TEST(Extrapolate, TracksStraightLineMotionExactly) {
  // A target moving at constant velocity is predicted exactly away from the walls.
  const Vec2 v{7.5, -3.25};
  for (int k = 1; k <= 5; ++k) {
    const Vec2 x0{1000, 600};
    const auto prev = with_targets({x0});
    const auto cur = with_targets({x0 + v});
    expect_near(extrapolate(prev, cur, k, kField)[0], x0 + static_cast<double>(k + 1) * v);
  }
}

TEST(EstimateCurrent, RecoversTruePositions) {
  EnvConfig cfg;
  cfg.cameras = 6;
  cfg.targets = 12;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    EnvRng rng(seed);
    const auto r = reset(cfg, InitMode::random, rng);
    const auto est = estimate_current(r.obs, cfg.field);
    const auto cov = coverage(r.state, cfg.field);
    int seen = 0;
    for (int j = 0; j < cfg.targets; ++j) {
      bool any = false;
      for (int i = 0; i < cfg.cameras; ++i) any = any || cov(i, j);
      ASSERT_EQ(est.targets[static_cast<std::size_t>(j)].has_value(), any);
      if (any) {
        ++seen;
        EXPECT_LT(distance(*est.targets[static_cast<std::size_t>(j)], r.state.targets[static_cast<std::size_t>(j)].pos), 1e-9);
      }
    }
    EXPECT_EQ(est.known_targets(), seen);
    EXPECT_EQ(est.cameras, r.state.cameras);
  }
}

TEST(EstimateCurrent, EmptyHasNoTargets) {
  const auto e = EstimatedState::empty(3, 4);
  EXPECT_EQ(e.targets.size(), 4u);
  EXPECT_EQ(e.known_targets(), 0);
}
