#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "covertrack/env.hpp"
#include "covertrack/error.hpp"

using namespace covertrack;

namespace {

EnvConfig small_config(int n = 4, int m = 5) {
  EnvConfig c;
  c.field.width = 2400;
  c.field.height = 1200;
  c.cameras = n;
  c.targets = m;
  return c;
}

CoverageMatrix from_rows(const std::vector<std::vector<int>>& rows) {
  CoverageMatrix cov(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) cov.set(static_cast<int>(i), static_cast<int>(j), rows[i][j] == 1);
  return cov;
}

// Direct transcription of the three reward formulas over a plain 0/1 table.
double oracle_team(const std::vector<std::vector<int>>& I) {
  const std::size_t n = I.size(), m = I[0].size();
  double s = 0;
  for (std::size_t j = 0; j < m; ++j) {
    int c = 0;
    for (std::size_t i = 0; i < n; ++i) c += I[i][j];
    s += std::min(1, c);
  }
  return s / static_cast<double>(m);
}

double oracle_individual(const std::vector<std::vector<int>>& I, std::size_t cam) {
  const std::size_t n = I.size(), m = I[0].size();
  double s = 0;
  for (std::size_t j = 0; j < m; ++j) {
    int c = 0;
    for (std::size_t i = 0; i < n; ++i) c += I[i][j];
    s += I[cam][j] * std::max(0, 2 - c);
  }
  return s / static_cast<double>(m);
}

}  // namespace

TEST(CameraAction, NineDistinctIndices) {
  std::vector<int> seen;
  for (int k = 0; k < CameraAction::kCount; ++k) {
    const auto a = CameraAction::from_index(k);
    EXPECT_EQ(a.index(), k);
    EXPECT_GE(a.move, -1);
    EXPECT_LE(a.move, 1);
    EXPECT_GE(a.rotate, -1);
    EXPECT_LE(a.rotate, 1);
    seen.push_back((a.move + 1) * 10 + a.rotate + 1);
  }
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(std::unique(seen.begin(), seen.end()), seen.end());
  EXPECT_EQ(CameraAction::from_index(4), (CameraAction{0, 0}));
}

TEST(Reset, FixModeUsesSegmentMidpoints) {
  EnvRng rng(1);
  const auto r = reset(small_config(), InitMode::fix, rng);
  const std::vector<double> expected{900, 2700, 4500, 6300};
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(r.state.cameras[static_cast<std::size_t>(i)].s, expected[static_cast<std::size_t>(i)]);
}

TEST(Reset, PartModeStaysInSegments) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EnvRng rng(seed);
    const auto r = reset(small_config(), InitMode::part, rng);
    for (int i = 0; i < 4; ++i) {
      const double s = r.state.cameras[static_cast<std::size_t>(i)].s;
      EXPECT_GE(s, 1800.0 * i);
      EXPECT_LT(s, 1800.0 * (i + 1));
    }
  }
}

TEST(Reset, RandomModeCoversPerimeter) {
  double lo = 1e9, hi = -1;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    EnvRng rng(seed);
    for (const auto& c : reset(small_config(), InitMode::random, rng).state.cameras) {
      lo = std::min(lo, c.s);
      hi = std::max(hi, c.s);
    }
  }
  EXPECT_LT(lo, 200);
  EXPECT_GT(hi, 7000);
}

TEST(Reset, SameSeedIsBitIdentical) {
  EnvRng a(42), b(42), c(43);
  const auto ra = reset(small_config(), InitMode::random, a);
  const auto rb = reset(small_config(), InitMode::random, b);
  const auto rc = reset(small_config(), InitMode::random, c);
  EXPECT_EQ(ra.state, rb.state);
  EXPECT_NE(ra.state, rc.state);
}

TEST(Reset, InvalidConfig) {
  EnvRng rng(1);
  auto c = small_config();
  c.cameras = 0;
  EXPECT_THROW(reset(c, InitMode::fix, rng), ConfigError);
  c = small_config();
  c.targets = 0;
  EXPECT_THROW(reset(c, InitMode::fix, rng), ConfigError);
  c = small_config();
  c.field.height = -3;
  EXPECT_THROW(reset(c, InitMode::fix, rng), ConfigError);
}

TEST(Step, MoveAndRotateByOneUnit) {
  const auto f = small_config().field;
  const auto next = apply_camera_action(CameraPose::at(0, 0, f), {1, 1}, f);
  EXPECT_DOUBLE_EQ(next.s, 10);
  EXPECT_DOUBLE_EQ(next.alpha, 5);
  EXPECT_EQ(next.pos, (Vec2{10, 0}));
}

TEST(Step, PerimeterWraps) {
  const auto f = small_config().field;
  const auto next = apply_camera_action(CameraPose::at(f.perimeter() - 5, 0, f), {1, 0}, f);
  EXPECT_DOUBLE_EQ(next.s, 5);
  const auto back = apply_camera_action(CameraPose::at(3, 2, f), {-1, -1}, f);
  EXPECT_DOUBLE_EQ(back.s, f.perimeter() - 7);
  EXPECT_DOUBLE_EQ(back.alpha, 357);
}

TEST(Step, FrozenPositionOnlyRotates) {
  const auto f = small_config().field;
  const auto next = apply_camera_action(CameraPose::at(100, 0, f), {1, 1}, f, true);
  EXPECT_DOUBLE_EQ(next.s, 100);
  EXPECT_DOUBLE_EQ(next.alpha, 5);
}

TEST(Step, IdentityActionWithStaticTargets) {
  auto cfg = small_config();
  cfg.static_targets = true;
  EnvRng rng(9);
  const auto r = reset(cfg, InitMode::random, rng);
  const JointAction noop(4, CameraAction{0, 0});
  const auto s = step(r.state, noop, cfg, rng.targets);
  EXPECT_EQ(s.state.cameras, r.state.cameras);
  EXPECT_EQ(s.state.targets, r.state.targets);
  EXPECT_EQ(s.state.t, r.state.t + 1);
}

TEST(Step, RejectsWrongActionLength) {
  auto cfg = small_config();
  EnvRng rng(9);
  const auto r = reset(cfg, InitMode::fix, rng);
  EXPECT_THROW(step(r.state, JointAction(3), cfg, rng.targets), std::invalid_argument);
}

TEST(AdvanceTargets, StraightLineTowardGoal) {
  auto cfg = small_config(1, 1);
  cfg.speed_jitter = 1.0;
  EnvState s;
  s.targets = {TargetState{{0, 0}, {300, 0}, 100}};
  Rng rng(1);
  advance_targets(s, cfg, rng);
  EXPECT_NEAR(s.targets[0].pos.x, 100, 1e-12);
  EXPECT_NEAR(s.targets[0].pos.y, 0, 1e-12);
  EXPECT_EQ(s.targets[0].goal, (Vec2{300, 0}));
}

TEST(AdvanceTargets, ArrivalSamplesNewGoal) {
  auto cfg = small_config(1, 1);
  EnvState s;
  s.targets = {TargetState{{500, 500}, {500, 500}, 60}};
  Rng rng(1);
  advance_targets(s, cfg, rng);
  EXPECT_EQ(s.targets[0].pos, (Vec2{500, 500}));
  EXPECT_NE(s.targets[0].goal, (Vec2{500, 500}));
  EXPECT_GE(s.targets[0].speed, cfg.speed_low);
  EXPECT_LE(s.targets[0].speed, cfg.speed_high);
}

TEST(AdvanceTargets, NeverOvershootsGoal) {
  auto cfg = small_config(1, 1);
  cfg.goal_reach_eps = 0;
  EnvState s;
  s.targets = {TargetState{{0, 0}, {30, 40}, 100}};
  Rng rng(4);
  advance_targets(s, cfg, rng);
  EXPECT_NEAR(s.targets[0].pos.x, 30, 1e-12);
  EXPECT_NEAR(s.targets[0].pos.y, 40, 1e-12);
}

TEST(AdvanceTargets, StepLengthWithinSpeedBand) {
  auto cfg = small_config(1, 1);
  cfg.goal_reach_eps = 0;
  Rng rng(77);
  Rng pick(78);
  for (int k = 0; k < 10000; ++k) {
    const double v = pick.uniform(cfg.speed_low, cfg.speed_high);
    EnvState s;
    // Goal far enough that the step is never truncated.
    s.targets = {TargetState{{0, 0}, {2400, 1200}, v}};
    advance_targets(s, cfg, rng);
    const double u = norm(s.targets[0].pos);
    EXPECT_GE(u, 50.0 - 1e-9);
    EXPECT_LE(u, 120.0 + 1e-9);
    EXPECT_GE(u, v - 1e-9);
    EXPECT_LE(u, 1.2 * v + 1e-9);
  }
}

TEST(Observe, UnseenTargetFilledWithMinusOne) {
  auto cfg = small_config(2, 1);
  EnvState s;
  s.cameras = {CameraPose::at(1200, 180, cfg.field), CameraPose::at(1200, 180, cfg.field)};
  s.targets = {TargetState{{1200, 400}, {0, 0}, 0}};
  const auto obs = observe(s, cfg.field);
  ASSERT_EQ(obs.num_cameras(), 2);
  for (const auto& c : obs.cameras) {
    EXPECT_EQ(c.targets[0], RelativeObs::unobserved());
    EXPECT_FALSE(c.targets[0].observed());
  }
}

TEST(Observe, LayoutAndConsistencyWithCoverage) {
  auto cfg = small_config(3, 7);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EnvRng rng(seed);
    const auto r = reset(cfg, InitMode::random, rng);
    const auto cov = coverage(r.state, cfg.field);
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(r.obs.flatten(i).size(), 3u + 3u * 7u);
      for (int j = 0; j < 7; ++j) {
        const auto& t = r.obs.cameras[static_cast<std::size_t>(i)].targets[static_cast<std::size_t>(j)];
        EXPECT_EQ(t.observed(), cov(i, j));
        if (t.observed()) {
          const Vec2 p = reconstruct_position(r.obs.cameras[static_cast<std::size_t>(i)].pose, t);
          EXPECT_LT(distance(p, r.state.targets[static_cast<std::size_t>(j)].pos), 1e-9);
        }
      }
    }
  }
}

TEST(Rewards, TeamRewardExamples) {
  // Per-target counts [2, 1, 0, 1].
  EXPECT_DOUBLE_EQ(team_reward(from_rows({{1, 1, 0, 0}, {1, 0, 0, 1}})), 0.75);
  EXPECT_DOUBLE_EQ(team_reward(from_rows({{0, 0, 0}, {0, 0, 0}})), 0.0);
  EXPECT_DOUBLE_EQ(team_reward(from_rows({{1, 0, 1}, {1, 1, 0}})), 1.0);
}

TEST(Rewards, IndividualRewardExamples) {
  const auto cov = from_rows({{1, 1, 0}, {0, 1, 0}});
  EXPECT_DOUBLE_EQ(individual_reward(cov, 0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(individual_reward(cov, 1), 0.0);
  EXPECT_DOUBLE_EQ(individual_reward(from_rows({{1}, {1}, {1}}), 2), 0.0);
  EXPECT_THROW(individual_reward(cov, 2), std::out_of_range);
}

TEST(Rewards, TotalRewardBlend) {
  EXPECT_NEAR(total_reward(2.0 / 3.0, 1.0 / 3.0, 0.1), 0.36667, 1e-5);
  EXPECT_DOUBLE_EQ(total_reward(0.4, 0.9, 1.0), 0.4);
  EXPECT_DOUBLE_EQ(total_reward(0.4, 0.9, 0.0), 0.9);
}

TEST(Rewards, ExhaustiveMatchesDirectSummation) {
  for (int n = 1; n <= 3; ++n) {
    for (int m = 1; m <= 4; ++m) {
      const int bits = n * m;
      for (int mask = 0; mask < (1 << bits); ++mask) {
        std::vector<std::vector<int>> I(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(m)));
        for (int b = 0; b < bits; ++b) I[static_cast<std::size_t>(b / m)][static_cast<std::size_t>(b % m)] = (mask >> b) & 1;
        const auto cov = from_rows(I);
        const double rt = team_reward(cov);
        ASSERT_NEAR(rt, oracle_team(I), 1e-12);
        for (int i = 0; i < n; ++i) {
          const double rp = individual_reward(cov, i);
          ASSERT_NEAR(rp, oracle_individual(I, static_cast<std::size_t>(i)), 1e-12);
          ASSERT_NEAR(total_reward(rt, rp, 0.1), 0.1 * oracle_team(I) + 0.9 * oracle_individual(I, static_cast<std::size_t>(i)), 1e-12);
        }
      }
    }
  }
}

TEST(Rewards, PermutingCamerasPermutesIndividualRewards) {
  const std::vector<std::vector<int>> I{{1, 0, 1, 1}, {0, 1, 1, 0}, {1, 0, 0, 0}};
  const std::vector<std::size_t> perm{2, 0, 1};
  std::vector<std::vector<int>> P(3);
  for (std::size_t k = 0; k < 3; ++k) P[k] = I[perm[k]];
  const auto a = from_rows(I), b = from_rows(P);
  EXPECT_DOUBLE_EQ(team_reward(a), team_reward(b));
  for (std::size_t k = 0; k < 3; ++k)
    EXPECT_DOUBLE_EQ(individual_reward(b, static_cast<int>(k)), individual_reward(a, static_cast<int>(perm[k])));
}

TEST(Environment, DeterministicTrajectoriesAndBounds) {
  auto cfg = small_config(3, 6);
  auto run = [&](std::uint64_t seed) {
    Environment env(cfg, InitMode::random, seed);
    env.reset();
    Rng actions(seed + 1000);
    std::vector<EnvState> states;
    for (int t = 0; t < 200; ++t) {
      JointAction a(3);
      for (auto& x : a) x = CameraAction::from_index(actions.uniform_int(0, 8));
      const auto& s = env.step(a);
      for (const auto& tg : s.state.targets) EXPECT_TRUE(cfg.field.contains(tg.pos));
      for (const auto& c : s.state.cameras) {
        EXPECT_EQ(c.pos, perimeter_to_xy(c.s, cfg.field));
        EXPECT_GE(c.alpha, 0.0);
        EXPECT_LT(c.alpha, 360.0);
      }
      const double team = team_reward(s.coverage);
      for (int i = 0; i < 3; ++i)
        EXPECT_DOUBLE_EQ(s.rewards[static_cast<std::size_t>(i)],
                         total_reward(team, individual_reward(s.coverage, i), cfg.lambda));
      states.push_back(s.state);
    }
    return states;
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5), run(6));
}

TEST(Presets, TableValues) {
  const auto v = preset("Volleyball_A");
  EXPECT_EQ(v.cameras, 6);
  EXPECT_EQ(v.targets, 12);
  EXPECT_EQ(v.field.width, 2400);
  EXPECT_EQ(v.field.height, 1200);
  const auto f = preset("Football_B");
  EXPECT_EQ(f.cameras, 4);
  EXPECT_EQ(f.targets, 22);
  EXPECT_EQ(f.field.width, 2100);
  EXPECT_EQ(f.field.height, 1360);
  EXPECT_EQ(preset("Basketball_A").field.width, 2240);
  EXPECT_EQ(preset_names().size(), 6u);
  EXPECT_THROW(preset("Tennis_A"), ConfigError);
  EXPECT_DOUBLE_EQ(v.field.vis_distance, 800);
  EXPECT_DOUBLE_EQ(v.field.vis_half_angle, 45);
  EXPECT_DOUBLE_EQ(v.field.move_step, 10);
  EXPECT_DOUBLE_EQ(v.field.rotate_step, 5);
  EXPECT_DOUBLE_EQ(v.lambda, 0.1);
}
