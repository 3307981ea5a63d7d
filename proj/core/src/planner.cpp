#include "covertrack/planner.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "covertrack/error.hpp"

namespace covertrack {

namespace {

constexpr double kShiftEps = 1e-6;

}  // namespace

void PlannerConfig::validate() const {
  if (depth < 1) throw ConfigError("planner.depth must be >= 1");
  if (simulations < 1) throw ConfigError("planner.simulations must be >= 1");
  if (!(exploration >= 0.0)) throw ConfigError("planner.exploration must be >= 0");
}

std::vector<JointAction> candidate_actions(const JointAction& root) {
  std::vector<JointAction> out;
  out.reserve(root.size() * (CameraAction::kCount - 1) + 1);
  out.push_back(root);
  for (std::size_t i = 0; i < root.size(); ++i) {
    for (int j = 0; j < CameraAction::kCount; ++j) {
      if (j == root[i].index()) continue;
      JointAction a = root;
      a[i] = CameraAction::from_index(j);
      out.push_back(std::move(a));
    }
  }
  return out;
}

std::vector<CandidateStats> init_values(const QMatrix& q, const JointAction& root, bool enabled) {
  const auto n = static_cast<Eigen::Index>(root.size());
  if (q.rows() != n || q.cols() != CameraAction::kCount) throw std::invalid_argument("q matrix shape mismatch");
  if (!q.allFinite()) throw NumericError("non-finite q-values");

  auto cands = candidate_actions(root);
  std::vector<CandidateStats> stats(cands.size());
  for (std::size_t c = 0; c < cands.size(); ++c) stats[c].action = std::move(cands[c]);
  if (!enabled) return stats;

  stats[0].value = 1.0;
  std::size_t c = 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd row = q.row(i);
    const double lo = row.minCoeff();
    if (!(lo > 0.0)) row.array() += kShiftEps - lo;
    const double hi = row.maxCoeff();
    for (int j = 0; j < CameraAction::kCount; ++j) {
      if (j == root[static_cast<std::size_t>(i)].index()) continue;
      stats[c++].value = row(j) / hi;
    }
  }
  return stats;
}

double mean_reward(std::span<const double> rewards) {
  if (rewards.empty()) return 0.0;
  return std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(rewards.size());
}

void record_visit(CandidateStats& stats, double reward) {
  stats.visits += 1;
  stats.value += (reward - stats.value) / (stats.visits + 1);
}

double ucb_score(const CandidateStats& stats, int total_visits, double exploration) {
  return stats.value + exploration * std::sqrt(std::log(1.0 + total_visits) / (1.0 + stats.visits));
}

TargetForecast forecast(const EstimatedState& prev, const EstimatedState& cur, int depth, bool predict_motion,
                        const FieldSpec& field) {
  TargetForecast out;
  out.reserve(static_cast<std::size_t>(depth));
  for (int k = 1; k <= depth; ++k)
    out.push_back(predict_motion ? extrapolate(prev, cur, k, field) : hold_current(cur));
  return out;
}

double predicted_coverage(std::span<const CameraPose> cameras, std::span<const std::optional<Vec2>> targets,
                          const FieldSpec& field) {
  int known = 0;
  int covered = 0;
  for (const auto& t : targets) {
    if (!t) continue;
    ++known;
    for (const auto& cam : cameras) {
      if (in_view(cam, *t, field)) {
        ++covered;
        break;
      }
    }
  }
  return known == 0 ? 0.0 : static_cast<double>(covered) / known;
}

CentralizedObservation synthesize_observation(std::span<const CameraPose> cameras,
                                              std::span<const std::optional<Vec2>> targets, const FieldSpec& field) {
  CentralizedObservation obs;
  obs.cameras.reserve(cameras.size());
  for (const auto& cam : cameras) {
    CameraObservation co;
    co.pose = cam;
    co.targets.reserve(targets.size());
    for (const auto& t : targets)
      co.targets.push_back(t ? relative_obs(cam, *t, field).value_or(RelativeObs::unobserved())
                             : RelativeObs::unobserved());
    obs.cameras.push_back(std::move(co));
  }
  return obs;
}

std::vector<std::vector<double>> rollout_all(const RolloutContext& ctx, std::span<const JointAction> firsts) {
  const auto& field = ctx.env.field;
  const bool freeze = ctx.env.freeze_camera_position;
  const int depth = static_cast<int>(ctx.targets.size());
  const int n = static_cast<int>(ctx.cameras.size());
  const auto count = firsts.size();

  std::vector<std::vector<CameraPose>> cams(count);
  std::vector<std::vector<double>> rewards(count);
  for (std::size_t c = 0; c < count; ++c) {
    cams[c] = apply_joint_action(ctx.cameras, firsts[c], field, freeze);
    rewards[c].reserve(static_cast<std::size_t>(depth));
    rewards[c].push_back(predicted_coverage(cams[c], ctx.targets[0], field));
  }
  if (depth == 1) return rewards;

  const int in = ctx.policy.shape().input();
  Eigen::MatrixXd hidden(ctx.hidden.rows(), static_cast<Eigen::Index>(count) * n);
  for (std::size_t c = 0; c < count; ++c) hidden.middleCols(static_cast<Eigen::Index>(c) * n, n) = ctx.hidden;
  Eigen::MatrixXd inputs(in, hidden.cols());

  for (int k = 1; k < depth; ++k) {
    const auto& now = ctx.targets[static_cast<std::size_t>(k - 1)];
    for (std::size_t c = 0; c < count; ++c) {
      const auto obs = synthesize_observation(cams[c], now, field);
      inputs.middleCols(static_cast<Eigen::Index>(c) * n, n) = encode_agents(obs, field);
    }
    auto out = ctx.policy.forward(inputs, hidden);
    hidden = std::move(out.hidden);
    const auto& next = ctx.targets[static_cast<std::size_t>(k)];
    for (std::size_t c = 0; c < count; ++c) {
      JointAction greedy(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const auto colq = out.q.col(static_cast<Eigen::Index>(c) * n + i);
        greedy[static_cast<std::size_t>(i)] = CameraAction::from_index(
            argmax_action(std::span<const double>(colq.data(), static_cast<std::size_t>(colq.size()))));
      }
      cams[c] = apply_joint_action(cams[c], greedy, field, freeze);
      rewards[c].push_back(predicted_coverage(cams[c], next, field));
    }
  }
  return rewards;
}

std::vector<double> rollout(const RolloutContext& ctx, const JointAction& first) {
  return rollout_all(ctx, std::span<const JointAction>(&first, 1)).front();
}

PlanResult plan(const EstimatedState& prev, const EstimatedState& cur, const QNetwork& policy,
                const HiddenState& hidden, const JointAction& root, const QMatrix& q, const EnvConfig& env,
                const PlannerConfig& config) {
  config.validate();
  PlanResult result;
  result.stats = init_values(q, root, config.init_values);

  const TargetForecast targets = forecast(prev, cur, config.depth, config.predict_motion, env.field);
  const bool any_known = std::any_of(targets.front().begin(), targets.front().end(),
                                     [](const auto& t) { return t.has_value(); });
  if (!any_known) {
    result.action = root;
    return result;
  }

  // Rollouts are deterministic (greedy policy, deterministic forecast), so a
  // candidate's return is computed once, on its first visit, and reused.
  std::vector<JointAction> firsts;
  firsts.reserve(result.stats.size());
  for (const auto& s : result.stats) firsts.push_back(s.action);
  const RolloutContext ctx{env, policy, hidden, cur.cameras, targets};
  const auto all_rewards = rollout_all(ctx, firsts);
  std::vector<double> returns(all_rewards.size());
  for (std::size_t c = 0; c < returns.size(); ++c) returns[c] = mean_reward(all_rewards[c]);

  int total = 0;
  for (int sim = 0; sim < config.simulations; ++sim) {
    std::size_t pick = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < result.stats.size(); ++c) {
      const double score = ucb_score(result.stats[c], total, config.exploration);
      if (score > best) {
        best = score;
        pick = c;
      }
    }
    record_visit(result.stats[pick], returns[pick]);
    ++total;
  }

  std::size_t chosen = 0;
  for (std::size_t c = 1; c < result.stats.size(); ++c)
    if (result.stats[c].visits > result.stats[chosen].visits) chosen = c;
  result.chosen = static_cast<int>(chosen);
  result.action = result.stats[chosen].action;
  return result;
}

}  // namespace covertrack
