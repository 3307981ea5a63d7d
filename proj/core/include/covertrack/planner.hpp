#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "covertrack/env.hpp"
#include "covertrack/predictor.hpp"
#include "covertrack/qnetwork.hpp"

namespace covertrack {

struct PlannerConfig {
  int depth = 3;
  int simulations = 100;
  double exploration = std::sqrt(2.0);
  // Seed V(s, a) from the network's q-values; when off every V starts at 0.
  bool init_values = true;
  // Extrapolate target motion; when off, targets are assumed to stay where
  // they are currently estimated.
  bool predict_motion = true;

  void validate() const;
};

struct CandidateStats {
  JointAction action;
  int visits = 0;
  double value = 0.0;
};

/// The root action first, then every single-camera deviation in
/// (camera, action index) order: 8n + 1 joint actions.
std::vector<JointAction> candidate_actions(const JointAction& root);

/// Statistics for candidate_actions(root). V(root) = 1 and a deviation of
/// camera i to action j gets q'_ij / max_k q'_ik, where q' is the row shifted
/// to be strictly positive when needed. All visit counts start at 0.
std::vector<CandidateStats> init_values(const QMatrix& q, const JointAction& root, bool enabled = true);

/// Mean of the rewards collected along one rollout.
double mean_reward(std::span<const double> rewards);

/// Counts a visit and moves V toward r using the incremented count:
/// N <- N + 1, V <- V + (r - V) / (N + 1).
void record_visit(CandidateStats& stats, double reward);

/// UCB score V + c * sqrt(ln(1 + total) / (1 + N)).
double ucb_score(const CandidateStats& stats, int total_visits, double exploration);

/// Predicted target positions at depths 1..D (index 0 is depth 1).
using TargetForecast = std::vector<std::vector<std::optional<Vec2>>>;

TargetForecast forecast(const EstimatedState& prev, const EstimatedState& cur, int depth, bool predict_motion,
                        const FieldSpec& field);

/// Fraction of forecast targets inside some camera's view. Targets without a
/// forecast are ignored; no forecast targets gives 0.
double predicted_coverage(std::span<const CameraPose> cameras, std::span<const std::optional<Vec2>> targets,
                          const FieldSpec& field);

/// Observation the cameras would receive if the targets were where forecast.
CentralizedObservation synthesize_observation(std::span<const CameraPose> cameras,
                                              std::span<const std::optional<Vec2>> targets, const FieldSpec& field);

/// Everything a rollout needs besides the first action. `hidden` is the live
/// recurrent state after consuming the current observation; rollouts copy it.
struct RolloutContext {
  const EnvConfig& env;
  const QNetwork& policy;
  const HiddenState& hidden;
  std::span<const CameraPose> cameras;
  const TargetForecast& targets;
};

/// Applies `first`, then follows the greedy policy on synthesized
/// observations; returns one coverage reward per depth.
std::vector<double> rollout(const RolloutContext& ctx, const JointAction& first);
/// Same as rollout() for many first actions, evaluated as one batch.
std::vector<std::vector<double>> rollout_all(const RolloutContext& ctx, std::span<const JointAction> firsts);

struct PlanResult {
  JointAction action;
  std::vector<CandidateStats> stats;
  int chosen = 0;  // index into stats
};

/// Bandit search over the pruned candidate set with policy rollouts on
/// forecast targets. Returns the most visited candidate, ties to the lowest
/// index (the root comes first). Inputs are not modified.
PlanResult plan(const EstimatedState& prev, const EstimatedState& cur, const QNetwork& policy,
                const HiddenState& hidden, const JointAction& root, const QMatrix& q, const EnvConfig& env,
                const PlannerConfig& config);

}  // namespace covertrack
