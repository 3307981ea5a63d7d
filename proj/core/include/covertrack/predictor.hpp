#pragma once

#include <optional>
#include <vector>

#include "covertrack/env.hpp"
#include "covertrack/geometry.hpp"

namespace covertrack {

/// Where a target's position estimate comes from, given the current and the
/// previous step's observations.
enum class Freshness { observed_both, observed_t_only, observed_prev_only, unknown };

/// Camera poses plus, for each target, its reconstructed position if any
/// camera saw it in this observation.
struct EstimatedState {
  std::vector<CameraPose> cameras;
  std::vector<std::optional<Vec2>> targets;

  int known_targets() const;
  /// An estimate with no observed targets, used before the first step.
  static EstimatedState empty(int cameras, int targets);

  friend bool operator==(const EstimatedState&, const EstimatedState&) = default;
};

/// Reconstructs every observed target; a target seen by several cameras gets
/// the mean of their reconstructions. Positions are clamped to the field.
EstimatedState estimate_current(const CentralizedObservation& obs, const FieldSpec& field);

std::vector<Freshness> classify(const EstimatedState& prev, const EstimatedState& cur);

/// Position of each target `steps_ahead` steps after the current one.
/// Seen at both steps: constant-velocity extrapolation. Seen at one step only:
/// that position. Never seen: nullopt. Results are clamped to the field.
std::vector<std::optional<Vec2>> extrapolate(const EstimatedState& prev, const EstimatedState& cur,
                                             int steps_ahead, const FieldSpec& field);

/// Assumes the world stands still: every target seen now stays where it is.
std::vector<std::optional<Vec2>> hold_current(const EstimatedState& cur);

}  // namespace covertrack
