#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "covertrack/geometry.hpp"
#include "covertrack/rng.hpp"

namespace covertrack {

enum class InitMode { random, part, fix };

InitMode parse_init_mode(std::string_view name);
std::string_view to_string(InitMode mode);

struct EnvConfig {
  FieldSpec field;
  int cameras = 6;
  int targets = 12;
  double speed_low = 50.0;
  double speed_high = 100.0;
  // Per-step speed is drawn from [v, speed_jitter * v].
  double speed_jitter = 1.2;
  // Distance at which a target counts as arrived. Negative selects one
  // maximum step, speed_jitter * speed_high.
  double goal_reach_eps = -1.0;
  int episode_length = 100;
  // Weight of the team term in the per-camera reward.
  double lambda = 0.1;
  // Cameras may only rotate; the move component of every action is ignored.
  bool freeze_camera_position = false;
  // Targets never move.
  bool static_targets = false;

  double reach_eps() const { return goal_reach_eps >= 0.0 ? goal_reach_eps : speed_jitter * speed_high; }
  void validate() const;
};

/// Named arenas: Volleyball_A/B, Basketball_A/B, Football_A/B.
EnvConfig preset(std::string_view name);
std::vector<std::string> preset_names();

struct TargetState {
  Vec2 pos;
  Vec2 goal;
  double speed = 0.0;

  friend bool operator==(const TargetState&, const TargetState&) = default;
};

struct EnvState {
  std::vector<CameraPose> cameras;
  std::vector<TargetState> targets;
  int t = 0;

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

/// One of the 9 per-camera actions: move along the perimeter by
/// move * move_step and rotate by rotate * rotate_step.
struct CameraAction {
  std::int8_t move = 0;
  std::int8_t rotate = 0;

  static constexpr int kCount = 9;
  static constexpr CameraAction from_index(int index) {
    return {static_cast<std::int8_t>(index / 3 - 1), static_cast<std::int8_t>(index % 3 - 1)};
  }
  constexpr int index() const { return (move + 1) * 3 + (rotate + 1); }

  friend bool operator==(const CameraAction&, const CameraAction&) = default;
};

using JointAction = std::vector<CameraAction>;

/// Binary n x m matrix; entry (i, j) is 1 iff target j lies in camera i's view.
class CoverageMatrix {
 public:
  CoverageMatrix() = default;
  CoverageMatrix(int cameras, int targets) : n_(cameras), m_(targets), bits_(static_cast<std::size_t>(cameras * targets), 0) {}

  int cameras() const { return n_; }
  int targets() const { return m_; }
  bool operator()(int i, int j) const { return bits_[static_cast<std::size_t>(i * m_ + j)] != 0; }
  void set(int i, int j, bool v) { bits_[static_cast<std::size_t>(i * m_ + j)] = v ? 1 : 0; }
  /// Number of cameras covering target j.
  int column_count(int j) const;

  friend bool operator==(const CoverageMatrix&, const CoverageMatrix&) = default;

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Pose of camera i followed by its m relative observations, fixed target order.
struct CameraObservation {
  CameraPose pose;
  std::vector<RelativeObs> targets;
};

struct CentralizedObservation {
  std::vector<CameraObservation> cameras;

  int num_cameras() const { return static_cast<int>(cameras.size()); }
  int num_targets() const { return cameras.empty() ? 0 : static_cast<int>(cameras.front().targets.size()); }
  /// Raw per-camera vector (alpha, x, y, then d, sin, cos per target): 3 + 3m scalars.
  std::vector<double> flatten(int camera) const;
};

// Camera kinematics shared by the environment and the planner's simulator.
CameraPose apply_camera_action(const CameraPose& pose, CameraAction action, const FieldSpec& field,
                               bool freeze_position = false);
std::vector<CameraPose> apply_joint_action(std::span<const CameraPose> cameras, const JointAction& action,
                                           const FieldSpec& field, bool freeze_position = false);

CentralizedObservation observe(const EnvState& state, const FieldSpec& field);
CoverageMatrix coverage(std::span<const CameraPose> cameras, std::span<const Vec2> targets, const FieldSpec& field);
CoverageMatrix coverage(const EnvState& state, const FieldSpec& field);

/// Fraction of targets seen by at least one camera.
double team_reward(const CoverageMatrix& cov);
/// Exclusive coverage of camera i: targets it alone sees, over m.
double individual_reward(const CoverageMatrix& cov, int camera);
double total_reward(double team, double individual, double lambda);

struct EnvRng {
  Rng init;
  Rng targets;

  explicit EnvRng(std::uint64_t seed);
};

struct ResetResult {
  EnvState state;
  CentralizedObservation obs;
};

struct StepResult {
  EnvState state;
  CentralizedObservation obs;
  std::vector<double> rewards;
  CoverageMatrix coverage;
};

ResetResult reset(const EnvConfig& config, InitMode mode, EnvRng& rng);
void advance_targets(EnvState& state, const EnvConfig& config, Rng& rng);
StepResult step(const EnvState& state, const JointAction& action, const EnvConfig& config, Rng& target_rng);

/// Stateful wrapper owning the per-episode state and RNG streams.
class Environment {
 public:
  Environment(EnvConfig config, InitMode mode, std::uint64_t seed);

  const CentralizedObservation& reset();
  const StepResult& step(const JointAction& action);

  const EnvConfig& config() const { return config_; }
  const EnvState& state() const { return state_; }
  const CentralizedObservation& observation() const { return obs_; }
  bool done() const { return state_.t >= config_.episode_length; }

 private:
  EnvConfig config_;
  InitMode mode_;
  EnvRng rng_;
  EnvState state_;
  CentralizedObservation obs_;
  StepResult last_;
};

}  // namespace covertrack
