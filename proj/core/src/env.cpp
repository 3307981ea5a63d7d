#include "covertrack/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covertrack/error.hpp"

namespace covertrack {

InitMode parse_init_mode(std::string_view name) {
  if (name == "random") return InitMode::random;
  if (name == "part") return InitMode::part;
  if (name == "fix") return InitMode::fix;
  throw ConfigError("unknown init mode '" + std::string(name) + "' (expected random, part or fix)");
}

std::string_view to_string(InitMode mode) {
  switch (mode) {
    case InitMode::random: return "random";
    case InitMode::part: return "part";
    case InitMode::fix: return "fix";
  }
  return "?";
}

void EnvConfig::validate() const {
  field.validate();
  if (cameras < 1) throw ConfigError("need at least one camera");
  if (targets < 1) throw ConfigError("need at least one target");
  if (!(speed_low >= 0.0) || !(speed_high >= speed_low)) throw ConfigError("need 0 <= speed_low <= speed_high");
  if (!(speed_jitter >= 1.0)) throw ConfigError("speed_jitter must be >= 1");
  if (episode_length < 1) throw ConfigError("episode_length must be positive");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
}

namespace {

struct PresetRow {
  std::string_view name;
  int n;
  int m;
  double w;
  double h;
};

constexpr std::array<PresetRow, 6> kPresets{{
    {"Volleyball_A", 6, 12, 2400, 1200},
    {"Basketball_A", 6, 10, 2240, 1200},
    {"Football_A", 6, 22, 2100, 1360},
    {"Volleyball_B", 4, 12, 2400, 1200},
    {"Basketball_B", 4, 10, 2240, 1200},
    {"Football_B", 4, 22, 2100, 1360},
}};

}  // namespace

EnvConfig preset(std::string_view name) {
  for (const auto& row : kPresets) {
    if (row.name == name) {
      EnvConfig cfg;
      cfg.cameras = row.n;
      cfg.targets = row.m;
      cfg.field.width = row.w;
      cfg.field.height = row.h;
      return cfg;
    }
  }
  throw ConfigError("unknown environment preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& row : kPresets) names.emplace_back(row.name);
  return names;
}

int CoverageMatrix::column_count(int j) const {
  int c = 0;
  for (int i = 0; i < n_; ++i) c += (*this)(i, j) ? 1 : 0;
  return c;
}

std::vector<double> CentralizedObservation::flatten(int camera) const {
  const auto& c = cameras.at(static_cast<std::size_t>(camera));
  std::vector<double> out{c.pose.alpha, c.pose.pos.x, c.pose.pos.y};
  out.reserve(3 + 3 * c.targets.size());
  for (const auto& t : c.targets) {
    out.push_back(t.d);
    out.push_back(t.sin_theta);
    out.push_back(t.cos_theta);
  }
  return out;
}

CameraPose apply_camera_action(const CameraPose& pose, CameraAction action, const FieldSpec& field,
                               bool freeze_position) {
  const double move = freeze_position ? 0.0 : action.move * field.move_step;
  return CameraPose::at(pose.s + move, pose.alpha + action.rotate * field.rotate_step, field);
}

std::vector<CameraPose> apply_joint_action(std::span<const CameraPose> cameras, const JointAction& action,
                                           const FieldSpec& field, bool freeze_position) {
  if (action.size() != cameras.size()) throw std::invalid_argument("joint action length must equal camera count");
  std::vector<CameraPose> out;
  out.reserve(cameras.size());
  for (std::size_t i = 0; i < cameras.size(); ++i)
    out.push_back(apply_camera_action(cameras[i], action[i], field, freeze_position));
  return out;
}

CentralizedObservation observe(const EnvState& state, const FieldSpec& field) {
  CentralizedObservation obs;
  obs.cameras.reserve(state.cameras.size());
  for (const auto& cam : state.cameras) {
    CameraObservation co;
    co.pose = cam;
    co.targets.reserve(state.targets.size());
    for (const auto& tgt : state.targets)
      co.targets.push_back(relative_obs(cam, tgt.pos, field).value_or(RelativeObs::unobserved()));
    obs.cameras.push_back(std::move(co));
  }
  return obs;
}

CoverageMatrix coverage(std::span<const CameraPose> cameras, std::span<const Vec2> targets, const FieldSpec& field) {
  CoverageMatrix cov(static_cast<int>(cameras.size()), static_cast<int>(targets.size()));
  for (std::size_t i = 0; i < cameras.size(); ++i)
    for (std::size_t j = 0; j < targets.size(); ++j)
      cov.set(static_cast<int>(i), static_cast<int>(j), in_view(cameras[i], targets[j], field));
  return cov;
}

CoverageMatrix coverage(const EnvState& state, const FieldSpec& field) {
  std::vector<Vec2> pos;
  pos.reserve(state.targets.size());
  for (const auto& t : state.targets) pos.push_back(t.pos);
  return coverage(state.cameras, pos, field);
}

double team_reward(const CoverageMatrix& cov) {
  if (cov.targets() == 0) return 0.0;
  int covered = 0;
  for (int j = 0; j < cov.targets(); ++j) covered += cov.column_count(j) > 0 ? 1 : 0;
  return static_cast<double>(covered) / cov.targets();
}

double individual_reward(const CoverageMatrix& cov, int camera) {
  if (camera < 0 || camera >= cov.cameras()) throw std::out_of_range("camera index out of range");
  if (cov.targets() == 0) return 0.0;
  int score = 0;
  for (int j = 0; j < cov.targets(); ++j)
    if (cov(camera, j)) score += std::max(0, 2 - cov.column_count(j));
  return static_cast<double>(score) / cov.targets();
}

double total_reward(double team, double individual, double lambda) {
  return lambda * team + (1.0 - lambda) * individual;
}

EnvRng::EnvRng(std::uint64_t seed) : init(make_stream(seed, Stream::init)), targets(make_stream(seed, Stream::targets)) {}

namespace {

Vec2 sample_point(const FieldSpec& field, Rng& rng) {
  const double x = rng.uniform(0.0, field.width);
  const double y = rng.uniform(0.0, field.height);
  return {x, y};
}

void retarget(TargetState& t, const EnvConfig& config, Rng& rng) {
  t.goal = sample_point(config.field, rng);
  t.speed = config.static_targets ? 0.0 : rng.uniform(config.speed_low, config.speed_high);
}

}  // namespace

ResetResult reset(const EnvConfig& config, InitMode mode, EnvRng& rng) {
  config.validate();
  const double p = config.field.perimeter();
  const double segment = p / config.cameras;

  EnvState state;
  state.cameras.reserve(static_cast<std::size_t>(config.cameras));
  for (int i = 0; i < config.cameras; ++i) {
    double s = 0.0;
    switch (mode) {
      case InitMode::random: s = rng.init.uniform(0.0, p); break;
      case InitMode::part: s = segment * (i + rng.init.uniform(0.0, 1.0)); break;
      case InitMode::fix: s = segment * (i + 0.5); break;
    }
    const double alpha = rng.init.uniform(0.0, 360.0);
    state.cameras.push_back(CameraPose::at(s, alpha, config.field));
  }
  state.targets.resize(static_cast<std::size_t>(config.targets));
  for (auto& t : state.targets) {
    t.pos = sample_point(config.field, rng.init);
    retarget(t, config, rng.init);
  }
  ResetResult out{state, observe(state, config.field)};
  return out;
}

void advance_targets(EnvState& state, const EnvConfig& config, Rng& rng) {
  if (config.static_targets) return;
  const double eps = config.reach_eps();
  for (auto& t : state.targets) {
    const double u = rng.uniform(t.speed, config.speed_jitter * t.speed);
    const Vec2 delta = t.goal - t.pos;
    const double dist = norm(delta);
    if (dist <= u) {
      t.pos = t.goal;
    } else {
      t.pos = config.field.clamp(t.pos + (u / dist) * delta);
    }
    if (distance(t.pos, t.goal) <= eps) retarget(t, config, rng);
  }
}

StepResult step(const EnvState& state, const JointAction& action, const EnvConfig& config, Rng& target_rng) {
  if (static_cast<int>(action.size()) != static_cast<int>(state.cameras.size()))
    throw std::invalid_argument("joint action length must equal camera count");
  StepResult out;
  out.state = state;
  out.state.cameras = apply_joint_action(state.cameras, action, config.field, config.freeze_camera_position);
  advance_targets(out.state, config, target_rng);
  out.state.t = state.t + 1;

  out.obs = observe(out.state, config.field);
  out.coverage = coverage(out.state, config.field);
  const double team = team_reward(out.coverage);
  out.rewards.resize(out.state.cameras.size());
  for (int i = 0; i < out.coverage.cameras(); ++i)
    out.rewards[static_cast<std::size_t>(i)] = total_reward(team, individual_reward(out.coverage, i), config.lambda);
  return out;
}

Environment::Environment(EnvConfig config, InitMode mode, std::uint64_t seed)
    : config_(std::move(config)), mode_(mode), rng_(seed) {
  config_.validate();
}

const CentralizedObservation& Environment::reset() {
  auto r = covertrack::reset(config_, mode_, rng_);
  state_ = std::move(r.state);
  obs_ = std::move(r.obs);
  return obs_;
}

const StepResult& Environment::step(const JointAction& action) {
  last_ = covertrack::step(state_, action, config_, rng_.targets);
  state_ = last_.state;
  obs_ = last_.obs;
  return last_;
}

}  // namespace covertrack
