#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "covertrack/env.hpp"
#include "covertrack/qnetwork.hpp"
#include "covertrack/replay_buffer.hpp"

namespace covertrack {

struct TrainConfig {
  int episodes = 2000;
  int hidden = 128;
  int batch_size = 32;
  int buffer_capacity = 5000;
  int target_sync = 200;  // updates between hard target-network copies
  int updates_per_episode = 1;
  double learning_rate = 5e-4;
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_anneal_episodes = 1000;
  double grad_clip = 10.0;  // global L2 norm, <= 0 disables
  InitMode init_mode = InitMode::fix;
  std::uint64_t seed = 1;

  void validate() const;
  double epsilon_at(int episode) const;
};

struct CurvePoint {
  int episode = 0;
  double mean_coverage = 0.0;
  double loss = 0.0;  // mean loss of the updates after this episode, NaN before learning starts
  double epsilon = 0.0;

  friend bool operator==(const CurvePoint& a, const CurvePoint& b);
};

struct TrainResult {
  QNetwork net;
  std::vector<CurvePoint> curve;
};

/// Adam on a flat parameter vector.
class Adam {
 public:
  Adam(std::size_t size, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

/// TD targets and loss gradient for one batch of equal-length episodes.
/// Returns the mean squared TD error; `grad` receives its gradient.
double td_loss_and_gradient(const QNetwork& online, const QNetwork& target,
                            const std::vector<const EpisodeRecord*>& batch, double gamma, ParamVector& grad);

/// Plays one episode with the given policy and epsilon, returning the
/// learner's record and the episode's mean team coverage.
std::pair<EpisodeRecord, double> collect_episode(const QNetwork& net, const EnvConfig& env, InitMode mode,
                                                 std::uint64_t seed, double epsilon);

/// Independent recurrent Q-learning with one network shared by all cameras.
/// Deterministic for a given (env, config) pair.
TrainResult train(const EnvConfig& env, const TrainConfig& config,
                  const std::function<void(const CurvePoint&)>& on_episode = {});

void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve);

}  // namespace covertrack
