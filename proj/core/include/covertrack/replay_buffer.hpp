#pragma once

#include <cstddef>
#include <mutex>
#include <vector>

#include <Eigen/Core>

#include "covertrack/rng.hpp"

namespace covertrack {

/// One complete episode as seen by the learner. `inputs` has (steps + 1) * n
/// columns: the ordered network input of every camera at every step,
/// including the observation after the last action.
struct EpisodeRecord {
  int steps = 0;
  int cameras = 0;
  Eigen::MatrixXd inputs;
  std::vector<int> actions;     // steps * n, step-major
  std::vector<double> rewards;  // steps * n, step-major
};

/// Fixed-capacity ring of complete episodes with uniform sampling.
/// push() may be called from several collector threads.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(EpisodeRecord episode);
  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  /// `count` distinct episodes (or every episode if fewer are stored).
  std::vector<const EpisodeRecord*> sample(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<EpisodeRecord> episodes_;
  mutable std::mutex mutex_;
};

}  // namespace covertrack
