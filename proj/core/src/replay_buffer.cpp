#include "covertrack/replay_buffer.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace covertrack {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  episodes_.reserve(std::min<std::size_t>(capacity, 1024));
}

void ReplayBuffer::push(EpisodeRecord episode) {
  if (episode.steps < 1 || episode.inputs.cols() != static_cast<Eigen::Index>(episode.steps + 1) * episode.cameras ||
      episode.actions.size() != static_cast<std::size_t>(episode.steps * episode.cameras) ||
      episode.rewards.size() != episode.actions.size())
    throw std::invalid_argument("incomplete episode record");
  std::lock_guard lock(mutex_);
  if (episodes_.size() < capacity_) {
    episodes_.push_back(std::move(episode));
  } else {
    episodes_[next_] = std::move(episode);
  }
  next_ = (next_ + 1) % capacity_;
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard lock(mutex_);
  return episodes_.size();
}

std::vector<const EpisodeRecord*> ReplayBuffer::sample(std::size_t count, Rng& rng) const {
  std::lock_guard lock(mutex_);
  std::vector<std::size_t> idx(episodes_.size());
  std::iota(idx.begin(), idx.end(), 0);
  count = std::min(count, idx.size());
  // Partial Fisher-Yates.
  for (std::size_t k = 0; k < count; ++k) {
    const auto pick = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(k), static_cast<int>(idx.size() - 1)));
    std::swap(idx[k], idx[pick]);
  }
  std::vector<const EpisodeRecord*> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(&episodes_[idx[k]]);
  return out;
}

}  // namespace covertrack
