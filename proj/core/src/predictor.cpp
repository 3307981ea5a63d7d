#include "covertrack/predictor.hpp"

#include <stdexcept>

namespace covertrack {

int EstimatedState::known_targets() const {
  int k = 0;
  for (const auto& t : targets) k += t.has_value() ? 1 : 0;
  return k;
}

EstimatedState EstimatedState::empty(int cameras, int targets) {
  EstimatedState e;
  e.cameras.resize(static_cast<std::size_t>(cameras));
  e.targets.resize(static_cast<std::size_t>(targets));
  return e;
}

EstimatedState estimate_current(const CentralizedObservation& obs, const FieldSpec& field) {
  const int n = obs.num_cameras();
  const int m = obs.num_targets();
  EstimatedState est;
  est.cameras.reserve(static_cast<std::size_t>(n));
  for (const auto& c : obs.cameras) est.cameras.push_back(c.pose);

  est.targets.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    Vec2 sum;
    int count = 0;
    for (const auto& c : obs.cameras) {
      const auto& rel = c.targets[static_cast<std::size_t>(j)];
      if (!rel.observed()) continue;
      sum = sum + reconstruct_position(c.pose, rel);
      ++count;
    }
    if (count > 0) est.targets[static_cast<std::size_t>(j)] = field.clamp((1.0 / count) * sum);
  }
  return est;
}

std::vector<Freshness> classify(const EstimatedState& prev, const EstimatedState& cur) {
  if (prev.targets.size() != cur.targets.size()) throw std::invalid_argument("estimates disagree on target count");
  std::vector<Freshness> out(cur.targets.size());
  for (std::size_t j = 0; j < cur.targets.size(); ++j) {
    const bool now = cur.targets[j].has_value();
    const bool before = prev.targets[j].has_value();
    out[j] = now && before ? Freshness::observed_both
             : now         ? Freshness::observed_t_only
             : before      ? Freshness::observed_prev_only
                           : Freshness::unknown;
  }
  return out;
}

std::vector<std::optional<Vec2>> extrapolate(const EstimatedState& prev, const EstimatedState& cur,
                                             int steps_ahead, const FieldSpec& field) {
  if (steps_ahead < 1) throw std::invalid_argument("steps_ahead must be >= 1");
  const auto fresh = classify(prev, cur);
  std::vector<std::optional<Vec2>> out(cur.targets.size());
  const double k = steps_ahead;
  for (std::size_t j = 0; j < out.size(); ++j) {
    switch (fresh[j]) {
      case Freshness::observed_both: {
        const Vec2 now = *cur.targets[j];
        const Vec2 velocity = now - *prev.targets[j];
        out[j] = field.clamp(now + k * velocity);
        break;
      }
      case Freshness::observed_t_only: out[j] = field.clamp(*cur.targets[j]); break;
      case Freshness::observed_prev_only: out[j] = field.clamp(*prev.targets[j]); break;
      case Freshness::unknown: break;
    }
  }
  return out;
}

std::vector<std::optional<Vec2>> hold_current(const EstimatedState& cur) { return cur.targets; }

}  // namespace covertrack
