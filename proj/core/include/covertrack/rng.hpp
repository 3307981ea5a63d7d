#pragma once

#include <cstdint>
#include <random>

namespace covertrack {

/// Seeded generator. Streams derived from the same master seed with different
/// stream ids are statistically independent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer on [lo, hi] inclusive.
  int uniform_int(int lo, int hi);
  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Named streams so that planner or policy sampling never perturbs the
/// environment's own randomness.
enum class Stream : std::uint64_t { init = 1, targets = 2, exploration = 3, replay = 4, weights = 5 };

inline Rng make_stream(std::uint64_t seed, Stream s) { return Rng(seed, static_cast<std::uint64_t>(s)); }

/// Child seed for work item `index` (episode, arm, ...) of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace covertrack
