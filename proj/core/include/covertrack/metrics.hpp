#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace covertrack {

/// Episode-level coverage statistics, in percent.
struct MetricsSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over episodes; NaN below 2 episodes
  int episodes = 0;
  double wall_clock_seconds = 0.0;
};

/// `coverage` holds one mean per-step covered fraction per episode.
MetricsSummary summarize(std::span<const double> coverage, double wall_clock_seconds = 0.0);

struct PairedDelta {
  double mean = 0.0;      // mean of (a - b)
  double lower = 0.0;     // bootstrap percentile bounds of the mean
  double upper = 0.0;
};

/// Percentile bootstrap of the mean paired difference a - b.
PairedDelta paired_bootstrap(std::span<const double> a, std::span<const double> b, int resamples = 10000,
                             double confidence = 0.95, std::uint64_t seed = 7);

}  // namespace covertrack
