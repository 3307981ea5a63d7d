#include "covertrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "covertrack/rng.hpp"

namespace covertrack {

MetricsSummary summarize(std::span<const double> coverage, double wall_clock_seconds) {
  MetricsSummary s;
  s.episodes = static_cast<int>(coverage.size());
  s.wall_clock_seconds = wall_clock_seconds;
  if (coverage.empty()) {
    s.mean = s.std = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double c : coverage) sum += c;
  const double mean = sum / s.episodes;
  s.mean = 100.0 * mean;
  if (s.episodes < 2) {
    s.std = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double ss = 0.0;
  for (double c : coverage) ss += (c - mean) * (c - mean);
  s.std = 100.0 * std::sqrt(ss / (s.episodes - 1));
  return s;
}

PairedDelta paired_bootstrap(std::span<const double> a, std::span<const double> b, int resamples, double confidence,
                             std::uint64_t seed) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("paired samples must be non-empty and equal length");
  if (resamples < 1) throw std::invalid_argument("resamples must be positive");
  const int n = static_cast<int>(a.size());
  std::vector<double> d(a.size());
  double total = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    d[k] = a[k] - b[k];
    total += d[k];
  }
  Rng rng(seed, 0);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += d[static_cast<std::size_t>(rng.uniform_int(0, n - 1))];
    m = s / n;
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - confidence) / 2.0;
  auto at = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::clamp(q * (resamples - 1), 0.0, resamples - 1.0));
    return means[idx];
  };
  return {total / n, at(tail), at(1.0 - tail)};
}

}  // namespace covertrack
