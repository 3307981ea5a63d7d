#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "covertrack/config.hpp"
#include "covertrack/metrics.hpp"
#include "covertrack/qnetwork.hpp"
#include "covertrack/trace.hpp"

namespace covertrack {

struct EpisodeOutcome {
  double coverage = 0.0;  // mean per-step covered fraction
  std::vector<TraceRecord> trace;
};

/// Plays evaluation episode `index` (environment seed derived from
/// config.seed and the index, so every mode sees the same episodes).
EpisodeOutcome run_episode(const RunConfig& config, Mode mode, const QNetwork* policy, int index, bool keep_trace);

struct RunResult {
  Mode mode = Mode::random;
  MetricsSummary summary;
  std::vector<double> episode_coverage;  // sorted by episode index
  std::vector<std::vector<TraceRecord>> traces;  // empty unless requested
};

/// Worker count: config.threads (or hardware concurrency) capped by the
/// COVERTRACK_THREADS environment variable.
int worker_count(const RunConfig& config);

/// Evaluates `config.episodes` greedy episodes under one mode. Episodes run in
/// parallel; results are independent of the worker count.
RunResult run_mode(const RunConfig& config, Mode mode, const QNetwork* policy, bool keep_traces = false);

/// Writes one trace file per episode into `dir` (created if missing).
void write_traces(const std::filesystem::path& dir, const RunResult& result);

enum class Factor { init, freeze, vinit, lambda };
Factor parse_factor(std::string_view name);
std::string_view to_string(Factor factor);

struct ArmResult {
  std::string arm;
  RunConfig config;
  RunResult result;
};

using Progress = std::function<void(const std::string&)>;

/// Sweeps one factor with every other setting and all evaluation seeds held
/// fixed. Factors that change training (init, freeze, lambda) train one policy
/// per arm from the same training seed; vinit reuses `policy` when given.
std::vector<ArmResult> ablate(const RunConfig& config, Factor factor, const QNetwork* policy = nullptr,
                              const Progress& progress = {});

void write_ablation_csv(const std::filesystem::path& path, Factor factor, const std::vector<ArmResult>& arms);

}  // namespace covertrack
