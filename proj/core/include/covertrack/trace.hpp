#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "covertrack/env.hpp"
#include "covertrack/geometry.hpp"

namespace covertrack {

/// Everything observable about one environment step.
struct TraceRecord {
  int step = 0;
  std::vector<CameraPose> cameras;
  std::vector<Vec2> targets;
  CoverageMatrix coverage;
  JointAction action;
  std::vector<double> rewards;
  double coverage_fraction = 0.0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// One JSON object per line. Doubles are written in shortest round-trip form
/// so read_trace(emit_trace(x)) == x exactly.
void emit_trace(const std::filesystem::path& path, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_trace(const std::filesystem::path& path);

/// File name for episode k inside a trace directory: episode_00042.jsonl.
std::filesystem::path episode_trace_path(const std::filesystem::path& dir, int episode);
/// All episode traces of a directory, keyed by episode index.
std::map<int, std::vector<TraceRecord>> read_trace_dir(const std::filesystem::path& dir);

}  // namespace covertrack
