#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "covertrack/env.hpp"
#include "covertrack/planner.hpp"
#include "covertrack/trainer.hpp"

namespace covertrack {

/// What picks the executed joint action at each step.
enum class Mode { random, marl_action, marl_random, ours_minus, ours };

Mode parse_mode(std::string_view name);
std::string_view to_string(Mode mode);
bool needs_policy(Mode mode);

struct RunConfig {
  std::string preset = "Volleyball_A";
  EnvConfig env = covertrack::preset("Volleyball_A");
  InitMode init_mode = InitMode::fix;
  Mode mode = Mode::ours;
  int episodes = 100;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency, capped by COVERTRACK_THREADS
  PlannerConfig planner;
  TrainConfig train;
  std::vector<double> lambda_sweep{0.1, 0.3, 0.5, 0.7, 0.9};

  void validate() const;
};

/// Parses `key = value` lines with dotted section keys (env.*, train.*,
/// planner.*, run.*). `#` starts a comment. env.preset is applied before all
/// other env keys regardless of position.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Applies one key/value pair on top of an existing config.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Every recognised key with its current value, in a stable order.
std::map<std::string, std::string> describe(const RunConfig& config);

}  // namespace covertrack
