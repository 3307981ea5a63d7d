// covertrack: train, evaluate and ablate the camera coverage planner.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covertrack/config.hpp"
#include "covertrack/error.hpp"
#include "covertrack/metrics.hpp"
#include "covertrack/qnetwork.hpp"
#include "covertrack/runner.hpp"
#include "covertrack/trace.hpp"
#include "covertrack/trainer.hpp"

namespace ct = covertrack;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitArtifact = 3;
constexpr int kExitNumeric = 4;

ct::RunConfig load(const std::string& path, const std::vector<std::string>& overrides) {
  ct::RunConfig cfg = ct::load_config(path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ct::ConfigError("--set expects key=value, got '" + kv + "'");
    ct::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.train.init_mode = cfg.init_mode;
  cfg.validate();
  return cfg;
}

void print_summary(const std::string& label, const ct::MetricsSummary& s) {
  std::printf("%-14s coverage %6.2f +- %5.2f %%  (%d episodes, %.1f s)\n", label.c_str(), s.mean, s.std, s.episodes,
              s.wall_clock_seconds);
}

int cmd_train(const std::string& config, const std::vector<std::string>& sets, const std::string& out,
              const std::string& curve, bool verbose) {
  const auto cfg = load(config, sets);
  const int every = std::max(1, cfg.train.episodes / 20);
  auto result = ct::train(cfg.env, cfg.train, [&](const ct::CurvePoint& p) {
    if (verbose && (p.episode % every == 0 || p.episode + 1 == cfg.train.episodes))
      std::printf("episode %6d  coverage %.3f  loss %.5f  epsilon %.3f\n", p.episode, p.mean_coverage, p.loss,
                  p.epsilon);
  });
  result.net.save(out);
  if (!curve.empty()) ct::write_curve_csv(curve, result.curve);
  std::printf("saved checkpoint %s (%zu parameters)\n", out.c_str(), result.net.parameter_count());
  return 0;
}

int cmd_eval(const std::string& config, const std::vector<std::string>& sets, const std::string& ckpt,
             const std::string& mode_name, int episodes, long long seed, const std::string& trace_dir,
             const std::string& episodes_csv) {
  auto cfg = load(config, sets);
  if (!mode_name.empty()) cfg.mode = ct::parse_mode(mode_name);
  if (episodes > 0) cfg.episodes = episodes;
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.validate();

  std::optional<ct::QNetwork> net;
  if (ct::needs_policy(cfg.mode)) {
    if (ckpt.empty()) throw ct::ArtifactError("mode " + std::string(ct::to_string(cfg.mode)) + " requires --ckpt");
    net = ct::QNetwork::load(ckpt, cfg.env.cameras, cfg.env.targets);
  }
  const auto result = ct::run_mode(cfg, cfg.mode, net ? &*net : nullptr, !trace_dir.empty());
  if (!trace_dir.empty()) ct::write_traces(trace_dir, result);
  if (!episodes_csv.empty()) {
    std::ofstream os(episodes_csv, std::ios::trunc);
    if (!os) throw ct::ArtifactError("cannot write " + episodes_csv);
    os.precision(17);
    os << "episode,coverage\n";
    for (std::size_t k = 0; k < result.episode_coverage.size(); ++k) os << k << ',' << result.episode_coverage[k] << '\n';
  }
  print_summary(std::string(ct::to_string(cfg.mode)), result.summary);
  return 0;
}

int cmd_ablate(const std::string& config, const std::vector<std::string>& sets, const std::string& factor_name,
               const std::string& ckpt, const std::string& mode_name, const std::string& out) {
  auto cfg = load(config, sets);
  if (!mode_name.empty()) cfg.mode = ct::parse_mode(mode_name);
  const auto factor = ct::parse_factor(factor_name);
  std::optional<ct::QNetwork> net;
  if (!ckpt.empty()) net = ct::QNetwork::load(ckpt, cfg.env.cameras, cfg.env.targets);
  const auto arms = ct::ablate(cfg, factor, net ? &*net : nullptr,
                               [](const std::string& msg) { std::fprintf(stderr, "[ablate] %s\n", msg.c_str()); });
  for (const auto& a : arms) print_summary(std::string(ct::to_string(factor)) + "=" + a.arm, a.result.summary);
  if (!out.empty()) ct::write_ablation_csv(out, factor, arms);
  return 0;
}

// Checks every record for internal consistency and reports the run summary
// recomputed from the traces alone.
int cmd_trace_check(const std::string& dir) {
  const auto traces = ct::read_trace_dir(dir);
  if (traces.empty()) throw ct::ArtifactError("no episode traces in " + dir);
  std::vector<double> coverage;
  int bad = 0;
  for (const auto& [episode, records] : traces) {
    double sum = 0.0;
    for (const auto& r : records) {
      const double recomputed = ct::team_reward(r.coverage);
      if (std::abs(recomputed - r.coverage_fraction) > 1e-12) {
        std::fprintf(stderr, "episode %d step %d: coverage_fraction %.17g != %.17g\n", episode, r.step,
                     r.coverage_fraction, recomputed);
        ++bad;
      }
      sum += r.coverage_fraction;
    }
    if (!records.empty()) coverage.push_back(sum / static_cast<double>(records.size()));
  }
  print_summary("traces", ct::summarize(coverage));
  if (bad > 0) throw ct::ArtifactError(std::to_string(bad) + " inconsistent trace records");
  return 0;
}

int cmd_plot_data(const std::string& dir, const std::string& out) {
  const auto traces = ct::read_trace_dir(dir);
  std::ofstream os(out, std::ios::trunc);
  if (!os) throw ct::ArtifactError("cannot write " + out);
  os.precision(17);
  os << "episode,step,coverage_fraction,camera,reward\n";
  for (const auto& [episode, records] : traces)
    for (const auto& r : records)
      for (std::size_t i = 0; i < r.rewards.size(); ++i)
        os << episode << ',' << r.step << ',' << r.coverage_fraction << ',' << i << ',' << r.rewards[i] << '\n';
  std::printf("wrote %zu episodes to %s\n", traces.size(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-camera target coverage: recurrent Q-learning with policy-pruned tree search"};
  app.require_subcommand(1);

  std::string config, out, ckpt, mode, trace, factor, curve, episodes_csv;
  std::vector<std::string> sets;
  int episodes = 0;
  long long seed = -1;
  bool quiet = false;

  auto* train = app.add_subcommand("train", "Train the shared Q-network and write a checkpoint");
  train->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  train->add_option("--out", out, "Checkpoint path")->required();
  train->add_option("--curve", curve, "Learning curve CSV (episode, mean_coverage, loss, epsilon)");
  train->add_option("--set", sets, "Override a config key, key=value");
  train->add_flag("--quiet", quiet, "No per-episode progress");

  auto* eval = app.add_subcommand("eval", "Evaluate one action-selection mode");
  eval->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  eval->add_option("--ckpt", ckpt, "Checkpoint (not needed for --mode random)");
  eval->add_option("--mode", mode, "random | marl_action | marl_random | ours_minus | ours");
  eval->add_option("--episodes", episodes, "Evaluation episodes")->check(CLI::PositiveNumber);
  eval->add_option("--seed", seed, "Master evaluation seed")->check(CLI::NonNegativeNumber);
  eval->add_option("--trace", trace, "Directory for per-episode JSONL traces");
  eval->add_option("--episodes-csv", episodes_csv, "Per-episode coverage CSV");
  eval->add_option("--set", sets, "Override a config key, key=value");

  auto* abl = app.add_subcommand("ablate", "Sweep one factor with paired evaluation seeds");
  abl->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  abl->add_option("--factor", factor, "init | freeze | vinit | lambda")->required();
  abl->add_option("--ckpt", ckpt, "Policy for the vinit factor (trained if omitted)");
  abl->add_option("--mode", mode, "Evaluation mode for every arm");
  abl->add_option("--out", out, "Ablation CSV");
  abl->add_option("--set", sets, "Override a config key, key=value");

  auto* check = app.add_subcommand("trace-check", "Validate a trace directory and recompute its summary");
  check->add_option("--trace", trace, "Trace directory")->required();

  auto* plot = app.add_subcommand("plot-data", "Flatten traces into a tidy CSV");
  plot->add_option("--trace", trace, "Trace directory")->required();
  plot->add_option("--out", out, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train) return cmd_train(config, sets, out, curve, !quiet);
    if (*eval) return cmd_eval(config, sets, ckpt, mode, episodes, seed, trace, episodes_csv);
    if (*abl) return cmd_ablate(config, sets, factor, ckpt, mode, out);
    if (*check) return cmd_trace_check(trace);
    if (*plot) return cmd_plot_data(trace, out);
  } catch (const ct::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ct::ArtifactError& e) {
    std::fprintf(stderr, "artifact error: %s\n", e.what());
    return kExitArtifact;
  } catch (const ct::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  }
  return 0;
}
