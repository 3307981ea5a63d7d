#include "covertrack/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "covertrack/error.hpp"
#include "covertrack/planner.hpp"
#include "covertrack/predictor.hpp"

namespace covertrack {

EpisodeOutcome run_episode(const RunConfig& config, Mode mode, const QNetwork* policy, int index, bool keep_trace) {
  if (needs_policy(mode) && policy == nullptr)
    throw ArtifactError("mode " + std::string(to_string(mode)) + " needs a trained checkpoint");
  const EnvConfig& env = config.env;
  const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(index));
  Environment world(env, config.init_mode, seed);
  Rng explore = make_stream(seed, Stream::exploration);

  PlannerConfig planner = config.planner;
  planner.predict_motion = mode == Mode::ours;

  const int n = env.cameras;
  const CentralizedObservation* obs = &world.reset();
  HiddenState hidden = policy ? policy->zero_hidden(n) : HiddenState();
  EstimatedState prev = EstimatedState::empty(n, env.targets);

  EpisodeOutcome out;
  if (keep_trace) out.trace.reserve(static_cast<std::size_t>(env.episode_length));
  double sum = 0.0;
  for (int t = 0; t < env.episode_length; ++t) {
    JointAction action;
    if (mode == Mode::random) {
      action.resize(static_cast<std::size_t>(n));
      for (auto& a : action) a = CameraAction::from_index(explore.uniform_int(0, CameraAction::kCount - 1));
    } else {
      ActResult net = act(*policy, *obs, env.field, hidden, 0.0, explore);
      switch (mode) {
        case Mode::marl_action: action = net.action; break;
        case Mode::marl_random: {
          const auto cands = candidate_actions(net.action);
          action = cands[static_cast<std::size_t>(explore.uniform_int(0, static_cast<int>(cands.size()) - 1))];
          break;
        }
        case Mode::ours:
        case Mode::ours_minus: {
          EstimatedState cur = estimate_current(*obs, env.field);
          action = plan(prev, cur, *policy, net.hidden, net.action, net.q, env, planner).action;
          prev = std::move(cur);
          break;
        }
        case Mode::random: break;
      }
      hidden = std::move(net.hidden);
    }

    const StepResult& s = world.step(action);
    const double frac = team_reward(s.coverage);
    sum += frac;
    if (keep_trace) {
      TraceRecord rec;
      rec.step = s.state.t;
      rec.cameras = s.state.cameras;
      rec.targets.reserve(s.state.targets.size());
      for (const auto& tg : s.state.targets) rec.targets.push_back(tg.pos);
      rec.coverage = s.coverage;
      rec.action = action;
      rec.rewards = s.rewards;
      rec.coverage_fraction = frac;
      out.trace.push_back(std::move(rec));
    }
    obs = &s.obs;
  }
  out.coverage = sum / env.episode_length;
  return out;
}

int worker_count(const RunConfig& config) {
  int workers = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("COVERTRACK_THREADS")) {
    const int c = std::atoi(cap);
    if (c > 0) workers = std::min(workers, c);
  }
  return std::max(1, workers);
}

RunResult run_mode(const RunConfig& config, Mode mode, const QNetwork* policy, bool keep_traces) {
  config.validate();
  if (needs_policy(mode) && policy == nullptr)
    throw ArtifactError("mode " + std::string(to_string(mode)) + " needs a trained checkpoint");
  if (policy && (policy->shape().cameras != config.env.cameras || policy->shape().targets != config.env.targets))
    throw ArtifactError("checkpoint shape does not match the environment");

  const auto start = std::chrono::steady_clock::now();
  const int episodes = config.episodes;
  std::vector<EpisodeOutcome> outcomes(static_cast<std::size_t>(episodes));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (int k = next++; k < episodes; k = next++) {
      try {
        outcomes[static_cast<std::size_t>(k)] = run_episode(config, mode, policy, k, keep_traces);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = episodes;
      }
    }
  };
  const int workers = std::min(worker_count(config), episodes);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  RunResult result;
  result.mode = mode;
  result.episode_coverage.reserve(outcomes.size());
  for (auto& o : outcomes) {
    result.episode_coverage.push_back(o.coverage);
    if (keep_traces) result.traces.push_back(std::move(o.trace));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.summary = summarize(result.episode_coverage, secs);
  return result;
}

void write_traces(const std::filesystem::path& dir, const RunResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ArtifactError("cannot create trace directory " + dir.string() + ": " + ec.message());
  for (std::size_t k = 0; k < result.traces.size(); ++k)
    emit_trace(episode_trace_path(dir, static_cast<int>(k)), result.traces[k]);
}

Factor parse_factor(std::string_view name) {
  if (name == "init") return Factor::init;
  if (name == "freeze") return Factor::freeze;
  if (name == "vinit") return Factor::vinit;
  if (name == "lambda") return Factor::lambda;
  throw ConfigError("unknown ablation factor '" + std::string(name) + "' (expected init, freeze, vinit or lambda)");
}

std::string_view to_string(Factor factor) {
  switch (factor) {
    case Factor::init: return "init";
    case Factor::freeze: return "freeze";
    case Factor::vinit: return "vinit";
    case Factor::lambda: return "lambda";
  }
  return "?";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::vector<ArmResult> ablate(const RunConfig& config, Factor factor, const QNetwork* policy,
                              const Progress& progress) {
  config.validate();
  std::vector<ArmResult> arms;
  switch (factor) {
    case Factor::init:
      for (InitMode m : {InitMode::random, InitMode::part, InitMode::fix}) {
        ArmResult a{std::string(to_string(m)), config, {}};
        a.config.init_mode = m;
        a.config.train.init_mode = m;
        arms.push_back(std::move(a));
      }
      break;
    case Factor::freeze:
      for (bool frozen : {true, false}) {
        ArmResult a{frozen ? "on" : "off", config, {}};
        a.config.env.freeze_camera_position = frozen;
        arms.push_back(std::move(a));
      }
      break;
    case Factor::vinit:
      for (bool disabled : {true, false}) {
        ArmResult a{disabled ? "on" : "off", config, {}};
        a.config.planner.init_values = !disabled;
        arms.push_back(std::move(a));
      }
      break;
    case Factor::lambda:
      for (double l : config.lambda_sweep) {
        ArmResult a{fmt(l), config, {}};
        a.config.env.lambda = l;
        arms.push_back(std::move(a));
      }
      break;
  }

  const bool retrain = factor != Factor::vinit;
  std::optional<QNetwork> shared;
  if (!retrain && needs_policy(config.mode)) {
    if (policy) {
      shared = *policy;
    } else {
      if (progress) progress("training shared policy");
      shared = train(config.env, config.train).net;
    }
  }

  for (auto& a : arms) {
    std::optional<QNetwork> own;
    const QNetwork* use = shared ? &*shared : nullptr;
    if (retrain && needs_policy(config.mode)) {
      if (progress) progress("training arm " + std::string(to_string(factor)) + "=" + a.arm);
      own = train(a.config.env, a.config.train).net;
      use = &*own;
    }
    if (progress) progress("evaluating arm " + std::string(to_string(factor)) + "=" + a.arm);
    a.result = run_mode(a.config, config.mode, use);
  }
  return arms;
}

void write_ablation_csv(const std::filesystem::path& path, Factor factor, const std::vector<ArmResult>& arms) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ArtifactError("cannot write ablation table: " + path.string());
  os.precision(17);
  os << "factor,arm,mode,mean_coverage_pct,std_coverage_pct,episodes,wall_clock_s\n";
  for (const auto& a : arms) {
    const auto& s = a.result.summary;
    os << to_string(factor) << ',' << a.arm << ',' << to_string(a.result.mode) << ',' << s.mean << ',' << s.std << ','
       << s.episodes << ',' << s.wall_clock_seconds << '\n';
  }
}

}  // namespace covertrack
