#include "covertrack/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "covertrack/error.hpp"

namespace covertrack {

Mode parse_mode(std::string_view name) {
  if (name == "random") return Mode::random;
  if (name == "marl_action") return Mode::marl_action;
  if (name == "marl_random") return Mode::marl_random;
  if (name == "ours_minus") return Mode::ours_minus;
  if (name == "ours") return Mode::ours;
  throw ConfigError("unknown mode '" + std::string(name) +
                    "' (expected random, marl_action, marl_random, ours_minus or ours)");
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::random: return "random";
    case Mode::marl_action: return "marl_action";
    case Mode::marl_random: return "marl_random";
    case Mode::ours_minus: return "ours_minus";
    case Mode::ours: return "ours";
  }
  return "?";
}

bool needs_policy(Mode mode) { return mode != Mode::random; }

void RunConfig::validate() const {
  env.validate();
  train.validate();
  planner.validate();
  if (episodes < 1) throw ConfigError("run.episodes must be positive");
  if (threads < 0) throw ConfigError("run.threads must be >= 0");
  for (double l : lambda_sweep)
    if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("run.lambda_sweep values must lie in [0, 1]");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(std::string_view key) { return "config key '" + std::string(key) + "'"; }

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(where(key) + ": expected a number, got '" + std::string(v) + "'");
  return out;
}

long long to_int(std::string_view key, std::string_view v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(where(key) + ": expected an integer, got '" + std::string(v) + "'");
  return out;
}

int to_small_int(std::string_view key, std::string_view v) {
  const long long x = to_int(key, v);
  if (x < -1'000'000'000LL || x > 1'000'000'000LL) throw ConfigError(where(key) + ": value out of range");
  return static_cast<int>(x);
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError(where(key) + ": expected a boolean, got '" + std::string(v) + "'");
}

std::vector<double> to_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(to_double(key, trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigError(where(key) + ": empty list");
  return out;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

template <class M>
Field dbl(M member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) { std::invoke(member, c) = to_double(k, v); },
          [member](const RunConfig& c) { return fmt_double(std::invoke(member, c)); }};
}

template <class M>
Field integer(M member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) { std::invoke(member, c) = to_small_int(k, v); },
          [member](const RunConfig& c) { return std::to_string(std::invoke(member, c)); }};
}

template <class M>
Field boolean(M member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) { std::invoke(member, c) = to_bool(k, v); },
          [member](const RunConfig& c) { return std::string(std::invoke(member, c) ? "true" : "false"); }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = [] {
    std::map<std::string, Field, std::less<>> t;
    t["env.preset"] = {[](RunConfig& c, std::string_view, std::string_view v) {
                         c.env = preset(v);
                         c.preset = std::string(v);
                       },
                       [](const RunConfig& c) { return c.preset; }};
    t["env.width"] = dbl([](auto& c) -> auto& { return c.env.field.width; });
    t["env.height"] = dbl([](auto& c) -> auto& { return c.env.field.height; });
    t["env.vis_distance"] = dbl([](auto& c) -> auto& { return c.env.field.vis_distance; });
    t["env.vis_half_angle"] = dbl([](auto& c) -> auto& { return c.env.field.vis_half_angle; });
    t["env.move_step"] = dbl([](auto& c) -> auto& { return c.env.field.move_step; });
    t["env.rotate_step"] = dbl([](auto& c) -> auto& { return c.env.field.rotate_step; });
    t["env.cameras"] = integer([](auto& c) -> auto& { return c.env.cameras; });
    t["env.targets"] = integer([](auto& c) -> auto& { return c.env.targets; });
    t["env.speed_low"] = dbl([](auto& c) -> auto& { return c.env.speed_low; });
    t["env.speed_high"] = dbl([](auto& c) -> auto& { return c.env.speed_high; });
    t["env.speed_jitter"] = dbl([](auto& c) -> auto& { return c.env.speed_jitter; });
    t["env.goal_reach_eps"] = dbl([](auto& c) -> auto& { return c.env.goal_reach_eps; });
    t["env.episode_length"] = integer([](auto& c) -> auto& { return c.env.episode_length; });
    t["env.freeze_camera_position"] = boolean([](auto& c) -> auto& { return c.env.freeze_camera_position; });
    t["env.static_targets"] = boolean([](auto& c) -> auto& { return c.env.static_targets; });
    t["env.init_mode"] = {[](RunConfig& c, std::string_view, std::string_view v) {
                            c.init_mode = parse_init_mode(v);
                            c.train.init_mode = c.init_mode;
                          },
                          [](const RunConfig& c) { return std::string(to_string(c.init_mode)); }};

    t["train.episodes"] = integer([](auto& c) -> auto& { return c.train.episodes; });
    t["train.hidden"] = integer([](auto& c) -> auto& { return c.train.hidden; });
    t["train.batch_size"] = integer([](auto& c) -> auto& { return c.train.batch_size; });
    t["train.buffer_capacity"] = integer([](auto& c) -> auto& { return c.train.buffer_capacity; });
    t["train.target_sync"] = integer([](auto& c) -> auto& { return c.train.target_sync; });
    t["train.updates_per_episode"] = integer([](auto& c) -> auto& { return c.train.updates_per_episode; });
    t["train.learning_rate"] = dbl([](auto& c) -> auto& { return c.train.learning_rate; });
    t["train.gamma"] = dbl([](auto& c) -> auto& { return c.train.gamma; });
    t["train.lambda"] = dbl([](auto& c) -> auto& { return c.env.lambda; });
    t["train.epsilon_start"] = dbl([](auto& c) -> auto& { return c.train.epsilon_start; });
    t["train.epsilon_end"] = dbl([](auto& c) -> auto& { return c.train.epsilon_end; });
    t["train.epsilon_anneal_episodes"] = integer([](auto& c) -> auto& { return c.train.epsilon_anneal_episodes; });
    t["train.grad_clip"] = dbl([](auto& c) -> auto& { return c.train.grad_clip; });
    t["train.seed"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
                         c.train.seed = static_cast<std::uint64_t>(to_int(k, v));
                       },
                       [](const RunConfig& c) { return std::to_string(c.train.seed); }};

    t["planner.depth"] = integer([](auto& c) -> auto& { return c.planner.depth; });
    t["planner.simulations"] = integer([](auto& c) -> auto& { return c.planner.simulations; });
    t["planner.exploration"] = dbl([](auto& c) -> auto& { return c.planner.exploration; });
    t["planner.init_values"] = boolean([](auto& c) -> auto& { return c.planner.init_values; });

    t["run.mode"] = {[](RunConfig& c, std::string_view, std::string_view v) { c.mode = parse_mode(v); },
                     [](const RunConfig& c) { return std::string(to_string(c.mode)); }};
    t["run.episodes"] = integer([](auto& c) -> auto& { return c.episodes; });
    t["run.seed"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
                       c.seed = static_cast<std::uint64_t>(to_int(k, v));
                     },
                     [](const RunConfig& c) { return std::to_string(c.seed); }};
    t["run.threads"] = integer([](auto& c) -> auto& { return c.threads; });
    t["run.lambda_sweep"] = {[](RunConfig& c, std::string_view k, std::string_view v) { c.lambda_sweep = to_list(k, v); },
                             [](const RunConfig& c) {
                               std::string s;
                               for (std::size_t i = 0; i < c.lambda_sweep.size(); ++i)
                                 s += (i ? "," : "") + fmt_double(c.lambda_sweep[i]);
                               return s;
                             }};
    return t;
  }();
  return table;
}

}  // namespace

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second.set(config, key, trim(value));
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::vector<std::pair<std::string, std::string>> entries;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    entries.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  for (const auto& [k, v] : entries)
    if (k == "env.preset") apply_setting(cfg, k, v);
  for (const auto& [k, v] : entries)
    if (k != "env.preset") apply_setting(cfg, k, v);
  cfg.train.init_mode = cfg.init_mode;
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file: " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::map<std::string, std::string> describe(const RunConfig& config) {
  std::map<std::string, std::string> out;
  for (const auto& [k, f] : fields()) out[k] = f.get(config);
  return out;
}

}  // namespace covertrack
