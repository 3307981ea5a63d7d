#include "covertrack/trace.hpp"

#include <cstdio>
#include <fstream>
#include <regex>
#include <string>

#include <nlohmann/json.hpp>

#include "covertrack/error.hpp"

namespace covertrack {

namespace {

using nlohmann::json;

json to_json(const TraceRecord& r) {
  json j;
  j["step"] = r.step;
  json cams = json::array();
  for (const auto& c : r.cameras) cams.push_back({{"s", c.s}, {"alpha", c.alpha}, {"x", c.pos.x}, {"y", c.pos.y}});
  j["cameras"] = std::move(cams);
  json tgts = json::array();
  for (const auto& t : r.targets) tgts.push_back({t.x, t.y});
  j["targets"] = std::move(tgts);
  json cov = json::array();
  for (int i = 0; i < r.coverage.cameras(); ++i) {
    json row = json::array();
    for (int k = 0; k < r.coverage.targets(); ++k) row.push_back(r.coverage(i, k) ? 1 : 0);
    cov.push_back(std::move(row));
  }
  j["coverage"] = std::move(cov);
  json act = json::array();
  for (const auto& a : r.action) act.push_back({static_cast<int>(a.move), static_cast<int>(a.rotate)});
  j["action"] = std::move(act);
  j["rewards"] = r.rewards;
  j["coverage_fraction"] = r.coverage_fraction;
  return j;
}

TraceRecord from_json(const json& j) {
  TraceRecord r;
  r.step = j.at("step").get<int>();
  for (const auto& c : j.at("cameras")) {
    CameraPose p;
    p.s = c.at("s").get<double>();
    p.alpha = c.at("alpha").get<double>();
    p.pos = {c.at("x").get<double>(), c.at("y").get<double>()};
    r.cameras.push_back(p);
  }
  for (const auto& t : j.at("targets")) r.targets.push_back({t.at(0).get<double>(), t.at(1).get<double>()});
  const auto& cov = j.at("coverage");
  const int n = static_cast<int>(cov.size());
  const int m = n > 0 ? static_cast<int>(cov.at(0).size()) : 0;
  r.coverage = CoverageMatrix(n, m);
  for (int i = 0; i < n; ++i) {
    const auto& row = cov.at(static_cast<std::size_t>(i));
    if (static_cast<int>(row.size()) != m) throw std::runtime_error("ragged coverage matrix");
    for (int k = 0; k < m; ++k) {
      const int v = row.at(static_cast<std::size_t>(k)).get<int>();
      if (v != 0 && v != 1) throw std::runtime_error("coverage entries must be 0 or 1");
      r.coverage.set(i, k, v == 1);
    }
  }
  for (const auto& a : j.at("action")) {
    const int move = a.at(0).get<int>();
    const int rotate = a.at(1).get<int>();
    if (move < -1 || move > 1 || rotate < -1 || rotate > 1) throw std::runtime_error("action components must be -1, 0 or 1");
    r.action.push_back({static_cast<std::int8_t>(move), static_cast<std::int8_t>(rotate)});
  }
  r.rewards = j.at("rewards").get<std::vector<double>>();
  r.coverage_fraction = j.at("coverage_fraction").get<double>();
  return r;
}

}  // namespace

void emit_trace(const std::filesystem::path& path, const std::vector<TraceRecord>& records) {
  std::ofstream os(path, std::ios::trunc | std::ios::binary);
  if (!os) throw ArtifactError("cannot write trace: " + path.string());
  for (const auto& r : records) os << to_json(r).dump() << '\n';
  if (!os) throw ArtifactError("failed writing trace: " + path.string());
}

std::vector<TraceRecord> read_trace(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ArtifactError("cannot read trace: " + path.string());
  std::vector<TraceRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw ArtifactError(path.string() + ":" + std::to_string(line_no) + ": malformed trace record: " + e.what());
    }
  }
  return out;
}

std::filesystem::path episode_trace_path(const std::filesystem::path& dir, int episode) {
  char name[32];
  std::snprintf(name, sizeof(name), "episode_%05d.jsonl", episode);
  return dir / name;
}

std::map<int, std::vector<TraceRecord>> read_trace_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ArtifactError("trace directory not found: " + dir.string());
  static const std::regex pattern(R"(episode_(\d+)\.jsonl)");
  std::map<int, std::vector<TraceRecord>> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, m, pattern)) continue;
    out[std::stoi(m[1].str())] = read_trace(entry.path());
  }
  return out;
}

}  // namespace covertrack
