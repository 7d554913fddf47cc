#include "nev/io.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nev {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buffer, ptr);
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out = "t,x,y\n";
  for (const auto& s : trajectory.samples) {
    out += format_double(s.t);
    out += ',';
    out += format_double(s.x);
    out += ',';
    out += format_double(s.y);
    out += '\n';
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

double parse_field(std::string_view text, const std::string& context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error("bad number in " + context + ": '" +
                             std::string(text) + "'");
  }
  return v;
}

}  // namespace

void emit_trajectory(const Trajectory& trajectory,
                     const std::filesystem::path& path) {
  write_file(path, trajectory_csv(trajectory));
}

Trajectory parse_trajectory_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "t,x,y") {
    throw std::runtime_error("trajectory CSV must start with header t,x,y");
  }
  Trajectory traj;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t c1 = line.find(',');
    size_t c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw std::runtime_error("trajectory CSV row needs 3 columns");
    }
    GameState s;
    s.t = parse_field(std::string_view(line).substr(0, c1), "trajectory CSV");
    s.x = parse_field(std::string_view(line).substr(c1 + 1, c2 - c1 - 1),
                      "trajectory CSV");
    s.y = parse_field(std::string_view(line).substr(c2 + 1), "trajectory CSV");
    traj.samples.push_back(s);
  }
  if (traj.samples.size() > 1) {
    traj.step_size = traj.samples[1].t - traj.samples[0].t;
  }
  return traj;
}

Trajectory parse_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_trajectory_csv(buffer.str());
}

namespace {

ordered_json report_to_json(const EquilibriumReport& r) {
  ordered_json j;
  j["point"] = {{"x", r.point.x()}, {"y", r.point.y()}};
  j["jacobian"] = {{r.jacobian(0, 0), r.jacobian(0, 1)},
                   {r.jacobian(1, 0), r.jacobian(1, 1)}};
  j["det"] = r.det;
  j["trace"] = r.trace;
  j["eigenvalues"] = {{{"re", r.eigenvalues[0].real()},
                       {"im", r.eigenvalues[0].imag()}},
                      {{"re", r.eigenvalues[1].real()},
                       {"im", r.eigenvalues[1].imag()}}};
  j["classification"] = to_string(r.classification);
  j["mode"] = to_string(r.mode);
  j["in_domain"] = r.in_domain;
  return j;
}

Classification classification_from(const std::string& name) {
  if (name == "ESS") return Classification::Ess;
  if (name == "saddle") return Classification::Saddle;
  if (name == "unstable") return Classification::Unstable;
  if (name == "non-hyperbolic") return Classification::NonHyperbolic;
  throw std::runtime_error("unknown classification: " + name);
}

}  // namespace

std::string report_json(const std::vector<EquilibriumReport>& reports) {
  ordered_json array = ordered_json::array();
  for (const auto& r : reports) array.push_back(report_to_json(r));
  return array.dump(2) + "\n";
}

void emit_report(const std::vector<EquilibriumReport>& reports,
                 const std::filesystem::path& path) {
  write_file(path, report_json(reports));
}

std::vector<EquilibriumReport> parse_report_json(const std::string& json) {
  ordered_json array = ordered_json::parse(json);
  std::vector<EquilibriumReport> reports;
  for (const auto& j : array) {
    EquilibriumReport r;
    r.point = {j.at("point").at("x").get<double>(),
               j.at("point").at("y").get<double>()};
    for (int row = 0; row < 2; ++row) {
      for (int col = 0; col < 2; ++col) {
        r.jacobian(row, col) = j.at("jacobian")[row][col].get<double>();
      }
    }
    r.det = j.at("det").get<double>();
    r.trace = j.at("trace").get<double>();
    for (int i = 0; i < 2; ++i) {
      r.eigenvalues[i] = {j.at("eigenvalues")[i].at("re").get<double>(),
                          j.at("eigenvalues")[i].at("im").get<double>()};
    }
    r.classification = classification_from(j.at("classification"));
    r.mode = j.at("mode") == "paper" ? JacobianMode::Paper
                                     : JacobianMode::Numeric;
    r.in_domain = j.at("in_domain").get<bool>();
    reports.push_back(r);
  }
  return reports;
}

std::vector<EquilibriumReport> parse_report(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_report_json(buffer.str());
}

void emit_manifest(const RunManifest& manifest,
                   const std::filesystem::path& path) {
  ordered_json j;
  j["tool_version"] = manifest.tool_version;
  j["config_digest"] = manifest.config_digest;
  j["started"] = manifest.started;
  j["finished"] = manifest.finished;
  j["outputs"] = manifest.outputs;
  write_file(path, j.dump(2) + "\n");
}

std::string iso8601_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t time = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&time, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

}  // namespace nev
