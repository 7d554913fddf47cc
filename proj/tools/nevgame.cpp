#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>

#include "nev/config.hpp"
#include "nev/io.hpp"
#include "nev/scenarios.hpp"

namespace fs = std::filesystem;
using nev::JobConfig;
using ordered_json = nlohmann::ordered_json;

namespace {

struct Emitter {
  fs::path out_dir;
  nev::RunManifest manifest;

  explicit Emitter(const fs::path& dir, const std::string& digest) {
    out_dir = dir;
    fs::create_directories(out_dir);
    manifest.config_digest = digest;
    manifest.started = nev::iso8601_now();
  }

  fs::path declare(const std::string& name) {
    fs::path path = out_dir / name;
    manifest.outputs.push_back(path.string());
    std::cout << path.string() << "\n";
    return path;
  }

  void finish() {
    manifest.finished = nev::iso8601_now();
    fs::path path = out_dir / "manifest.json";
    nev::emit_manifest(manifest, path);
    std::cout << path.string() << "\n";
  }
};

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ordered_json state_json(const nev::GameState& s) {
  return {{"t", s.t}, {"x", s.x}, {"y", s.y}};
}

const nev::Scenario& require_scenario(const JobConfig& job, const char* verb) {
  if (job.kind != JobConfig::Kind::Scenario) {
    throw std::invalid_argument(std::string(verb) +
                                " requires a plain scenario config");
  }
  return job.scenario;
}

int cmd_simulate(const JobConfig& job, const fs::path& out) {
  const auto& scenario = require_scenario(job, "simulate");
  nev::ScenarioResult result = nev::run_scenario(scenario);
  if (!result.equilibrium_diagnostic.empty()) {
    std::cerr << "note: " << result.equilibrium_diagnostic << "\n";
  }
  Emitter emitter(out, nev::config_digest(job));
  nev::emit_trajectory(result.trajectory, emitter.declare("trajectory.csv"));
  nev::emit_report(result.reports, emitter.declare("report.json"));
  emitter.finish();
  return 0;
}

int cmd_classify(const JobConfig& job, const fs::path& out,
                 const std::string& mode_name) {
  const auto& scenario = require_scenario(job, "classify");
  nev::JacobianMode mode = mode_name == "paper" ? nev::JacobianMode::Paper
                                                : nev::JacobianMode::Numeric;
  nev::ModelParams params = scenario.params;
  if (scenario.normalization && !scenario.normalization->groups.empty()) {
    params = nev::normalize_params(params, *scenario.normalization).params;
  }
  nev::validate(params);
  auto reports = nev::classify(params, mode);
  Emitter emitter(out, nev::config_digest(job));
  nev::emit_report(reports, emitter.declare("report.json"));
  emitter.finish();
  return 0;
}

int cmd_sweep(const JobConfig& job, const fs::path& out) {
  if (job.kind != JobConfig::Kind::Sweep || !job.sweep) {
    throw std::invalid_argument("sweep requires a config with a [sweep] section");
  }
  auto points = nev::sweep(*job.sweep);

  Emitter emitter(out, nev::config_digest(job));
  ordered_json summary = ordered_json::array();
  for (size_t i = 0; i < points.size(); ++i) {
    const auto& point = points[i];
    ordered_json entry;
    entry["parameter"] = job.sweep->parameter_path;
    entry["value"] = point.value;
    if (!point.error.empty()) {
      entry["error"] = point.error;
      std::cerr << "sweep point " << point.value << " failed: " << point.error
                << "\n";
    } else {
      char name[48];
      std::snprintf(name, sizeof(name), "trajectory_%02zu.csv", i);
      nev::emit_trajectory(*point.trajectory, emitter.declare(name));
      entry["trajectory"] = name;
      entry["converged"] = point.convergence_time.has_value();
      if (point.convergence_time) {
        entry["convergence_time"] = *point.convergence_time;
      }
      entry["final"] = state_json(point.final_state);
    }
    summary.push_back(entry);
  }
  write_json(emitter.declare("sweep.json"), summary);
  emitter.finish();
  return 0;
}

int cmd_compare_norm(const JobConfig& job, const fs::path& out) {
  const auto& scenario = require_scenario(job, "compare-norm");
  if (!scenario.normalization || scenario.normalization->groups.empty()) {
    throw std::invalid_argument(
        "compare-norm requires normalization groups in the config");
  }
  nev::Scenario raw = scenario;
  raw.normalization.reset();
  auto cmp = nev::compare_normalization(raw, *scenario.normalization);

  Emitter emitter(out, nev::config_digest(job));
  nev::emit_trajectory(cmp.raw_run, emitter.declare("trajectory_raw.csv"));
  nev::emit_trajectory(cmp.normalized_run,
                       emitter.declare("trajectory_normalized.csv"));
  ordered_json j;
  j["raw"] = {{"oscillations", cmp.raw_oscillations},
              {"endpoint", state_json(cmp.raw_endpoint)},
              {"converged", cmp.raw_convergence_time.has_value()}};
  if (cmp.raw_convergence_time) {
    j["raw"]["convergence_time"] = *cmp.raw_convergence_time;
  }
  j["normalized"] = {{"oscillations", cmp.normalized_oscillations},
                     {"endpoint", state_json(cmp.normalized_endpoint)},
                     {"converged", cmp.normalized_convergence_time.has_value()}};
  if (cmp.normalized_convergence_time) {
    j["normalized"]["convergence_time"] = *cmp.normalized_convergence_time;
  }
  write_json(emitter.declare("comparison.json"), j);
  emitter.finish();
  return 0;
}

int cmd_calibrate(const JobConfig& job, const fs::path& out) {
  if (job.kind != JobConfig::Kind::Calibration || !job.calibration) {
    throw std::invalid_argument(
        "calibrate requires a config with a [calibration] section");
  }
  auto result = nev::calibrate(*job.calibration, job.scenario);

  Emitter emitter(out, nev::config_digest(job));
  nev::Scenario fitted = job.scenario;
  fitted.params = result.fitted;
  fitted.id = job.scenario.id + "_fitted";
  {
    fs::path path = emitter.declare("fitted.cfg");
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    file << nev::scenario_to_config(fitted);
  }
  ordered_json j;
  j["loss"] = result.loss;
  j["evaluations"] = result.evaluations;
  j["best_restart"] = result.best_restart;
  j["all_within_tolerance"] = result.all_within_tolerance;
  ordered_json anchors = ordered_json::array();
  for (const auto& r : result.residuals) {
    anchors.push_back({{"observable", std::string(1, r.anchor.observable)},
                       {"t", r.anchor.t},
                       {"target", r.anchor.target},
                       {"weight", r.anchor.weight},
                       {"tolerance", r.anchor.tolerance},
                       {"value", r.value},
                       {"residual", r.residual},
                       {"within_tolerance", r.within_tolerance}});
  }
  j["anchors"] = anchors;
  ordered_json fitted_fields;
  for (const auto& p : job.calibration->free_parameters) {
    fitted_fields[p.path] = nev::fields::get(result.fitted, p.path);
  }
  j["fitted_parameters"] = fitted_fields;
  write_json(emitter.declare("residuals.json"), j);
  emitter.finish();
  if (!result.all_within_tolerance) {
    std::cerr << "warning: not every anchor residual is within tolerance\n";
  }
  return 0;
}

int cmd_predict(const JobConfig& job, const fs::path& out,
                const std::string& horizons_arg) {
  const auto& scenario = require_scenario(job, "predict");
  std::vector<double> horizons;
  std::istringstream in(horizons_arg);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    horizons.push_back(std::stod(token));
  }
  if (horizons.empty()) {
    throw std::invalid_argument("predict: --horizons needs at least one value");
  }
  auto result = nev::predict(scenario, horizons);

  Emitter emitter(out, nev::config_digest(job));
  {
    fs::path path = emitter.declare("predictions.csv");
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    file << "t,x,y\n";
    for (const auto& p : result.points) {
      file << nev::format_double(p.t) << "," << nev::format_double(p.x) << ","
           << nev::format_double(p.y) << "\n";
    }
  }
  ordered_json j;
  ordered_json points = ordered_json::array();
  for (const auto& p : result.points) {
    points.push_back({{"t", p.t}, {"x", p.x}, {"y", p.y}});
  }
  j["points"] = points;
  j["long_run"] = {{"x", result.long_run.state.x},
                   {"y", result.long_run.state.y},
                   {"t", result.long_run.state.t},
                   {"converged", result.long_run.converged}};
  write_json(emitter.declare("predictions.json"), j);
  emitter.finish();
  return 0;
}

}  // namespace

namespace {

int run_main(int argc, char** argv) {
  CLI::App app{"Evolutionary adoption-game simulator for the NEV market"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string mode = "numeric";
  std::string horizons = "12,24,36";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file")->required();
    cmd->add_option("--out", out_dir, "output directory");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "integrate a scenario");
  add_common(simulate);
  CLI::App* classify = app.add_subcommand("classify", "classify equilibria");
  add_common(classify);
  classify->add_option("--mode", mode, "jacobian mode: paper or numeric")
      ->check(CLI::IsMember({"paper", "numeric"}));
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(sweep_cmd);
  CLI::App* compare = app.add_subcommand(
      "compare-norm", "run a raw scenario against its normalized version");
  add_common(compare);
  CLI::App* calibrate_cmd =
      app.add_subcommand("calibrate", "fit free parameters to anchors");
  add_common(calibrate_cmd);
  CLI::App* predict_cmd =
      app.add_subcommand("predict", "read the trajectory at given horizons");
  add_common(predict_cmd);
  predict_cmd->add_option("--horizons", horizons,
                          "comma-separated list of months");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    JobConfig job = nev::parse_config(config_path);
    fs::path out(out_dir);
    if (simulate->parsed()) return cmd_simulate(job, out);
    if (classify->parsed()) return cmd_classify(job, out, mode);
    if (sweep_cmd->parsed()) return cmd_sweep(job, out);
    if (compare->parsed()) return cmd_compare_norm(job, out);
    if (calibrate_cmd->parsed()) return cmd_calibrate(job, out);
    if (predict_cmd->parsed()) return cmd_predict(job, out, horizons);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const nev::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const nev::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  } catch (...) {
    std::cerr << "runtime error\n";
    return 2;
  }
}
