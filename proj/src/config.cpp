#include "nev/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nev/io.hpp"

namespace nev {

namespace {

std::string trim(std::string_view s) {
  size_t begin = s.find_first_not_of(" \t\r");
  size_t end = s.find_last_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string current;
  std::istringstream in(s);
  while (std::getline(in, current, sep)) out.push_back(trim(current));
  return out;
}

double parse_number(const std::string& text, const std::string& origin,
                    int line) {
  std::string t = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(origin, line, "expected a number, got '" + t + "'");
  }
  return value;
}

long parse_integer(const std::string& text, const std::string& origin,
                   int line) {
  std::string t = trim(text);
  long value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(origin, line, "expected an integer, got '" + t + "'");
  }
  return value;
}

bool parse_bool(const std::string& text, const std::string& origin, int line) {
  std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError(origin, line, "expected true or false, got '" + t + "'");
}

struct Parser {
  std::string origin;
  JobConfig job;
  std::set<std::string> seen_keys;
  std::map<std::string, NormalizationGroup> groups;  // insertion-keyed below
  std::vector<std::string> group_order;
  bool have_sweep = false;
  bool have_calibration = false;
  bool normalize_target_set = false;

  void duplicate_check(const std::string& section, const std::string& key,
                       int line) {
    if (!seen_keys.insert(section + "/" + key).second) {
      throw ConfigError(origin, line,
                        "duplicate key '" + key + "' in [" + section + "]");
    }
  }

  void handle(const std::string& section, const std::string& key,
              const std::string& value, int line) {
    Scenario& sc = job.scenario;
    if (section == "model") {
      duplicate_check(section, key, line);
      if (key == "id") sc.id = value;
      else if (key == "feedback") sc.params.feedback_enabled = parse_bool(value, origin, line);
      else if (key == "lambda") sc.params.lambda = parse_number(value, origin, line);
      else if (key == "raw") sc.params.raw = parse_bool(value, origin, line);
      else throw ConfigError(origin, line, "unknown key '" + key + "' in [model]");
      return;
    }
    if (section == "manufacturer" || section == "consumer") {
      duplicate_check(section, key, line);
      std::string path = section + "." + key;
      if (!fields::exists(path)) {
        throw ConfigError(origin, line,
                          "unknown key '" + key + "' in [" + section + "]");
      }
      fields::set(sc.params, path, parse_number(value, origin, line));
      return;
    }
    if (section == "esdg") {
      std::string actual = key == "sigma" ? "delta" : key;
      duplicate_check(section, actual, line);
      std::string path = "esdg." + actual;
      if (!fields::exists(path)) {
        throw ConfigError(origin, line, "unknown key '" + key + "' in [esdg]");
      }
      fields::set(sc.params, path, parse_number(value, origin, line));
      return;
    }
    if (section == "initial") {
      duplicate_check(section, key, line);
      if (key == "x") sc.initial.x = parse_number(value, origin, line);
      else if (key == "y") sc.initial.y = parse_number(value, origin, line);
      else if (key == "t") sc.initial.t = parse_number(value, origin, line);
      else throw ConfigError(origin, line, "unknown key '" + key + "' in [initial]");
      return;
    }
    if (section == "integrator") {
      duplicate_check(section, key, line);
      if (key == "step") sc.integrator.step_size = parse_number(value, origin, line);
      else if (key == "horizon") sc.integrator.horizon = parse_number(value, origin, line);
      else if (key == "convergence_epsilon") sc.integrator.convergence_epsilon = parse_number(value, origin, line);
      else if (key == "convergence_window") sc.integrator.convergence_window = static_cast<int>(parse_integer(value, origin, line));
      else if (key == "clamp") sc.integrator.clamp = parse_bool(value, origin, line);
      else throw ConfigError(origin, line, "unknown key '" + key + "' in [integrator]");
      return;
    }
    if (section == "normalize") {
      duplicate_check(section, key, line);
      if (key == "target") {
        if (!sc.normalization) sc.normalization.emplace();
        if (value == "signed") sc.normalization->target = NormalizationTarget::Signed;
        else if (value == "unit") sc.normalization->target = NormalizationTarget::Unit;
        else throw ConfigError(origin, line, "target must be 'signed' or 'unit'");
        normalize_target_set = true;
      } else {
        throw ConfigError(origin, line, "unknown key '" + key + "' in [normalize]");
      }
      return;
    }
    if (section.rfind("normalize.", 0) == 0) {
      std::string name = section.substr(10);
      if (name.empty()) throw ConfigError(origin, line, "empty group name");
      duplicate_check(section, key, line);
      if (groups.find(name) == groups.end()) {
        groups[name].name = name;
        group_order.push_back(name);
      }
      NormalizationGroup& group = groups[name];
      if (key == "fields") {
        for (const auto& field : split(value, ',')) {
          if (field.empty()) continue;
          group.fields.push_back(field);
        }
        if (group.fields.empty()) {
          throw ConfigError(origin, line, "group '" + name + "' lists no fields");
        }
      } else if (key == "min") {
        group.min = parse_number(value, origin, line);
      } else if (key == "max") {
        group.max = parse_number(value, origin, line);
      } else {
        throw ConfigError(origin, line,
                          "unknown key '" + key + "' in [" + section + "]");
      }
      return;
    }
    if (section == "sweep") {
      duplicate_check(section, key, line);
      have_sweep = true;
      if (!job.sweep) job.sweep.emplace();
      if (key == "parameter") {
        if (!fields::exists(value)) {
          throw ConfigError(origin, line, "unknown sweep parameter '" + value + "'");
        }
        job.sweep->parameter_path = value;
      } else if (key == "values") {
        for (const auto& item : split(value, ',')) {
          if (item.empty()) continue;
          job.sweep->values.push_back(parse_number(item, origin, line));
        }
        if (job.sweep->values.empty()) {
          throw ConfigError(origin, line, "sweep values list is empty");
        }
      } else {
        throw ConfigError(origin, line, "unknown key '" + key + "' in [sweep]");
      }
      return;
    }
    if (section == "calibration") {
      have_calibration = true;
      if (!job.calibration) job.calibration.emplace();
      if (key == "free") {
        // free = <path> <lower> <upper>
        std::istringstream in(value);
        FreeParameter p;
        std::string lo, hi, extra;
        if (!(in >> p.path >> lo >> hi) || (in >> extra)) {
          throw ConfigError(origin, line,
                            "expected 'free = <path> <lower> <upper>'");
        }
        if (!fields::exists(p.path)) {
          throw ConfigError(origin, line, "unknown free parameter '" + p.path + "'");
        }
        p.lower = parse_number(lo, origin, line);
        p.upper = parse_number(hi, origin, line);
        job.calibration->free_parameters.push_back(p);
      } else if (key == "anchor") {
        // anchor = <x|y> <t> <target> [weight] [tolerance]
        auto tokens = split(value, ' ');
        tokens.erase(std::remove_if(tokens.begin(), tokens.end(),
                                    [](const std::string& s) { return s.empty(); }),
                     tokens.end());
        if (tokens.size() < 3 || tokens.size() > 5) {
          throw ConfigError(origin, line,
                            "expected 'anchor = <x|y> <t> <target> [weight] [tolerance]'");
        }
        CalibrationAnchor anchor;
        if (tokens[0] != "x" && tokens[0] != "y") {
          throw ConfigError(origin, line, "anchor observable must be x or y");
        }
        anchor.observable = tokens[0][0];
        anchor.t = parse_number(tokens[1], origin, line);
        anchor.target = parse_number(tokens[2], origin, line);
        if (tokens.size() > 3) anchor.weight = parse_number(tokens[3], origin, line);
        if (tokens.size() > 4) anchor.tolerance = parse_number(tokens[4], origin, line);
        job.calibration->anchors.push_back(anchor);
      } else {
        throw ConfigError(origin, line, "unknown key '" + key + "' in [calibration]");
      }
      return;
    }
    throw ConfigError(origin, line, "unknown section [" + section + "]");
  }

  JobConfig finish(int last_line) {
    Scenario& sc = job.scenario;
    if (!group_order.empty() || normalize_target_set) {
      if (!sc.normalization) sc.normalization.emplace();
      if (!group_order.empty() && !sc.params.raw) {
        throw ConfigError(origin, last_line,
                          "normalization groups require raw = true");
      }
      for (const auto& name : group_order) {
        const NormalizationGroup& group = groups[name];
        if (group.fields.empty()) {
          throw ConfigError(origin, last_line,
                            "group '" + name + "' lists no fields");
        }
        if (group.min.has_value() != group.max.has_value()) {
          throw ConfigError(origin, last_line,
                            "group '" + name +
                                "' must give both min and max or neither");
        }
        sc.normalization->groups.push_back(group);
      }
    }
    if (have_sweep && have_calibration) {
      throw ConfigError(origin, last_line,
                        "a config may hold a sweep or a calibration, not both");
    }
    if (have_sweep) {
      if (job.sweep->parameter_path.empty()) {
        throw ConfigError(origin, last_line, "[sweep] needs 'parameter'");
      }
      if (job.sweep->values.empty()) {
        throw ConfigError(origin, last_line, "[sweep] needs 'values'");
      }
      job.kind = JobConfig::Kind::Sweep;
      job.sweep->base = sc;
    } else if (have_calibration) {
      if (job.calibration->free_parameters.empty()) {
        throw ConfigError(origin, last_line, "[calibration] needs 'free'");
      }
      if (job.calibration->anchors.empty()) {
        throw ConfigError(origin, last_line, "[calibration] needs 'anchor'");
      }
      job.kind = JobConfig::Kind::Calibration;
    } else {
      job.kind = JobConfig::Kind::Scenario;
    }

    // Surface range violations at parse time with the file as origin.
    try {
      validate(sc.params);
      validate(sc.initial);
      validate(sc.integrator);
    } catch (const ValidationError& e) {
      throw ConfigError(origin, last_line, e.what());
    }
    return job;
  }
};

}  // namespace

JobConfig parse_config_text(std::string_view text, const std::string& origin) {
  Parser parser;
  parser.origin = origin;

  std::string section;
  int line_number = 0;
  std::istringstream in{std::string(text)};
  std::string raw_line;
  while (std::getline(in, raw_line)) {
    ++line_number;
    std::string line = raw_line;
    size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin, line_number, "malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError(origin, line_number, "empty section name");
      }
      continue;
    }

    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin, line_number, "expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin, line_number, "empty key");
    if (section.empty()) {
      throw ConfigError(origin, line_number,
                        "key '" + key + "' appears before any section");
    }
    parser.handle(section, key, value, line_number);
  }

  if (parser.job.scenario.id.empty()) {
    // Default id: the config file's stem.
    std::filesystem::path p(origin);
    parser.job.scenario.id = p.stem().string();
    if (parser.job.scenario.id.empty()) parser.job.scenario.id = "scenario";
  }
  return parser.finish(line_number);
}

JobConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path.string(), 0, "cannot open config file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

namespace {

void scenario_lines(const Scenario& sc, std::vector<std::string>& lines) {
  lines.push_back("id=" + sc.id);
  lines.push_back(std::string("model.feedback=") +
                  (sc.params.feedback_enabled ? "true" : "false"));
  lines.push_back(std::string("model.raw=") + (sc.params.raw ? "true" : "false"));
  lines.push_back("model.lambda=" + format_double(sc.params.lambda));
  for (const auto& name : fields::names()) {
    if (name == "lambda") continue;
    lines.push_back(name + "=" + format_double(fields::get(sc.params, name)));
  }
  lines.push_back("initial.x=" + format_double(sc.initial.x));
  lines.push_back("initial.y=" + format_double(sc.initial.y));
  lines.push_back("initial.t=" + format_double(sc.initial.t));
  lines.push_back("integrator.step=" + format_double(sc.integrator.step_size));
  lines.push_back("integrator.horizon=" + format_double(sc.integrator.horizon));
  lines.push_back("integrator.convergence_epsilon=" +
                  format_double(sc.integrator.convergence_epsilon));
  lines.push_back("integrator.convergence_window=" +
                  std::to_string(sc.integrator.convergence_window));
  lines.push_back(std::string("integrator.clamp=") +
                  (sc.integrator.clamp ? "true" : "false"));
  if (sc.normalization) {
    lines.push_back(std::string("normalize.target=") +
                    (sc.normalization->target == NormalizationTarget::Signed
                         ? "signed"
                         : "unit"));
    for (const auto& group : sc.normalization->groups) {
      std::string fields_joined;
      for (const auto& f : group.fields) {
        if (!fields_joined.empty()) fields_joined += ",";
        fields_joined += f;
      }
      lines.push_back("normalize." + group.name + ".fields=" + fields_joined);
      if (group.min && group.max) {
        lines.push_back("normalize." + group.name + ".min=" +
                        format_double(*group.min));
        lines.push_back("normalize." + group.name + ".max=" +
                        format_double(*group.max));
      }
    }
  }
}

}  // namespace

std::string canonical_config(const JobConfig& job) {
  std::vector<std::string> lines;
  switch (job.kind) {
    case JobConfig::Kind::Scenario: lines.push_back("kind=scenario"); break;
    case JobConfig::Kind::Sweep: lines.push_back("kind=sweep"); break;
    case JobConfig::Kind::Calibration: lines.push_back("kind=calibration"); break;
  }
  scenario_lines(job.scenario, lines);
  if (job.sweep) {
    lines.push_back("sweep.parameter=" + job.sweep->parameter_path);
    std::string values;
    for (double v : job.sweep->values) {
      if (!values.empty()) values += ",";
      values += format_double(v);
    }
    lines.push_back("sweep.values=" + values);
  }
  if (job.calibration) {
    int index = 0;
    for (const auto& p : job.calibration->free_parameters) {
      lines.push_back("calibration.free." + std::to_string(index++) + "=" +
                      p.path + "," + format_double(p.lower) + "," +
                      format_double(p.upper));
    }
    index = 0;
    for (const auto& a : job.calibration->anchors) {
      lines.push_back("calibration.anchor." + std::to_string(index++) + "=" +
                      std::string(1, a.observable) + "," + format_double(a.t) +
                      "," + format_double(a.target) + "," +
                      format_double(a.weight) + "," +
                      format_double(a.tolerance));
    }
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

std::string scenario_to_config(const Scenario& sc) {
  std::ostringstream out;
  out << "[model]\n";
  out << "id = " << sc.id << "\n";
  out << "feedback = " << (sc.params.feedback_enabled ? "true" : "false") << "\n";
  out << "raw = " << (sc.params.raw ? "true" : "false") << "\n";
  out << "lambda = " << format_double(sc.params.lambda) << "\n";

  auto section = [&](const std::string& name) {
    out << "\n[" << name << "]\n";
    for (const auto& field : fields::names()) {
      if (field.rfind(name + ".", 0) == 0) {
        out << field.substr(name.size() + 1) << " = "
            << format_double(fields::get(sc.params, field)) << "\n";
      }
    }
  };
  section("manufacturer");
  section("consumer");
  section("esdg");

  out << "\n[initial]\n";
  out << "x = " << format_double(sc.initial.x) << "\n";
  out << "y = " << format_double(sc.initial.y) << "\n";
  if (sc.initial.t != 0.0) out << "t = " << format_double(sc.initial.t) << "\n";

  out << "\n[integrator]\n";
  out << "step = " << format_double(sc.integrator.step_size) << "\n";
  out << "horizon = " << format_double(sc.integrator.horizon) << "\n";
  out << "convergence_epsilon = "
      << format_double(sc.integrator.convergence_epsilon) << "\n";
  out << "convergence_window = " << sc.integrator.convergence_window << "\n";
  out << "clamp = " << (sc.integrator.clamp ? "true" : "false") << "\n";

  if (sc.normalization) {
    out << "\n[normalize]\n";
    out << "target = "
        << (sc.normalization->target == NormalizationTarget::Signed ? "signed"
                                                                    : "unit")
        << "\n";
    for (const auto& group : sc.normalization->groups) {
      out << "\n[normalize." << group.name << "]\n";
      out << "fields = ";
      for (size_t i = 0; i < group.fields.size(); ++i) {
        if (i) out << ", ";
        out << group.fields[i];
      }
      out << "\n";
      if (group.min && group.max) {
        out << "min = " << format_double(*group.min) << "\n";
        out << "max = " << format_double(*group.max) << "\n";
      }
    }
  }
  return out.str();
}

std::string config_digest(const JobConfig& job) {
  std::string canonical = canonical_config(job);
  uint64_t hash = 1469598103934665603ULL;
  for (unsigned char byte : canonical) {
    hash ^= byte;
    hash *= 1099511628211ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

}  // namespace nev
