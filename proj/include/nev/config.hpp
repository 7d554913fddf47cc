#ifndef NEV_CONFIG_HPP
#define NEV_CONFIG_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "nev/scenarios.hpp"

namespace nev {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& origin, int line, const std::string& what)
      : std::runtime_error(origin + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

/// A parsed job: always carries a scenario; sweeps and calibrations carry
/// their extra sections on top.
struct JobConfig {
  enum class Kind { Scenario, Sweep, Calibration };
  Kind kind = Kind::Scenario;
  Scenario scenario;
  std::optional<SweepSpec> sweep;
  std::optional<CalibrationSpec> calibration;
};

/// Parses the plain-text key-value configuration format (sections for
/// model, manufacturer, consumer, esdg, initial state, integrator,
/// normalization groups, sweep and calibration). Unknown sections or keys
/// are hard errors with line numbers; missing optional keys take the
/// documented defaults; `sigma` is accepted as an alias for `delta`.
JobConfig parse_config(const std::filesystem::path& path);
JobConfig parse_config_text(std::string_view text, const std::string& origin);

/// Canonical serialization of the resolved job: sorted key=value lines,
/// full-precision values, independent of the source file's whitespace,
/// comments and key order.
std::string canonical_config(const JobConfig& job);

/// Serializes a scenario back into the config file format so fitted
/// parameter sets can be re-run as ordinary configs.
std::string scenario_to_config(const Scenario& scenario);

/// FNV-1a 64 over the canonical serialization, as 16 hex digits.
std::string config_digest(const JobConfig& job);

}  // namespace nev

#endif
