#ifndef NEV_IO_HPP
#define NEV_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "nev/core.hpp"
#include "nev/stability.hpp"

namespace nev {

inline constexpr const char* kToolVersion = "nevgame 1.0.0";

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

/// CSV with header `t,x,y`, one row per sample, shortest round-trip
/// decimals, newline-terminated. Deterministic bytes for a deterministic
/// trajectory.
void emit_trajectory(const Trajectory& trajectory,
                     const std::filesystem::path& path);
std::string trajectory_csv(const Trajectory& trajectory);

/// Reads a trajectory CSV back; samples round-trip exactly.
Trajectory parse_trajectory(const std::filesystem::path& path);
Trajectory parse_trajectory_csv(const std::string& csv);

/// JSON array of equilibrium reports, keys in fixed order, eigenvalues as
/// {re, im} pairs, deterministic bytes.
void emit_report(const std::vector<EquilibriumReport>& reports,
                 const std::filesystem::path& path);
std::string report_json(const std::vector<EquilibriumReport>& reports);
std::vector<EquilibriumReport> parse_report(const std::filesystem::path& path);
std::vector<EquilibriumReport> parse_report_json(const std::string& json);

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string config_digest;
  std::string started;
  std::string finished;
  std::vector<std::string> outputs;
};

void emit_manifest(const RunManifest& manifest,
                   const std::filesystem::path& path);

std::string iso8601_now();

}  // namespace nev

#endif
