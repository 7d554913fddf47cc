#ifndef NEV_SCENARIOS_HPP
#define NEV_SCENARIOS_HPP

#include <optional>
#include <string>
#include <vector>

#include "nev/core.hpp"
#include "nev/dynamics.hpp"
#include "nev/normalize.hpp"
#include "nev/stability.hpp"

namespace nev {

/// A fully-resolved experiment: parameters, optional normalization,
/// initial shares and integrator settings.
struct Scenario {
  std::string id;
  ModelParams params;
  std::optional<NormalizationSpec> normalization;
  GameState initial;
  IntegratorConfig integrator;
};

struct SweepSpec {
  Scenario base;
  std::string parameter_path;
  std::vector<double> values;
};

struct CalibrationAnchor {
  double t = 0.0;
  char observable = 'x';  // 'x' or 'y'
  double target = 0.0;
  double weight = 1.0;
  double tolerance = 0.015;
};

struct FreeParameter {
  std::string path;
  double lower = 0.0;
  double upper = 0.0;
};

struct CalibrationSpec {
  std::vector<FreeParameter> free_parameters;
  std::vector<CalibrationAnchor> anchors;
};

struct ScenarioResult {
  ModelParams resolved;  // post-normalization parameters actually run
  std::vector<GroupProvenance> provenance;
  Trajectory trajectory;
  std::vector<EquilibriumReport> reports;
  std::string equilibrium_diagnostic;
};

/// Normalizes if a spec is present, integrates, and enumerates+classifies
/// equilibria in numeric mode. Deterministic: identical scenarios produce
/// bit-identical results.
ScenarioResult run_scenario(const Scenario& scenario);

struct SweepPoint {
  double value = 0.0;
  std::optional<Trajectory> trajectory;
  std::optional<double> convergence_time;
  GameState final_state;
  std::string error;  // non-empty when this point failed
};

/// One run per value, base scenario otherwise identical, ordered by input
/// value order. A failing point is reported in its slot and does not
/// abort the sweep.
std::vector<SweepPoint> sweep(const SweepSpec& spec);

struct NormalizationComparison {
  Trajectory raw_run;
  Trajectory normalized_run;
  int raw_oscillations = 0;         // sign changes of dx/dt
  int normalized_oscillations = 0;
  GameState raw_endpoint;
  GameState normalized_endpoint;
  std::optional<double> raw_convergence_time;
  std::optional<double> normalized_convergence_time;
};

/// Runs the scenario once on raw values and once normalized by `spec`,
/// and reports oscillation counts, endpoints and convergence times.
NormalizationComparison compare_normalization(const Scenario& raw,
                                              const NormalizationSpec& spec);

struct AnchorResidual {
  CalibrationAnchor anchor;
  double value = 0.0;
  double residual = 0.0;
  bool within_tolerance = false;
};

struct CalibrationResult {
  ModelParams fitted;
  double loss = 0.0;
  std::vector<AnchorResidual> residuals;
  bool all_within_tolerance = false;
  long evaluations = 0;
  int best_restart = -1;  // -1: initial guess already satisfied all anchors
};

/// Minimizes the weighted squared anchor residuals over the free
/// parameters with Nelder-Mead (reflection 1, expansion 2, contraction
/// 0.5, shrink 0.5), restarted from 20 Latin-hypercube seeds drawn with a
/// fixed constant seed. Returns the best parameters with per-anchor
/// residuals. If the scenario's own parameters already satisfy every
/// anchor tolerance they are returned unchanged.
CalibrationResult calibrate(const CalibrationSpec& spec,
                            const Scenario& scenario);

struct Prediction {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct PredictResult {
  std::vector<Prediction> points;
  LongRunResult long_run;
};

/// Reads the scenario trajectory at each horizon by linear interpolation
/// between samples, extending the integration once if a horizon lies
/// beyond the configured one, and reports the long-run limit alongside.
PredictResult predict(const Scenario& scenario,
                      const std::vector<double>& horizons);

}  // namespace nev

#endif
