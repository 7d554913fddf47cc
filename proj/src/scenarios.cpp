#include "nev/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace nev {

namespace {

struct Resolved {
  ModelParams params;
  std::vector<GroupProvenance> provenance;
};

Resolved resolve(const Scenario& scenario) {
  if (scenario.id.empty()) {
    throw std::invalid_argument("scenario: id must be non-empty");
  }
  validate(scenario.initial);
  validate(scenario.integrator);
  if (scenario.normalization && !scenario.normalization->groups.empty()) {
    if (!scenario.params.raw) {
      throw std::invalid_argument(
          "scenario '" + scenario.id +
          "': normalization groups require raw parameter values");
    }
    validate(scenario.params);
    auto result = normalize_params(scenario.params, *scenario.normalization);
    validate(result.params);
    return {result.params, std::move(result.provenance)};
  }
  validate(scenario.params);
  return {scenario.params, {}};
}

/// Linear interpolation on a uniformly sampled trajectory.
double sample_observable(const Trajectory& traj, double t, char observable) {
  const auto& s = traj.samples;
  if (s.empty()) throw std::runtime_error("empty trajectory");
  double t0 = s.front().t;
  double tn = s.back().t;
  if (t <= t0) return observable == 'x' ? s.front().x : s.front().y;
  if (t >= tn) return observable == 'x' ? s.back().x : s.back().y;
  double pos = (t - t0) / traj.step_size;
  auto k = static_cast<size_t>(pos);
  if (k + 1 >= s.size()) k = s.size() - 2;
  double w = pos - static_cast<double>(k);
  double a = observable == 'x' ? s[k].x : s[k].y;
  double b = observable == 'x' ? s[k + 1].x : s[k + 1].y;
  return a + w * (b - a);
}

// Sign changes of dx/dt along the trajectory. Field values within 1e-9 of
// the run's peak magnitude count as zero, so the sub-ulp jitter of a
// parked equilibrium is not mistaken for oscillation.
int count_sign_changes(const ModelParams& params, const Trajectory& traj) {
  double peak = 0.0;
  std::vector<double> dx(traj.samples.size());
  for (size_t i = 0; i < traj.samples.size(); ++i) {
    dx[i] = rhs(params, traj.samples[i]).x();
    peak = std::max(peak, std::abs(dx[i]));
  }
  const double floor = 1e-9 * peak;
  int changes = 0;
  int last_sign = 0;
  for (double v : dx) {
    int sign = v > floor ? 1 : (v < -floor ? -1 : 0);
    if (sign != 0) {
      if (last_sign != 0 && sign != last_sign) ++changes;
      last_sign = sign;
    }
  }
  return changes;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& scenario) {
  Resolved resolved = resolve(scenario);

  ScenarioResult result;
  result.resolved = resolved.params;
  result.provenance = std::move(resolved.provenance);
  result.trajectory =
      integrate(resolved.params, scenario.initial, scenario.integrator);
  result.trajectory.scenario_id = scenario.id;
  for (const auto& point :
       enumerate_equilibria(resolved.params, &result.equilibrium_diagnostic)) {
    result.reports.push_back(classify_point(resolved.params, point.xy,
                                            JacobianMode::Numeric,
                                            point.in_domain));
  }
  return result;
}

std::vector<SweepPoint> sweep(const SweepSpec& spec) {
  if (spec.values.empty()) {
    throw std::invalid_argument("sweep: values must be non-empty");
  }
  if (!fields::exists(spec.parameter_path)) {
    throw std::invalid_argument("sweep: unknown parameter path '" +
                                spec.parameter_path + "'");
  }

  // Points run concurrently (no shared mutable state) and are collected
  // back in input order, so results do not depend on scheduling.
  auto run_point = [&spec](double value) {
    SweepPoint point;
    point.value = value;
    try {
      Scenario variant = spec.base;
      fields::set(variant.params, spec.parameter_path, value);
      ScenarioResult run = run_scenario(variant);
      point.convergence_time = run.trajectory.convergence_time;
      point.final_state = run.trajectory.back();
      point.trajectory = std::move(run.trajectory);
    } catch (const std::exception& e) {
      point.error = e.what();
    }
    return point;
  };

  std::vector<std::future<SweepPoint>> jobs;
  jobs.reserve(spec.values.size());
  for (double value : spec.values) {
    jobs.push_back(std::async(std::launch::async, run_point, value));
  }
  std::vector<SweepPoint> points;
  points.reserve(jobs.size());
  for (auto& job : jobs) points.push_back(job.get());
  return points;
}

NormalizationComparison compare_normalization(const Scenario& raw,
                                              const NormalizationSpec& spec) {
  if (!raw.params.raw) {
    throw std::invalid_argument(
        "compare_normalization: scenario must hold raw values");
  }
  validate(raw.params);

  NormalizationComparison cmp;
  cmp.raw_run = integrate(raw.params, raw.initial, raw.integrator);
  cmp.raw_run.scenario_id = raw.id + ":raw";
  cmp.raw_oscillations = count_sign_changes(raw.params, cmp.raw_run);
  cmp.raw_endpoint = cmp.raw_run.back();
  cmp.raw_convergence_time = cmp.raw_run.convergence_time;

  auto normalized = normalize_params(raw.params, spec);
  validate(normalized.params);
  cmp.normalized_run =
      integrate(normalized.params, raw.initial, raw.integrator);
  cmp.normalized_run.scenario_id = raw.id + ":normalized";
  cmp.normalized_oscillations =
      count_sign_changes(normalized.params, cmp.normalized_run);
  cmp.normalized_endpoint = cmp.normalized_run.back();
  cmp.normalized_convergence_time = cmp.normalized_run.convergence_time;
  return cmp;
}

namespace {

using Vec = Eigen::VectorXd;

struct Objective {
  const Scenario* scenario;
  const CalibrationSpec* spec;

  double operator()(const Vec& v, long& evaluations) const {
    ++evaluations;
    Scenario candidate = *scenario;
    for (int i = 0; i < v.size(); ++i) {
      fields::set(candidate.params, spec->free_parameters[i].path, v[i]);
    }
    try {
      Resolved resolved = resolve(candidate);
      Trajectory traj =
          integrate(resolved.params, candidate.initial, candidate.integrator);
      double loss = 0.0;
      for (const auto& anchor : spec->anchors) {
        double value = sample_observable(traj, anchor.t, anchor.observable);
        double residual = value - anchor.target;
        loss += anchor.weight * residual * residual;
      }
      return std::isfinite(loss) ? loss
                                 : std::numeric_limits<double>::infinity();
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  }
};

struct RestartOutcome {
  double loss = std::numeric_limits<double>::infinity();
  Vec best;
  long evaluations = 0;
};

Vec clamp_to_box(Vec v, const std::vector<FreeParameter>& box) {
  for (int i = 0; i < v.size(); ++i) {
    v[i] = std::clamp(v[i], box[i].lower, box[i].upper);
  }
  return v;
}

// Nelder-Mead with the standard coefficients (reflection 1, expansion 2,
// contraction 0.5, shrink 0.5); proposals are projected into the bounds.
RestartOutcome nelder_mead(const Objective& objective, const Vec& seed,
                           const std::vector<FreeParameter>& box) {
  const int n = static_cast<int>(seed.size());
  const int max_evals = 400 * (n + 1);
  RestartOutcome outcome;

  std::vector<Vec> simplex;
  simplex.reserve(n + 1);
  simplex.push_back(clamp_to_box(seed, box));
  for (int i = 0; i < n; ++i) {
    Vec v = seed;
    double span = box[i].upper - box[i].lower;
    v[i] += 0.1 * span;
    if (v[i] > box[i].upper) v[i] = seed[i] - 0.1 * span;
    simplex.push_back(clamp_to_box(v, box));
  }

  std::vector<double> f(n + 1);
  for (int i = 0; i <= n; ++i) f[i] = objective(simplex[i], outcome.evaluations);

  std::vector<int> order(n + 1);
  while (outcome.evaluations < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return f[a] < f[b]; });
    int best = order[0], worst = order[n], second_worst = order[n - 1];

    double spread = std::abs(f[worst] - f[best]);
    double diameter = 0.0;
    for (int i = 1; i <= n; ++i) {
      diameter = std::max(
          diameter, (simplex[order[i]] - simplex[best]).lpNorm<Eigen::Infinity>());
    }
    if (spread < 1e-14 && diameter < 1e-10) break;

    Vec centroid = Vec::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(n);

    Vec reflected = clamp_to_box(centroid + (centroid - simplex[worst]), box);
    double f_reflected = objective(reflected, outcome.evaluations);

    if (f_reflected < f[best]) {
      Vec expanded =
          clamp_to_box(centroid + 2.0 * (centroid - simplex[worst]), box);
      double f_expanded = objective(expanded, outcome.evaluations);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        f[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        f[worst] = f_reflected;
      }
    } else if (f_reflected < f[second_worst]) {
      simplex[worst] = reflected;
      f[worst] = f_reflected;
    } else {
      bool outside = f_reflected < f[worst];
      Vec contracted = outside
          ? clamp_to_box(centroid + 0.5 * (reflected - centroid), box)
          : clamp_to_box(centroid + 0.5 * (simplex[worst] - centroid), box);
      double f_contracted = objective(contracted, outcome.evaluations);
      if (f_contracted < (outside ? f_reflected : f[worst])) {
        simplex[worst] = contracted;
        f[worst] = f_contracted;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          simplex[i] = clamp_to_box(
              simplex[best] + 0.5 * (simplex[i] - simplex[best]), box);
          f[i] = objective(simplex[i], outcome.evaluations);
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i) {
    if (f[i] < f[best]) best = i;
  }
  outcome.loss = f[best];
  outcome.best = simplex[best];
  return outcome;
}

// Latin hypercube over the bounds: one stratum centre per restart and
// dimension, strata permuted with a fixed constant seed so runs are
// reproducible.
std::vector<Vec> latin_hypercube_seeds(const std::vector<FreeParameter>& box,
                                       int count) {
  std::mt19937_64 rng(0x5eedc0de2024ULL);
  const int n = static_cast<int>(box.size());
  std::vector<std::vector<int>> strata(n, std::vector<int>(count));
  for (int d = 0; d < n; ++d) {
    std::iota(strata[d].begin(), strata[d].end(), 0);
    std::shuffle(strata[d].begin(), strata[d].end(), rng);
  }
  std::vector<Vec> seeds(count, Vec::Zero(n));
  for (int k = 0; k < count; ++k) {
    for (int d = 0; d < n; ++d) {
      double u = (strata[d][k] + 0.5) / static_cast<double>(count);
      seeds[k][d] = box[d].lower + u * (box[d].upper - box[d].lower);
    }
  }
  return seeds;
}

std::vector<AnchorResidual> residual_report(const Scenario& scenario,
                                            const CalibrationSpec& spec,
                                            const ModelParams& params) {
  Scenario fitted = scenario;
  fitted.params = params;
  Resolved resolved = resolve(fitted);
  Trajectory traj =
      integrate(resolved.params, fitted.initial, fitted.integrator);
  std::vector<AnchorResidual> out;
  for (const auto& anchor : spec.anchors) {
    AnchorResidual r;
    r.anchor = anchor;
    r.value = sample_observable(traj, anchor.t, anchor.observable);
    r.residual = r.value - anchor.target;
    r.within_tolerance = std::abs(r.residual) <= anchor.tolerance;
    out.push_back(r);
  }
  return out;
}

}  // namespace

CalibrationResult calibrate(const CalibrationSpec& spec,
                            const Scenario& scenario) {
  if (spec.free_parameters.empty()) {
    throw std::invalid_argument("calibrate: at least one free parameter");
  }
  if (spec.anchors.empty()) {
    throw std::invalid_argument("calibrate: anchors must be non-empty");
  }
  for (const auto& p : spec.free_parameters) {
    if (!fields::exists(p.path)) {
      throw std::invalid_argument("calibrate: unknown free parameter '" +
                                  p.path + "'");
    }
    if (!(p.lower < p.upper) || !std::isfinite(p.lower) ||
        !std::isfinite(p.upper)) {
      throw std::invalid_argument("calibrate: bad bounds for '" + p.path +
                                  "'");
    }
  }
  double t_end = scenario.initial.t + scenario.integrator.horizon;
  for (const auto& anchor : spec.anchors) {
    if (anchor.observable != 'x' && anchor.observable != 'y') {
      throw std::invalid_argument("calibrate: observable must be x or y");
    }
    if (!(anchor.target >= 0.0 && anchor.target <= 1.0)) {
      throw std::invalid_argument("calibrate: anchor target outside [0,1]");
    }
    if (anchor.weight < 0.0) {
      throw std::invalid_argument("calibrate: negative anchor weight");
    }
    if (anchor.t < scenario.initial.t || anchor.t > t_end) {
      throw std::invalid_argument("calibrate: anchor outside horizon");
    }
  }

  CalibrationResult result;

  // If the starting parameters already satisfy every anchor there is
  // nothing to optimize.
  auto initial_residuals = residual_report(scenario, spec, scenario.params);
  bool satisfied = std::all_of(initial_residuals.begin(),
                               initial_residuals.end(),
                               [](const AnchorResidual& r) {
                                 return r.within_tolerance;
                               });
  if (satisfied) {
    result.fitted = scenario.params;
    result.residuals = initial_residuals;
    result.all_within_tolerance = true;
    result.evaluations = 1;
    result.best_restart = -1;
    result.loss = 0.0;
    for (const auto& r : initial_residuals) {
      result.loss += r.anchor.weight * r.residual * r.residual;
    }
    return result;
  }

  Objective objective{&scenario, &spec};
  constexpr int kRestarts = 20;
  auto seeds = latin_hypercube_seeds(spec.free_parameters, kRestarts);

  std::vector<std::future<RestartOutcome>> jobs;
  jobs.reserve(kRestarts);
  for (int k = 0; k < kRestarts; ++k) {
    jobs.push_back(std::async(std::launch::async, [&, k] {
      return nelder_mead(objective, seeds[k], spec.free_parameters);
    }));
  }

  RestartOutcome best;
  int best_index = -1;
  long total_evals = 0;
  for (int k = 0; k < kRestarts; ++k) {
    RestartOutcome outcome = jobs[k].get();
    total_evals += outcome.evaluations;
    if (outcome.loss < best.loss) {
      best = outcome;
      best_index = k;
    }
  }
  if (!best.best.size() || !std::isfinite(best.loss)) {
    throw std::runtime_error(
        "calibrate: no parameter set within bounds achieved finite loss");
  }

  result.fitted = scenario.params;
  for (int i = 0; i < best.best.size(); ++i) {
    fields::set(result.fitted, spec.free_parameters[i].path, best.best[i]);
  }
  result.loss = best.loss;
  result.evaluations = total_evals;
  result.best_restart = best_index;
  result.residuals = residual_report(scenario, spec, result.fitted);
  result.all_within_tolerance =
      std::all_of(result.residuals.begin(), result.residuals.end(),
                  [](const AnchorResidual& r) { return r.within_tolerance; });
  return result;
}

PredictResult predict(const Scenario& scenario,
                      const std::vector<double>& horizons) {
  for (double h : horizons) {
    if (!std::isfinite(h) || h < 0.0) {
      throw std::invalid_argument("predict: horizons must be finite and >= 0");
    }
  }
  Resolved resolved = resolve(scenario);

  IntegratorConfig cfg = scenario.integrator;
  double t_end = scenario.initial.t + cfg.horizon;
  double furthest =
      horizons.empty() ? 0.0 : *std::max_element(horizons.begin(), horizons.end());
  if (furthest > t_end) {
    // One automatic extension to cover the requested horizons.
    cfg.horizon = furthest - scenario.initial.t;
  }

  Trajectory traj = integrate(resolved.params, scenario.initial, cfg);

  PredictResult result;
  for (double h : horizons) {
    result.points.push_back({h, sample_observable(traj, h, 'x'),
                             sample_observable(traj, h, 'y')});
  }
  result.long_run =
      long_run_limit(resolved.params, scenario.initial, scenario.integrator);
  return result;
}

}  // namespace nev
