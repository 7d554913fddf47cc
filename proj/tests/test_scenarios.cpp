#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "nev/config.hpp"
#include "nev/model.hpp"
#include "nev/scenarios.hpp"

using namespace nev;
using doctest::Approx;

namespace {

Scenario simple_scenario(double dx, double dy, double horizon = 300.0) {
  Scenario s;
  s.id = "test";
  s.params = nevtest::params_with_deltas(dx, dy);
  s.initial = {0.5, 0.5, 0.0};
  s.integrator.horizon = horizon;
  return s;
}

Scenario shipped_replication() {
  JobConfig job = parse_config(std::string(NEV_CONFIG_DIR) + "/paper2021.cfg");
  REQUIRE(job.kind == JobConfig::Kind::Scenario);
  return job.scenario;
}

}  // namespace

TEST_CASE("run_scenario is deterministic") {
  Scenario s = simple_scenario(0.4, -0.3);
  auto first = run_scenario(s);
  auto second = run_scenario(s);
  CHECK(nevtest::same_samples(first.trajectory, second.trajectory));
  CHECK(first.trajectory.converged == second.trajectory.converged);
  REQUIRE(first.reports.size() == second.reports.size());
  for (size_t i = 0; i < first.reports.size(); ++i) {
    CHECK(first.reports[i].jacobian == second.reports[i].jacobian);
  }
}

TEST_CASE("no-feedback scenarios converge to the sign-predicted corner") {
  std::mt19937_64 rng(67);
  int done = 0;
  while (done < 20) {
    ModelParams p = nevtest::random_params(rng);
    double dx = delta_manufacturer(p);
    double dy = delta_consumer_no_feedback(p);
    if (std::abs(dx) < 0.05 || std::abs(dy) < 0.05) continue;
    ++done;
    Scenario s = simple_scenario(0, 0, 600.0);
    s.params = p;
    auto result = run_scenario(s);
    REQUIRE(result.trajectory.converged);
    double want_x = dx > 0 ? 1.0 : 0.0;
    double want_y = dy > 0 ? 1.0 : 0.0;
    CHECK(result.trajectory.back().x == Approx(want_x).epsilon(1e-6));
    CHECK(result.trajectory.back().y == Approx(want_y).epsilon(1e-6));
    // The reached corner must be among the enumerated equilibria and ESS.
    bool found = false;
    for (const auto& report : result.reports) {
      if (std::lround(report.point.x()) == std::lround(want_x) &&
          std::lround(report.point.y()) == std::lround(want_y)) {
        found = true;
        CHECK(report.classification == Classification::Ess);
      }
    }
    CHECK(found);
  }
}

TEST_CASE("a knife-edge manufacturer keeps x frozen") {
  Scenario s = simple_scenario(0.0, 0.02, 5.0);
  s.initial = {0.37, 0.2, 0.0};
  auto result = run_scenario(s);
  CHECK(!result.trajectory.converged);
  for (const auto& sample : result.trajectory.samples) {
    CHECK(sample.x == 0.37);
  }
  CHECK(result.trajectory.back().y > 0.2);
}

TEST_CASE("scenario ids must be non-empty") {
  Scenario s = simple_scenario(0.1, 0.1);
  s.id.clear();
  CHECK_THROWS_AS(run_scenario(s), std::invalid_argument);
}

TEST_CASE("sweep points equal standalone runs and keep input order") {
  SweepSpec spec;
  spec.base = simple_scenario(0.4, 0.3, 60.0);
  spec.parameter_path = "consumer.P1";
  spec.values = {0.5, 0.1, 0.9};

  auto points = sweep(spec);
  REQUIRE(points.size() == 3);
  for (size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].value == spec.values[i]);
    CHECK(points[i].error.empty());
    Scenario standalone = spec.base;
    fields::set(standalone.params, spec.parameter_path, spec.values[i]);
    auto reference = run_scenario(standalone);
    CHECK(nevtest::same_samples(*points[i].trajectory, reference.trajectory));
  }
}

TEST_CASE("a failing sweep point stays in its slot") {
  SweepSpec spec;
  spec.base = simple_scenario(0.4, 0.3, 10.0);
  spec.parameter_path = "consumer.alpha";
  spec.values = {0.2, 2.0, 0.8};  // middle value violates the range

  auto points = sweep(spec);
  REQUIRE(points.size() == 3);
  CHECK(points[0].error.empty());
  CHECK(!points[1].error.empty());
  CHECK(points[2].error.empty());
}

TEST_CASE("normalization comparison with an identity spec changes nothing") {
  Scenario raw = simple_scenario(0.3, -0.2, 30.0);
  raw.params.raw = true;
  raw.params.manufacturer.R = 0.3;  // keep raw-mode values non-negative
  raw.params.consumer.P1 = 0.0;
  raw.params.consumer.p = 0.1;

  auto cmp = compare_normalization(raw, NormalizationSpec{});
  CHECK(nevtest::same_samples(cmp.raw_run, cmp.normalized_run));
  CHECK(cmp.raw_oscillations == cmp.normalized_oscillations);
}

TEST_CASE("calibrate returns immediately when anchors already hold") {
  Scenario s = simple_scenario(0.4, 0.3, 40.0);
  auto baseline = run_scenario(s);

  CalibrationSpec spec;
  spec.free_parameters = {{"consumer.r", 0.0, 1.0}};
  CalibrationAnchor anchor;
  anchor.t = 20.0;
  anchor.observable = 'x';
  // Aim exactly at the trajectory's own value.
  size_t idx = static_cast<size_t>(20.0 / s.integrator.step_size);
  anchor.target = baseline.trajectory.samples[idx].x;
  anchor.tolerance = 0.01;
  spec.anchors = {anchor};

  auto result = calibrate(spec, s);
  CHECK(result.best_restart == -1);
  CHECK(result.evaluations == 1);
  CHECK(result.all_within_tolerance);
  CHECK(nevtest::same_fields(result.fitted, s.params));
}

TEST_CASE("single-parameter calibration agrees with a bisection oracle") {
  // Fit the insurance level so the consumer share hits a target at t=30;
  // the response is monotone in r, so bisection provides the answer.
  Scenario s;
  s.id = "bisection";
  s.params.feedback_enabled = true;
  s.params.consumer.P1 = -0.8;
  s.params.consumer.r = 0.5;
  s.initial = {0.5, 0.2, 0.0};
  s.integrator.horizon = 30.0;

  const double target = 0.6;
  auto y_at_end = [&](double r) {
    Scenario probe = s;
    probe.params.consumer.r = r;
    return run_scenario(probe).trajectory.back().y;
  };

  double lo = 0.9, hi = 3.0;
  REQUIRE(y_at_end(lo) < target);
  REQUIRE(y_at_end(hi) > target);
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    (y_at_end(mid) < target ? lo : hi) = mid;
  }
  double oracle = 0.5 * (lo + hi);

  CalibrationSpec spec;
  spec.free_parameters = {{"consumer.r", 0.9, 3.0}};
  CalibrationAnchor anchor;
  anchor.t = 30.0;
  anchor.observable = 'y';
  anchor.target = target;
  anchor.tolerance = 1e-3;
  spec.anchors = {anchor};

  auto result = calibrate(spec, s);
  CHECK(std::abs(result.fitted.consumer.r - oracle) < 1e-4);
  CHECK(result.all_within_tolerance);
}

TEST_CASE("calibration is deterministic across executions") {
  Scenario s = shipped_replication();
  s.integrator.horizon = 40.0;
  CalibrationSpec spec;
  spec.free_parameters = {{"consumer.r", 0.3, 0.5}};
  spec.anchors = {{12.0, 'y', 0.256, 1.0, 0.015}};
  auto a = calibrate(spec, s);
  auto b = calibrate(spec, s);
  CHECK(a.loss == b.loss);
  CHECK(a.evaluations == b.evaluations);
  CHECK(a.best_restart == b.best_restart);
  CHECK(nevtest::same_fields(a.fitted, b.fitted));
}

TEST_CASE("calibration residual report matches an independent recomputation") {
  Scenario s = shipped_replication();
  s.integrator.horizon = 40.0;

  CalibrationSpec spec;
  spec.free_parameters = {{"consumer.r", 0.3, 0.5}};
  spec.anchors = {{12.0, 'y', 0.256, 1.0, 0.015}, {24.0, 'y', 0.315, 1.0, 0.015}};
  auto result = calibrate(spec, s);

  Scenario fitted = s;
  fitted.params = result.fitted;
  Trajectory traj = run_scenario(fitted).trajectory;
  for (const auto& r : result.residuals) {
    size_t idx = static_cast<size_t>(
        std::llround(r.anchor.t / fitted.integrator.step_size));
    double value = r.anchor.observable == 'x' ? traj.samples[idx].x
                                              : traj.samples[idx].y;
    CHECK(std::abs(value - r.anchor.target - r.residual) < 1e-10);
  }
}

TEST_CASE("calibrate fits the historical adoption anchors") {
  Scenario s = shipped_replication();
  s.integrator.horizon = 40.0;
  // Start well away from the committed values so the fit has to search.
  s.params.consumer.r = 0.28;
  s.params.consumer.p = 2.12;
  s.params.lambda = 4.3;
  s.params.manufacturer.R = 2.0;

  CalibrationSpec spec;
  spec.free_parameters = {{"consumer.r", 0.25, 0.55},
                          {"consumer.p", 2.1, 2.35},
                          {"lambda", 3.3, 4.5},
                          {"manufacturer.R", 1.9, 2.01}};
  spec.anchors = {{12.02, 'x', 0.261, 1.0, 0.015},
                  {23.98, 'x', 0.318, 1.0, 0.015},
                  {12.04, 'y', 0.256, 1.0, 0.015},
                  {24.0, 'y', 0.315, 1.0, 0.015}};
  auto result = calibrate(spec, s);
  CHECK(result.all_within_tolerance);
  for (const auto& r : result.residuals) {
    CHECK(std::abs(r.residual) <= 0.015);
  }
}

TEST_CASE("calibrate reports when no bounded candidate has finite loss") {
  Scenario s = simple_scenario(0.1, 0.1, 10.0);
  CalibrationSpec spec;
  // alpha is hard-bounded to [0,1]; every candidate in these bounds fails
  // validation, so every evaluation is infinite.
  spec.free_parameters = {{"consumer.alpha", 2.0, 3.0}};
  spec.anchors = {{5.0, 'x', 0.5, 1.0, 0.01}};
  CHECK_THROWS_AS(calibrate(spec, s), std::runtime_error);
}

TEST_CASE("calibrate validates its inputs") {
  Scenario s = simple_scenario(0.1, 0.1, 10.0);
  CalibrationSpec spec;
  CHECK_THROWS_AS(calibrate(spec, s), std::invalid_argument);

  spec.free_parameters = {{"consumer.r", 1.0, 0.0}};
  spec.anchors = {{5.0, 'x', 0.5, 1.0, 0.01}};
  CHECK_THROWS_AS(calibrate(spec, s), std::invalid_argument);

  spec.free_parameters = {{"consumer.r", 0.0, 1.0}};
  spec.anchors = {{50.0, 'x', 0.5, 1.0, 0.01}};  // beyond the horizon
  CHECK_THROWS_AS(calibrate(spec, s), std::invalid_argument);

  spec.anchors = {{5.0, 'z', 0.5, 1.0, 0.01}};
  CHECK_THROWS_AS(calibrate(spec, s), std::invalid_argument);
}

TEST_CASE("predict reads the trajectory and the long-run limit") {
  Scenario s = simple_scenario(0.4, 0.3, 50.0);
  s.initial = {0.3, 0.3, 0.0};
  auto result = predict(s, {0.0, 10.0, 25.0});
  REQUIRE(result.points.size() == 3);
  CHECK(result.points[0].x == 0.3);
  CHECK(result.points[0].y == 0.3);
  CHECK(result.points[1].x > 0.3);
  CHECK(result.long_run.converged);
  CHECK(result.long_run.state.x == Approx(1.0).epsilon(1e-6));

  SUBCASE("horizons beyond the configured one trigger a single extension") {
    auto extended = predict(s, {80.0});
    CHECK(extended.points[0].x > 0.9);
  }
  SUBCASE("negative horizons are rejected") {
    CHECK_THROWS_AS(predict(s, {-1.0}), std::invalid_argument);
  }
}

TEST_CASE("the shipped replication parks at an interior point") {
  Scenario s = shipped_replication();
  auto result = run_scenario(s);
  REQUIRE(result.trajectory.converged);
  const auto& end = result.trajectory.back();
  CHECK(end.x > 0.3);
  CHECK(end.x < 0.45);
  CHECK(end.y > 0.3);
  CHECK(end.y < 0.45);
  Eigen::Vector2d field = rhs(result.resolved, end);
  CHECK(std::abs(field.x()) < 1e-8);
  CHECK(std::abs(field.y()) < 1e-8);

  auto report = classify_point(result.resolved, {end.x, end.y},
                               JacobianMode::Numeric);
  bool stable_or_marginal =
      report.classification == Classification::Ess ||
      report.classification == Classification::NonHyperbolic;
  CHECK(stable_or_marginal);
}

TEST_CASE("predict on the shipped replication matches the forecast anchors") {
  Scenario s = shipped_replication();
  auto result = predict(s, {12.0, 24.0, 36.0});
  REQUIRE(result.points.size() == 3);
  CHECK(std::abs(result.points[2].x - 0.372) <= 0.02);
  CHECK(std::abs(result.points[2].y - 0.369) <= 0.02);
  CHECK(std::abs(result.long_run.state.x - 0.354) <= 0.02);
  CHECK(std::abs(result.long_run.state.y - 0.385) <= 0.02);
}
