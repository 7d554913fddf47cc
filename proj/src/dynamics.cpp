#include "nev/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nev/model.hpp"

namespace nev {

void validate(const IntegratorConfig& cfg) {
  std::vector<ValidationIssue> issues;
  if (!(cfg.step_size > 0.0) || !std::isfinite(cfg.step_size)) {
    issues.push_back({"integrator.step", cfg.step_size, "(0, inf)"});
  }
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
    issues.push_back({"integrator.horizon", cfg.horizon, "(0, inf)"});
  }
  if (std::isfinite(cfg.step_size) && std::isfinite(cfg.horizon) &&
      cfg.step_size > cfg.horizon) {
    issues.push_back({"integrator.step", cfg.step_size, "<= horizon"});
  }
  if (!(cfg.convergence_epsilon > 0.0)) {
    issues.push_back({"integrator.convergence_epsilon",
                      cfg.convergence_epsilon, "(0, inf)"});
  }
  if (cfg.convergence_window < 1) {
    issues.push_back({"integrator.convergence_window",
                      static_cast<double>(cfg.convergence_window), ">= 1"});
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

Eigen::Vector2d rhs(const ModelParams& params, const GameState& state) {
  double dx = params.feedback_enabled
                  ? delta_manufacturer_feedback(params, state)
                  : delta_manufacturer(params);
  double dy = params.feedback_enabled
                  ? delta_consumer_feedback(params, state)
                  : delta_consumer_no_feedback(params);
  return {state.x * (1.0 - state.x) * dx, state.y * (1.0 - state.y) * dy};
}

namespace {

Eigen::Vector2d field_at(const ModelParams& params, double x, double y,
                         double t) {
  return rhs(params, GameState{x, y, t});
}

}  // namespace

Trajectory integrate(const ModelParams& params, const GameState& initial,
                     const IntegratorConfig& cfg) {
  validate(params);
  validate(initial);
  validate(cfg);

  const double h = cfg.step_size;
  const long steps = static_cast<long>(std::llround(cfg.horizon / h));

  Trajectory traj;
  traj.step_size = h;
  traj.samples.reserve(static_cast<size_t>(steps) + 1);
  traj.samples.push_back({initial.x, initial.y, initial.t});

  double x = initial.x;
  double y = initial.y;
  Eigen::Vector2d field0 = field_at(params, x, y, initial.t);
  int below = std::max(std::abs(field0.x()), std::abs(field0.y())) <
                      cfg.convergence_epsilon
                  ? 1
                  : 0;

  for (long k = 0; k < steps; ++k) {
    double t = initial.t + static_cast<double>(k) * h;

    Eigen::Vector2d k1 = field_at(params, x, y, t);
    Eigen::Vector2d k2 = field_at(params, x + 0.5 * h * k1.x(),
                                  y + 0.5 * h * k1.y(), t + 0.5 * h);
    Eigen::Vector2d k3 = field_at(params, x + 0.5 * h * k2.x(),
                                  y + 0.5 * h * k2.y(), t + 0.5 * h);
    Eigen::Vector2d k4 =
        field_at(params, x + h * k3.x(), y + h * k3.y(), t + h);

    x += (h / 6.0) * (k1.x() + 2.0 * k2.x() + 2.0 * k3.x() + k4.x());
    y += (h / 6.0) * (k1.y() + 2.0 * k2.y() + 2.0 * k3.y() + k4.y());
    double t_next = initial.t + static_cast<double>(k + 1) * h;

    if (!std::isfinite(x) || !std::isfinite(y)) {
      std::ostringstream msg;
      msg << "integrate: non-finite state at step " << (k + 1)
          << " (t = " << t_next << ", x = " << x << ", y = " << y << ")";
      throw std::runtime_error(msg.str());
    }

    if (cfg.clamp) {
      double cx = std::clamp(x, 0.0, 1.0);
      double cy = std::clamp(y, 0.0, 1.0);
      if (cx != x || cy != y) ++traj.clamped_steps;
      x = cx;
      y = cy;
    }

    traj.samples.push_back({x, y, t_next});

    Eigen::Vector2d field = field_at(params, x, y, t_next);
    if (std::max(std::abs(field.x()), std::abs(field.y())) <
        cfg.convergence_epsilon) {
      ++below;
      if (below >= cfg.convergence_window && !traj.converged) {
        traj.converged = true;
        // Time of the first state of the window that completed here.
        long first = (k + 1) - (cfg.convergence_window - 1);
        traj.convergence_time = initial.t + static_cast<double>(first) * h;
      }
    } else {
      below = 0;
    }
  }

  return traj;
}

LongRunResult long_run_limit(const ModelParams& params,
                             const GameState& initial,
                             const IntegratorConfig& cfg,
                             double horizon_factor) {
  IntegratorConfig extended = cfg;
  extended.horizon = cfg.horizon * horizon_factor;
  Trajectory traj = integrate(params, initial, extended);
  return {traj.back(), traj.converged};
}

}  // namespace nev
