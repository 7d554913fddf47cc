#ifndef NEV_DYNAMICS_HPP
#define NEV_DYNAMICS_HPP

#include <Eigen/Core>

#include "nev/core.hpp"

namespace nev {

struct IntegratorConfig {
  double step_size = 0.01;            // months
  double horizon = 0.0;               // months, required
  double convergence_epsilon = 1e-8;  // field magnitude threshold
  int convergence_window = 100;       // consecutive steps below threshold
  bool clamp = true;                  // clamp state to [0,1] after each step
};

void validate(const IntegratorConfig& cfg);

/// Replicator field: dx/dt = x(1-x)*Dx, dy/dt = y(1-y)*Dy, where the
/// payoff differences Dx, Dy come from the feedback or no-feedback model
/// according to params.feedback_enabled.
Eigen::Vector2d rhs(const ModelParams& params, const GameState& state);

/// Fixed-step classical Runge-Kutta advance over the full horizon,
/// sampling every step. Convergence is detected on field magnitude:
/// converged once max(|dx/dt|, |dy/dt|) stays below convergence_epsilon
/// for convergence_window consecutive steps, with convergence_time the
/// time of the first state of that window. Integration always continues
/// to the horizon; running out of horizon without convergence is not an
/// error. Throws on a non-finite state, reporting step and state.
Trajectory integrate(const ModelParams& params, const GameState& initial,
                     const IntegratorConfig& cfg);

struct LongRunResult {
  GameState state;
  bool converged = false;
};

/// Integrates over horizon_factor times the configured horizon and
/// returns the final state together with whether the run converged.
LongRunResult long_run_limit(const ModelParams& params,
                             const GameState& initial,
                             const IntegratorConfig& cfg,
                             double horizon_factor = 10.0);

}  // namespace nev

#endif
