#ifndef NEV_STABILITY_HPP
#define NEV_STABILITY_HPP

#include <Eigen/Core>
#include <array>
#include <complex>
#include <string>
#include <vector>

#include "nev/core.hpp"

namespace nev {

/// Eigenvalue real parts closer to zero than this are refused a stability
/// call and reported non-hyperbolic.
inline constexpr double kHyperbolicThreshold = 1e-9;

enum class Classification { Ess, Saddle, Unstable, NonHyperbolic };
enum class JacobianMode { Paper, Numeric };

std::string to_string(Classification c);
std::string to_string(JacobianMode m);

struct EquilibriumReport {
  Eigen::Vector2d point{0.0, 0.0};
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();
  double det = 0.0;
  double trace = 0.0;
  std::array<std::complex<double>, 2> eigenvalues{};
  Classification classification = Classification::NonHyperbolic;
  JacobianMode mode = JacobianMode::Numeric;
  bool in_domain = true;
};

/// Closed-form Jacobian of the no-feedback system:
/// diag((1-2x)*Dx, (1-2y)*Dy).
Eigen::Matrix2d jacobian_paper_no_feedback(const ModelParams& params,
                                           const Eigen::Vector2d& point);

/// Closed-form Jacobian of the feedback system in its conventional
/// lower-triangular derivation, kept as-is for cross-validation. It is
/// known to disagree with the finite-difference Jacobian of the
/// integrated field (see jacobian_numeric, which is authoritative); the
/// disagreement is intentional and surfaced by the cross-validation
/// tests.
Eigen::Matrix2d jacobian_paper_feedback(const ModelParams& params,
                                        const Eigen::Vector2d& point);

/// Central finite differences of the integrated field with h = 1e-6,
/// one-sided within h of the domain boundary.
Eigen::Matrix2d jacobian_numeric(const ModelParams& params,
                                 const Eigen::Vector2d& point);

std::array<std::complex<double>, 2> eigenvalues_2x2(const Eigen::Matrix2d& j);

struct EquilibriumPoint {
  Eigen::Vector2d xy{0.0, 0.0};
  bool in_domain = true;
};

/// The four corners, plus — for feedback models — interior roots of the
/// two payoff differences found by damped Newton from a 5x5 grid of
/// interior seeds, deduplicated within 1e-8. Roots outside the open unit
/// square are flagged in_domain = false. When no seed converges only the
/// corners are returned and `diagnostic`, if given, says why.
std::vector<EquilibriumPoint> enumerate_equilibria(
    const ModelParams& params, std::string* diagnostic = nullptr);

/// Builds the requested mode's Jacobian at one point and classifies it by
/// eigenvalue real parts (ESS both negative, unstable both positive,
/// saddle mixed, non-hyperbolic when any real part is within
/// kHyperbolicThreshold of zero).
EquilibriumReport classify_point(const ModelParams& params,
                                 const Eigen::Vector2d& point,
                                 JacobianMode mode, bool in_domain = true);

std::vector<EquilibriumReport> classify(const ModelParams& params,
                                        JacobianMode mode);

}  // namespace nev

#endif
