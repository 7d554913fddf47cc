#include "nev/stability.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "nev/dynamics.hpp"
#include "nev/model.hpp"

namespace nev {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Ess: return "ESS";
    case Classification::Saddle: return "saddle";
    case Classification::Unstable: return "unstable";
    case Classification::NonHyperbolic: return "non-hyperbolic";
  }
  return "?";
}

std::string to_string(JacobianMode m) {
  return m == JacobianMode::Paper ? "paper" : "numeric";
}

Eigen::Matrix2d jacobian_paper_no_feedback(const ModelParams& params,
                                           const Eigen::Vector2d& point) {
  double dx = delta_manufacturer(params);
  double dy = delta_consumer_no_feedback(params);
  Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
  j(0, 0) = (1.0 - 2.0 * point.x()) * dx;
  j(1, 1) = (1.0 - 2.0 * point.y()) * dy;
  return j;
}

Eigen::Matrix2d jacobian_paper_feedback(const ModelParams& params,
                                        const Eigen::Vector2d& point) {
  const auto& c = params.consumer;
  double x = point.x();
  double y = point.y();
  double matching = params.esdg.epsilon - params.esdg.mismatch_discount();
  double info = information_sum(c);

  // Entries transcribed literally from the closed-form derivation,
  // including its quirks; jacobian_numeric is the authoritative route.
  double w3 = (1.0 - 2.0 * x) * delta_manufacturer(params);
  double w4 = 2.0 * (1.0 - 2.0 * y) * matching * info;
  double w5 =
      (1.0 - 2.0 * y) *
          (2.0 * x * matching * info *
               (c.P1 + c.e1 + c.n1 - c.c1 + battery_insurance(c.r, y) - c.A) -
           (c.P2 + c.e2 + c.n2 - c.c2 - c.p) - matching * info) +
      y * (1.0 - y) * (-c.r);

  Eigen::Matrix2d j;
  j << w3, 0.0, w4, w5;
  return j;
}

Eigen::Matrix2d jacobian_numeric(const ModelParams& params,
                                 const Eigen::Vector2d& point) {
  constexpr double h = 1e-6;
  Eigen::Matrix2d j;

  auto field = [&](double x, double y) {
    Eigen::Vector2d f = rhs(params, GameState{x, y, 0.0});
    if (!f.allFinite()) {
      throw std::runtime_error("jacobian_numeric: non-finite field near point");
    }
    return f;
  };

  for (int var = 0; var < 2; ++var) {
    double v = point[var];
    double lo = v - h;
    double hi = v + h;
    // One-sided difference when a centered stencil would leave [0, 1].
    if (lo < 0.0) lo = v;
    if (hi > 1.0) hi = v;
    Eigen::Vector2d f_lo, f_hi;
    if (var == 0) {
      f_lo = field(lo, point.y());
      f_hi = field(hi, point.y());
    } else {
      f_lo = field(point.x(), lo);
      f_hi = field(point.x(), hi);
    }
    j.col(var) = (f_hi - f_lo) / (hi - lo);
  }
  return j;
}

std::array<std::complex<double>, 2> eigenvalues_2x2(const Eigen::Matrix2d& j) {
  double tr = j.trace();
  double det = j.determinant();
  double disc = tr * tr - 4.0 * det;
  if (disc >= 0.0) {
    double s = std::sqrt(disc);
    return {std::complex<double>((tr + s) / 2.0, 0.0),
            std::complex<double>((tr - s) / 2.0, 0.0)};
  }
  double s = std::sqrt(-disc);
  return {std::complex<double>(tr / 2.0, s / 2.0),
          std::complex<double>(tr / 2.0, -s / 2.0)};
}

EquilibriumReport classify_point(const ModelParams& params,
                                 const Eigen::Vector2d& point,
                                 JacobianMode mode, bool in_domain) {
  EquilibriumReport report;
  report.point = point;
  report.mode = mode;
  report.in_domain = in_domain;

  if (mode == JacobianMode::Paper) {
    report.jacobian = params.feedback_enabled
                          ? jacobian_paper_feedback(params, point)
                          : jacobian_paper_no_feedback(params, point);
  } else {
    report.jacobian = jacobian_numeric(params, point);
  }
  report.det = report.jacobian.determinant();
  report.trace = report.jacobian.trace();
  report.eigenvalues = eigenvalues_2x2(report.jacobian);

  double re1 = report.eigenvalues[0].real();
  double re2 = report.eigenvalues[1].real();
  if (std::abs(re1) <= kHyperbolicThreshold ||
      std::abs(re2) <= kHyperbolicThreshold) {
    report.classification = Classification::NonHyperbolic;
  } else if (re1 < 0.0 && re2 < 0.0) {
    report.classification = Classification::Ess;
  } else if (re1 > 0.0 && re2 > 0.0) {
    report.classification = Classification::Unstable;
  } else {
    report.classification = Classification::Saddle;
  }
  return report;
}

namespace {

Eigen::Vector2d deltas_at(const ModelParams& params,
                          const Eigen::Vector2d& v) {
  GameState s{v.x(), v.y(), 0.0};
  return {delta_manufacturer_feedback(params, s),
          delta_consumer_feedback(params, s)};
}

Eigen::Matrix2d deltas_jacobian(const ModelParams& params,
                                const Eigen::Vector2d& v) {
  constexpr double h = 1e-7;
  Eigen::Matrix2d j;
  for (int var = 0; var < 2; ++var) {
    Eigen::Vector2d lo = v, hi = v;
    lo[var] -= h;
    hi[var] += h;
    j.col(var) = (deltas_at(params, hi) - deltas_at(params, lo)) / (2.0 * h);
  }
  return j;
}

// Damped Newton on the pair of payoff differences. Returns true when the
// residual drops below tolerance.
bool newton_root(const ModelParams& params, Eigen::Vector2d& v) {
  constexpr int kMaxIter = 60;
  constexpr double kTol = 1e-12;

  double res = deltas_at(params, v).lpNorm<Eigen::Infinity>();
  for (int it = 0; it < kMaxIter; ++it) {
    if (res < kTol) return true;
    Eigen::Matrix2d j = deltas_jacobian(params, v);
    double det = j.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-14) return false;
    Eigen::Vector2d step = j.inverse() * deltas_at(params, v);
    if (!step.allFinite()) return false;

    double damping = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half) {
      Eigen::Vector2d trial = v - damping * step;
      double trial_res = deltas_at(params, trial).lpNorm<Eigen::Infinity>();
      if (std::isfinite(trial_res) && trial_res < res) {
        v = trial;
        res = trial_res;
        improved = true;
        break;
      }
      damping *= 0.5;
    }
    if (!improved) return false;
  }
  return res < kTol;
}

}  // namespace

std::vector<EquilibriumPoint> enumerate_equilibria(const ModelParams& params,
                                                   std::string* diagnostic) {
  std::vector<EquilibriumPoint> points = {
      {{0.0, 0.0}, true}, {{0.0, 1.0}, true},
      {{1.0, 0.0}, true}, {{1.0, 1.0}, true}};
  if (diagnostic) diagnostic->clear();
  if (!params.feedback_enabled) return points;

  std::vector<Eigen::Vector2d> roots;
  int converged_seeds = 0;
  for (int i = 1; i <= 5; ++i) {
    for (int j = 1; j <= 5; ++j) {
      Eigen::Vector2d v(i / 6.0, j / 6.0);
      if (!newton_root(params, v)) continue;
      ++converged_seeds;
      bool duplicate = false;
      for (const auto& r : roots) {
        if ((r - v).lpNorm<Eigen::Infinity>() < 1e-8) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) roots.push_back(v);
    }
  }

  if (converged_seeds == 0) {
    if (diagnostic) {
      *diagnostic =
          "interior root search: Newton did not converge from any seed "
          "(the payoff differences have no simultaneous interior zero or "
          "the system is degenerate); returning corners only";
    }
    return points;
  }

  std::sort(roots.begin(), roots.end(),
            [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
              return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
            });
  for (const auto& r : roots) {
    bool interior =
        r.x() > 0.0 && r.x() < 1.0 && r.y() > 0.0 && r.y() < 1.0;
    points.push_back({r, interior});
  }
  return points;
}

std::vector<EquilibriumReport> classify(const ModelParams& params,
                                        JacobianMode mode) {
  std::vector<EquilibriumReport> reports;
  for (const auto& point : enumerate_equilibria(params)) {
    reports.push_back(classify_point(params, point.xy, mode, point.in_domain));
  }
  return reports;
}

}  // namespace nev
