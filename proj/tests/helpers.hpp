#ifndef NEV_TEST_HELPERS_HPP
#define NEV_TEST_HELPERS_HPP

#include <random>

#include "nev/core.hpp"
#include "nev/scenarios.hpp"

namespace nevtest {

/// No-feedback parameters with the given payoff differences:
/// delta_manufacturer = dx (via R), delta_consumer = dy (via P1).
inline nev::ModelParams params_with_deltas(double dx, double dy) {
  nev::ModelParams p;
  p.manufacturer.R = dx;
  p.consumer.P1 = dy;
  return p;
}

/// Dyadic rational in [-1, 1] with denominator 64; sums and differences of
/// a few of these are exact in double precision.
inline double dyadic(std::mt19937_64& rng) {
  return std::uniform_int_distribution<int>(-64, 64)(rng) / 64.0;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random normalized-units parameters (no feedback fields).
inline nev::ModelParams random_params(std::mt19937_64& rng) {
  nev::ModelParams p;
  for (const auto& name : nev::fields::names()) {
    nev::fields::set(p, name, uniform(rng, -1.0, 1.0));
  }
  p.consumer.alpha = uniform(rng, 0.0, 1.0);
  p.esdg.delta = uniform(rng, 0.0, 0.99);
  p.esdg.epsilon = uniform(rng, 0.0, 1.0);
  p.lambda = 0.0;
  return p;
}

inline bool same_fields(const nev::ModelParams& a, const nev::ModelParams& b) {
  for (const auto& name : nev::fields::names()) {
    if (nev::fields::get(a, name) != nev::fields::get(b, name)) return false;
  }
  return a.feedback_enabled == b.feedback_enabled && a.lambda == b.lambda;
}

inline bool same_samples(const nev::Trajectory& a, const nev::Trajectory& b) {
  if (a.samples.size() != b.samples.size()) return false;
  for (size_t i = 0; i < a.samples.size(); ++i) {
    if (a.samples[i].t != b.samples[i].t || a.samples[i].x != b.samples[i].x ||
        a.samples[i].y != b.samples[i].y) {
      return false;
    }
  }
  return true;
}

}  // namespace nevtest

#endif
