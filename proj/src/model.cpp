#include "nev/model.hpp"

#include <stdexcept>

namespace nev {

double information_sum(const ConsumerParams& c) {
  return c.I1 + c.I2 + c.I3 + c.I4;
}

PayoffQuad payoffs_no_feedback(const ModelParams& params) {
  const auto& m = params.manufacturer;
  const auto& c = params.consumer;
  double shared = c.alpha * (c.T + c.E) +
                  params.esdg.epsilon * information_sum(c);
  PayoffQuad q;
  q.u1 = m.R + m.V1 - m.C;
  q.u2 = m.V2 - m.f1 - m.f2;
  q.u3 = shared + c.P1 + c.e1 + c.n1 - c.c1 + c.r - c.A;
  q.u4 = shared + c.P2 + c.e2 + c.n2 - c.c2 - c.p;
  return q;
}

double delta_manufacturer(const ModelParams& params) {
  const auto& m = params.manufacturer;
  return (m.R + m.V1 - m.C) - (m.V2 - m.f1 - m.f2);
}

double delta_consumer_no_feedback(const ModelParams& params) {
  const auto& c = params.consumer;
  // The shared need/information terms cancel between the two strategies
  // and must not enter here.
  return (c.P1 + c.e1 + c.n1 - c.c1 + c.r - c.A) -
         (c.P2 + c.e2 + c.n2 - c.c2 - c.p);
}

double battery_insurance(double r, double y) { return r * (1.0 - y); }

double delta_consumer_feedback(const ModelParams& params,
                               const GameState& state) {
  if (!params.feedback_enabled) {
    throw std::logic_error(
        "delta_consumer_feedback: feedback is disabled for these parameters");
  }
  const auto& c = params.consumer;
  double matching = params.esdg.epsilon - params.esdg.mismatch_discount();
  return (c.P1 + c.e1 + c.n1 - c.c1 + battery_insurance(c.r, state.y) - c.A) -
         (c.P2 + c.e2 + c.n2 - c.c2 - c.p) +
         (2.0 * state.x - 1.0) * matching * information_sum(c);
}

double delta_manufacturer_feedback(const ModelParams& params,
                                   const GameState& state) {
  return delta_manufacturer(params) -
         params.lambda * params.esdg.delta * (1.0 - state.y) *
             information_sum(params.consumer);
}

}  // namespace nev
