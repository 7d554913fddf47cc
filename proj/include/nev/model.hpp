#ifndef NEV_MODEL_HPP
#define NEV_MODEL_HPP

#include "nev/core.hpp"

namespace nev {

/// The four cell payoffs of the manufacturer/consumer game:
/// u1 manufacturer-NEV, u2 manufacturer-TFV, u3 consumer-NEV,
/// u4 consumer-TFV.
struct PayoffQuad {
  double u1 = 0.0;
  double u2 = 0.0;
  double u3 = 0.0;
  double u4 = 0.0;
};

/// Sum of the four information-retrieval payoffs.
double information_sum(const ConsumerParams& consumer);

PayoffQuad payoffs_no_feedback(const ModelParams& params);

/// Manufacturer payoff difference u1 - u2 = (R+V1-C) - (V2-f1-f2). Its
/// sign selects the attracting end of the manufacturer phase line.
double delta_manufacturer(const ModelParams& params);

/// Consumer payoff difference without feedback,
/// (P1+e1+n1-c1+r-A) - (P2+e2+n2-c2-p). The need and information terms
/// are common to both strategies and cancel; this function never reads
/// alpha, T, E, epsilon or I1..I4.
double delta_consumer_no_feedback(const ModelParams& params);

/// Insurance proceeds decaying with adoption: r*(1-y).
double battery_insurance(double r, double y);

/// Consumer payoff difference with post-purchase feedback: the insurance
/// term decays as r*(1-y) and expectation matching contributes
/// (2x-1)*(epsilon - delta*epsilon)*(I1+I2+I3+I4) — the full matching
/// payoff at x = 1, the full mismatch discount at x = 0, vanishing at
/// x = 0.5. Requires feedback_enabled.
double delta_consumer_feedback(const ModelParams& params,
                               const GameState& state);

/// Manufacturer payoff difference with the reputation coupling:
/// delta_manufacturer - lambda*delta*(1-y)*(I1+I2+I3+I4). With the
/// default lambda = 0 this is exactly delta_manufacturer.
double delta_manufacturer_feedback(const ModelParams& params,
                                   const GameState& state);

}  // namespace nev

#endif
