#pragma once

#include <functional>
#include <vector>

#include "impact/curve.hpp"

// Randomized (mixed) threshold-switching strategies vs static tuning:
// randomization wins exactly where the impact curve is concave.

namespace impact::strategy {

/// Threshold tau_1 with probability p, tau_2 with probability 1-p.
struct MixedStrategy {
  double tau_low;
  double tau_high;
  double p;
};

struct StrategyComparison {
  double impact_mean;        // p I(tau_1) + (1-p) I(tau_2)
  double tau_mean;           // p tau_1 + (1-p) tau_2
  double impact_at_tau_mean; // static impact at the same mean false-alarm time
  double gain;               // impact_at_tau_mean - impact_mean; > 0 means randomization wins
};

/// Expected-impact comparison of a mixed strategy against a static threshold
/// at equal mean false-alarm time.
StrategyComparison compare(const std::function<double(double)>& curve_eval,
                           const MixedStrategy& s);

/// Piecewise-linear interpolation of a curve's impact at tau (tau within the
/// grid range).
double interpolate_impact(const ImpactCurve& curve, double tau);

struct GainEntry {
  double tau1;
  double tau2;
  double gain;
};

/// Gain for every ordered grid pair (tau_i < tau_j) using linear
/// interpolation at tau_mean.
std::vector<GainEntry> gain_scan(const ImpactCurve& curve, double p);

}  // namespace impact::strategy
