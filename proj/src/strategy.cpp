#include "impact/strategy.hpp"

#include <algorithm>
#include <stdexcept>

namespace impact::strategy {

StrategyComparison compare(const std::function<double(double)>& curve_eval,
                           const MixedStrategy& s) {
  if (!(s.tau_low >= 1.0) || !(s.tau_high > s.tau_low))
    throw std::invalid_argument("compare: need 1 <= tau_low < tau_high");
  if (!(s.p > 0.0 && s.p < 1.0)) throw std::invalid_argument("compare: p must lie in (0,1)");
  StrategyComparison out;
  double i1 = curve_eval(s.tau_low);
  double i2 = curve_eval(s.tau_high);
  out.impact_mean = s.p * i1 + (1.0 - s.p) * i2;
  out.tau_mean = s.p * s.tau_low + (1.0 - s.p) * s.tau_high;
  out.impact_at_tau_mean = curve_eval(out.tau_mean);
  out.gain = out.impact_at_tau_mean - out.impact_mean;
  return out;
}

double interpolate_impact(const ImpactCurve& curve, double tau) {
  const auto& pts = curve.points;
  if (pts.empty()) throw std::invalid_argument("interpolate_impact: empty curve");
  if (tau <= pts.front().tau) return pts.front().impact;
  if (tau >= pts.back().tau) return pts.back().impact;
  auto it = std::lower_bound(pts.begin(), pts.end(), tau,
                             [](const CurvePoint& p, double t) { return p.tau < t; });
  const CurvePoint& hi = *it;
  const CurvePoint& lo = *(it - 1);
  double w = (tau - lo.tau) / (hi.tau - lo.tau);
  return lo.impact + w * (hi.impact - lo.impact);
}

std::vector<GainEntry> gain_scan(const ImpactCurve& curve, double p) {
  if (curve.points.size() < 2) throw std::invalid_argument("gain_scan: curve needs >= 2 points");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("gain_scan: p must lie in (0,1)");
  auto eval = [&](double tau) { return interpolate_impact(curve, tau); };
  std::vector<GainEntry> out;
  const auto& pts = curve.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      MixedStrategy s{pts[i].tau, pts[j].tau, p};
      out.push_back({pts[i].tau, pts[j].tau, compare(eval, s).gain});
    }
  }
  return out;
}

}  // namespace impact::strategy
