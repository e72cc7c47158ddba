#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "impact/curve.hpp"
#include "impact/model.hpp"

// chi^2 detector analysis: the threshold <-> tau map, the closed-form
// stealthy impact sqrt(alpha) * f(H), and per-point concavity certificates.

namespace impact::chi2 {

/// alpha(tau) = 2 P^{-1}(1 - 1/tau; m/2). Strictly increasing, alpha(1) = 0.
double threshold_from_tau(double tau, int m);

/// tau(alpha) = 1 / (1 - P(alpha/2; m/2)).
double tau_from_threshold(double alpha, int m);

/// f(H) = max_i sum_j ||h_ij||_2 with the lowest maximizing row index.
std::pair<double, int> f_of_H(const model::AttackMap& map);

/// Worst-case stealthy deviation sqrt(alpha) * f(H).
double chi2_impact(const model::AttackMap& map, double alpha);

/// The attack attaining chi2_impact on the maximizing row: a[j] =
/// sqrt(alpha) h_{i*j} / ||h_{i*j}||. Zero blocks get sqrt(alpha) e_1 so the
/// detector statistic sits exactly at alpha at every step.
Eigen::VectorXd chi2_optimal_attack(const model::AttackMap& map, double alpha);

/// Largest tau_bar with m/2 - 1 >= P^{-1}(1 - 1/tau; m/2): the impact is
/// concave on [1, tau_bar]. Empty for m = 1 (the condition never holds for
/// tau > 1).
std::optional<double> theorem1_domain(int m);

/// Local concavity test for even m, z = m/2 - 1:
///   z! < 2 z z!/alpha + 2 tau (alpha/2)^z exp(-alpha/2).
/// Margin reported normalized by z!. At tau = 1 (alpha = 0) the z >= 1 case
/// returns holds = true with margin = +infinity; z = 0 is evaluated directly.
/// holds is false at exact equality (margin reported as 0).
std::pair<bool, double> theorem2_local_check(double tau, int m);

/// Impact metric for constant-f curves. Deviation is sqrt(alpha)*f (the
/// stealthy terminal deviation of the closed form); SquaredDeviation is
/// alpha*f, the squared-deviation quantity alpha x f(T) used by the
/// randomized-vs-static tuning comparison, which is the one exhibiting the
/// m=1 convex region.
enum class ConstantFMetric { Deviation, SquaredDeviation };

/// Curve from a system's attack map: impact = sqrt(alpha(tau)) * f(H).
ImpactCurve chi2_curve(const model::AttackMap& map, int m, const std::vector<double>& tau_grid);

/// Curve with an externally supplied constant f instead of f(H).
ImpactCurve chi2_curve_constant_f(double f, int m, const std::vector<double>& tau_grid,
                                  ConstantFMetric metric = ConstantFMetric::SquaredDeviation);

/// Theorem 2 margins over a tau grid (even m).
ConcavityCertificate theorem2_certificate(int m, const std::vector<double>& tau_grid);

}  // namespace impact::chi2
