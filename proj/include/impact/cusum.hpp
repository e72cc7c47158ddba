#pragma once

#include <utility>
#include <vector>

#include "impact/curve.hpp"
#include "impact/model.hpp"
#include "impact/simplex.hpp"

// CUSUM detector analysis: the stealthy-impact LP, the Siegmund ARL map and
// its inverse, and the per-point concavity certificates.

namespace impact::cusum {

constexpr double kSiegmundConstant = 1.166;

/// LP for the worst-case stealthy terminal deviation along one state row.
/// Variables x = [Q+ (Nm), Q- (Nm), a (Nm)], Q indexed time-major; 6Nm rows:
///   Q_i^{+-}[k+1] >= 0,  Q_i^{+-}[k+1] <= alpha,
///   Q_i^{+-}[k+1] >= Q_i^{+-}[k] - b +- r_i[k],  r[k] = Sigma_r^{1/2} a[k].
/// The update is the one-sided relaxation of the max(0,.) recursion.
lp::LinearProgram build_impact_lp(const model::AttackMap& map, int row, double alpha, double b,
                                  const Eigen::MatrixXd& Sigma_r_sqrt);

struct CusumImpactResult {
  double value = 0.0;
  Eigen::VectorXd attack;  // stacked a achieving the maximum
  int row = 0;
  int sign = 1;            // +-h_row objective that won
};

/// max over state rows and objective sign of the LP optimum.
CusumImpactResult cusum_impact(const model::AttackMap& map, double alpha, double b,
                               const Eigen::MatrixXd& Sigma_r_sqrt);

/// Siegmund ARL: tau = (sigma_r^2/2) (exp(2G) - 1 - 2G) / b^2,
/// G = (b/sigma_r^2) alpha + 1.166 b/sigma_r. Returns +infinity if G > 350.
double siegmund_arl(double alpha, double b, double sigma_r);

/// Smallest tau reachable by siegmund_arl for fixed b (the alpha -> 0 limit).
double siegmund_tau_floor(double b, double sigma_r);

/// Inverts siegmund_arl in alpha for fixed b. Throws std::domain_error naming
/// the floor when tau is unreachable.
double threshold_from_tau_siegmund(double tau, double b, double sigma_r);

/// Inverts tau = siegmund_arl(alpha, delta*alpha, sigma_r) in alpha. The map
/// is checked monotone on the search bracket before solving. The alpha -> 0
/// floor equals kSiegmundConstant^2 independent of delta.
double threshold_from_tau_delta(double tau, double delta, double sigma_r);

/// Theorem-3 sufficient margins (delta*alpha/sigma_r - 1, delta*alpha^2/sigma_r^2 - 1);
/// both positive certifies concavity of the delta-mode threshold map.
std::pair<bool, std::pair<double, double>> theorem3_sufficient(double delta, double alpha,
                                                               double sigma_r);

/// Exact concavity inequality for the delta-mode map: evaluates the product
/// kappa * (...) whose strict negativity is equivalent to d2alpha/dtau2 < 0.
/// `constant` is the Siegmund boundary constant (the source prints a
/// truncated 1.16 here; 1.166 is used by default for agreement with the ARL map).
std::pair<bool, double> exact_concavity_inequality(double delta, double alpha, double sigma_r,
                                                   double constant = kSiegmundConstant);

/// Closed-form derivatives of the fixed-b Siegmund threshold map:
///   dalpha/dtau  =  b / (exp(2G) - 1)
///   d2alpha/dtau2 = -2 b^3 exp(2G) / (sigma_r^2 (exp(2G) - 1)^3)
/// The second derivative is strictly negative.
std::pair<double, double> siegmund_alpha_derivatives(double alpha, double b, double sigma_r);

struct LinearityProbe {
  double slope = 0.0;
  double intercept = 0.0;
  double max_fit_residual = 0.0;
  std::vector<double> second_derivative_samples;  // interior points
  std::vector<double> impacts;
};

/// Least-squares affine fit of impact vs alpha over a grid, plus central
/// second differences at interior points.
LinearityProbe linearity_probe(const model::AttackMap& map, const std::vector<double>& alpha_grid,
                               double b, const Eigen::MatrixXd& Sigma_r_sqrt);

/// Delta-mode variant: b = delta*alpha at each grid point.
LinearityProbe linearity_probe_delta(const model::AttackMap& map,
                                     const std::vector<double>& alpha_grid, double delta,
                                     const Eigen::MatrixXd& Sigma_r_sqrt);

/// Per-point concavity of the shared-threshold multi-sensor map, Sigma_r =
/// sigma_r I_m. Margin is -d2alpha/dtau2; identical to the m = 1 case.
ConcavityCertificate proposition1_certificate(int m, double b, double sigma_r,
                                              const std::vector<double>& tau_grid);

/// Matrix-covariance variant: rejects non-isotropic Sigma_r, then delegates
/// with sigma_r = sqrt of the common diagonal variance.
ConcavityCertificate proposition1_certificate(const Eigen::MatrixXd& Sigma_r, double b,
                                              const std::vector<double>& tau_grid);

/// CUSUM impact curve over a tau grid: fixed-b mode when delta <= 0,
/// otherwise b = delta*alpha(tau).
ImpactCurve cusum_curve(const model::AttackMap& map, const std::vector<double>& tau_grid, double b,
                        double delta, double sigma_r, const Eigen::MatrixXd& Sigma_r_sqrt);

}  // namespace impact::cusum
