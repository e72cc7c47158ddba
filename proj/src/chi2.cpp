#include "impact/chi2.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "impact/specfun.hpp"

namespace impact::chi2 {

namespace {

void check_grid(const std::vector<double>& grid, double lo) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < lo) throw std::invalid_argument("tau grid values must be >= 1");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw std::invalid_argument("tau grid must be strictly increasing");
  }
}

double factorial(int z) {
  double f = 1.0;
  for (int i = 2; i <= z; ++i) f *= i;
  return f;
}

}  // namespace

double threshold_from_tau(double tau, int m) {
  if (tau < 1.0) throw std::domain_error("threshold_from_tau: tau must be >= 1");
  if (m < 1) throw std::domain_error("threshold_from_tau: m must be positive");
  return 2.0 * specfun::rlig_p_inverse(1.0 - 1.0 / tau, 0.5 * m);
}

double tau_from_threshold(double alpha, int m) {
  if (alpha < 0.0) throw std::domain_error("tau_from_threshold: alpha must be >= 0");
  return 1.0 / (1.0 - specfun::rlig_p(0.5 * alpha, 0.5 * m));
}

std::pair<double, int> f_of_H(const model::AttackMap& map) {
  double best = -1.0;
  int row = 0;
  for (int i = 0; i < map.block_norms.rows(); ++i) {
    double s = map.block_norms.row(i).sum();
    if (s > best) {
      best = s;
      row = i;
    }
  }
  return {best, row};
}

double chi2_impact(const model::AttackMap& map, double alpha) {
  if (alpha < 0.0) throw std::domain_error("chi2_impact: alpha must be >= 0");
  return std::sqrt(alpha) * f_of_H(map).first;
}

Eigen::VectorXd chi2_optimal_attack(const model::AttackMap& map, double alpha) {
  if (alpha < 0.0) throw std::domain_error("chi2_optimal_attack: alpha must be >= 0");
  const int row = f_of_H(map).second;
  const double s = std::sqrt(alpha);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<long>(map.N) * map.m);
  for (int j = 0; j < map.N; ++j) {
    double nrm = map.block_norms(row, j);
    if (nrm > 0.0) {
      a.segment(j * map.m, map.m) = s * map.block(row, j).transpose() / nrm;
    } else {
      a[j * map.m] = s;  // keeps the statistic at alpha without moving row i*
    }
  }
  return a;
}

std::optional<double> theorem1_domain(int m) {
  if (m < 1) throw std::domain_error("theorem1_domain: m must be positive");
  if (m < 2) return std::nullopt;  // m/2 - 1 < 0 <= P^{-1}
  double x = 0.5 * m - 1.0;
  if (x == 0.0) return 1.0;
  return 1.0 / (1.0 - specfun::rlig_p(x, 0.5 * m));
}

std::pair<bool, double> theorem2_local_check(double tau, int m) {
  if (m < 2 || m % 2 != 0) throw std::domain_error("theorem2_local_check: m must be even, >= 2");
  if (tau < 1.0) throw std::domain_error("theorem2_local_check: tau must be >= 1");
  const int z = m / 2 - 1;
  const double zfact = factorial(z);
  const double alpha = threshold_from_tau(tau, m);
  if (alpha == 0.0 && z >= 1)
    return {true, std::numeric_limits<double>::infinity()};
  double rhs = 2.0 * tau * std::pow(0.5 * alpha, z) * std::exp(-0.5 * alpha);
  if (z >= 1) rhs += 2.0 * z * zfact / alpha;
  const double margin = (rhs - zfact) / zfact;
  return {margin > 0.0, margin};
}

ImpactCurve chi2_curve(const model::AttackMap& map, int m, const std::vector<double>& tau_grid) {
  check_grid(tau_grid, 1.0);
  const double f = f_of_H(map).first;
  ImpactCurve curve;
  curve.detector = Detector::Chi2;
  curve.points.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    double alpha = threshold_from_tau(tau, m);
    curve.points.push_back({tau, alpha, std::sqrt(alpha) * f});
  }
  return curve;
}

ImpactCurve chi2_curve_constant_f(double f, int m, const std::vector<double>& tau_grid,
                                  ConstantFMetric metric) {
  check_grid(tau_grid, 1.0);
  ImpactCurve curve;
  curve.detector = Detector::Chi2;
  curve.points.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    double alpha = threshold_from_tau(tau, m);
    double impact = metric == ConstantFMetric::Deviation ? std::sqrt(alpha) * f : alpha * f;
    curve.points.push_back({tau, alpha, impact});
  }
  return curve;
}

ConcavityCertificate theorem2_certificate(int m, const std::vector<double>& tau_grid) {
  check_grid(tau_grid, 1.0);
  ConcavityCertificate cert;
  cert.kind = CertificateKind::Thm2LocalIff;
  for (double tau : tau_grid) {
    auto [holds, margin] = theorem2_local_check(tau, m);
    cert.tau.push_back(tau);
    cert.holds.push_back(holds);
    cert.margin.push_back(margin);
  }
  return cert;
}

}  // namespace impact::chi2
