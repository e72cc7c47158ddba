#include "impact/cusum.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace impact::cusum {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw std::domain_error(std::string(name) + " must be positive");
}

// exp(2G) - 1 - 2G, series-guarded against cancellation for small G.
double expm1_2g_minus_2g(double g) {
  if (g < 1e-4) {
    double g2 = g * g;
    return 2.0 * g2 + (4.0 / 3.0) * g2 * g + (2.0 / 3.0) * g2 * g2;
  }
  return std::expm1(2.0 * g) - 2.0 * g;
}

double siegmund_g(double alpha, double b, double sigma_r) {
  return (b / (sigma_r * sigma_r)) * alpha + kSiegmundConstant * (b / sigma_r);
}

struct Affine {
  double slope, intercept, max_residual;
};

Affine affine_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double intercept = (sy - slope * sx) / n;
  double r = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    r = std::max(r, std::fabs(y[i] - (slope * x[i] + intercept)));
  return {slope, intercept, r};
}

LinearityProbe probe_impl(const model::AttackMap& map, const std::vector<double>& alpha_grid,
                          const Eigen::MatrixXd& Sigma_r_sqrt, double b, double delta) {
  if (alpha_grid.size() < 3)
    throw std::invalid_argument("linearity_probe: grid needs at least 3 points");
  LinearityProbe out;
  out.impacts.reserve(alpha_grid.size());
  for (double alpha : alpha_grid) {
    double beff = delta > 0.0 ? delta * alpha : b;
    out.impacts.push_back(cusum_impact(map, alpha, beff, Sigma_r_sqrt).value);
  }
  Affine fit = affine_fit(alpha_grid, out.impacts);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.max_fit_residual = fit.max_residual;
  for (std::size_t i = 1; i + 1 < alpha_grid.size(); ++i) {
    double h1 = alpha_grid[i] - alpha_grid[i - 1];
    double h2 = alpha_grid[i + 1] - alpha_grid[i];
    double d2 = 2.0 * ((out.impacts[i + 1] - out.impacts[i]) / h2 -
                       (out.impacts[i] - out.impacts[i - 1]) / h1) /
                (h1 + h2);
    out.second_derivative_samples.push_back(d2);
  }
  return out;
}

}  // namespace

lp::LinearProgram build_impact_lp(const model::AttackMap& map, int row, double alpha, double b,
                                  const Eigen::MatrixXd& Sigma_r_sqrt) {
  const int N = map.N;
  const int m = map.m;
  if (row < 0 || row >= map.H.rows())
    throw std::invalid_argument("build_impact_lp: row out of range");
  require_positive(alpha, "build_impact_lp: alpha");
  require_positive(b, "build_impact_lp: b");

  const int nv = 3 * N * m;
  lp::LinearProgram prog;
  prog.A = Eigen::MatrixXd::Zero(6 * N * m, nv);
  prog.rhs = Eigen::VectorXd::Zero(6 * N * m);
  prog.c = Eigen::VectorXd::Zero(nv);

  auto qp = [&](int k, int i) { return k * m + i; };
  auto qm = [&](int k, int i) { return N * m + k * m + i; };
  auto av = [&](int k, int i) { return 2 * N * m + k * m + i; };

  int r = 0;
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < m; ++i) {
      // Q+[k+1] >= 0
      prog.A(r, qp(k, i)) = -1.0;
      prog.rhs[r++] = 0.0;
      // Q+[k+1] <= alpha
      prog.A(r, qp(k, i)) = 1.0;
      prog.rhs[r++] = alpha;
      // Q+[k+1] >= Q+[k] - b + r_i[k]
      prog.A(r, qp(k, i)) = -1.0;
      if (k > 0) prog.A(r, qp(k - 1, i)) = 1.0;
      for (int j = 0; j < m; ++j) prog.A(r, av(k, j)) += Sigma_r_sqrt(i, j);
      prog.rhs[r++] = b;
      // Q-[k+1] >= 0
      prog.A(r, qm(k, i)) = -1.0;
      prog.rhs[r++] = 0.0;
      // Q-[k+1] <= alpha
      prog.A(r, qm(k, i)) = 1.0;
      prog.rhs[r++] = alpha;
      // Q-[k+1] >= Q-[k] - b - r_i[k]
      prog.A(r, qm(k, i)) = -1.0;
      if (k > 0) prog.A(r, qm(k - 1, i)) = 1.0;
      for (int j = 0; j < m; ++j) prog.A(r, av(k, j)) -= Sigma_r_sqrt(i, j);
      prog.rhs[r++] = b;
    }
  }

  for (int k = 0; k < N; ++k)
    for (int i = 0; i < m; ++i) prog.c[av(k, i)] = map.H(row, k * m + i);
  return prog;
}

CusumImpactResult cusum_impact(const model::AttackMap& map, double alpha, double b,
                               const Eigen::MatrixXd& Sigma_r_sqrt) {
  const int Nm = map.N * map.m;
  CusumImpactResult best;
  best.value = -1.0;
  for (int row = 0; row < map.H.rows(); ++row) {
    for (int sign : {1, -1}) {
      lp::LinearProgram prog = build_impact_lp(map, row, alpha, b, Sigma_r_sqrt);
      if (sign < 0) prog.c = -prog.c;
      lp::LpSolution sol = lp::solve_lp(prog);
      if (sol.status != lp::LpStatus::Optimal) {
        std::ostringstream os;
        os << "cusum_impact: LP solve failed (row " << row << ", sign " << sign << ", status "
           << static_cast<int>(sol.status) << ")";
        throw std::runtime_error(os.str());
      }
      if (sol.value > best.value) {
        best.value = sol.value;
        best.attack = sol.x.tail(Nm);
        best.row = row;
        best.sign = sign;
      }
    }
  }
  if (best.value < 0.0) best.value = 0.0;  // zero attack is always stealthy
  return best;
}

double siegmund_arl(double alpha, double b, double sigma_r) {
  if (alpha < 0.0) throw std::domain_error("siegmund_arl: alpha must be >= 0");
  require_positive(b, "siegmund_arl: b");
  require_positive(sigma_r, "siegmund_arl: sigma_r");
  double g = siegmund_g(alpha, b, sigma_r);
  if (g > 350.0) return std::numeric_limits<double>::infinity();
  return 0.5 * sigma_r * sigma_r * expm1_2g_minus_2g(g) / (b * b);
}

double siegmund_tau_floor(double b, double sigma_r) {
  return siegmund_arl(0.0, b, sigma_r);
}

double threshold_from_tau_siegmund(double tau, double b, double sigma_r) {
  require_positive(b, "threshold_from_tau_siegmund: b");
  require_positive(sigma_r, "threshold_from_tau_siegmund: sigma_r");
  const double floor = siegmund_tau_floor(b, sigma_r);
  if (!(tau > floor)) {
    std::ostringstream os;
    os << "threshold_from_tau_siegmund: tau = " << tau
       << " is below the alpha=0 floor tau_min = " << floor;
    throw std::domain_error(os.str());
  }
  double lo = 0.0, hi = 1.0;
  while (siegmund_arl(hi, b, sigma_r) < tau) hi *= 2.0;
  double alpha = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double f = siegmund_arl(alpha, b, sigma_r) - tau;
    if (std::fabs(f) <= 1e-10 * tau) return alpha;
    if (f > 0.0) hi = alpha; else lo = alpha;
    double g = siegmund_g(alpha, b, sigma_r);
    double dtau = std::expm1(2.0 * g) / b;  // dtau/dalpha
    double next = alpha - f / dtau;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    alpha = next;
  }
  return alpha;
}

double threshold_from_tau_delta(double tau, double delta, double sigma_r) {
  require_positive(delta, "threshold_from_tau_delta: delta");
  require_positive(sigma_r, "threshold_from_tau_delta: sigma_r");
  // The alpha -> 0 limit of arl(alpha, delta*alpha, .) is kSiegmundConstant^2.
  const double floor = kSiegmundConstant * kSiegmundConstant;
  if (!(tau > floor)) {
    std::ostringstream os;
    os << "threshold_from_tau_delta: tau = " << tau
       << " is below the alpha=0 floor tau_min = " << floor;
    throw std::domain_error(os.str());
  }
  auto arl = [&](double a) { return siegmund_arl(a, delta * a, sigma_r); };
  double lo = 0.0, hi = 1.0;
  while (arl(hi) < tau) hi *= 2.0;
  // Monotonicity check on the bracket before trusting bisection.
  double prev = arl(hi / 1024.0);
  for (int i = 1; i <= 16; ++i) {
    double cur = arl(hi * static_cast<double>(i) / 16.0);
    if (cur < prev - 1e-12 * (1.0 + std::fabs(prev)))
      throw std::runtime_error(
          "threshold_from_tau_delta: Siegmund map is not monotone on the search bracket");
    prev = cur;
  }
  double alpha = 0.5 * hi;
  for (int it = 0; it < 300; ++it) {
    double f = arl(alpha) - tau;
    if (std::fabs(f) <= 1e-10 * tau) return alpha;
    if (f > 0.0) hi = alpha; else lo = alpha;
    alpha = 0.5 * (lo + hi);
  }
  return alpha;
}

std::pair<bool, std::pair<double, double>> theorem3_sufficient(double delta, double alpha,
                                                               double sigma_r) {
  require_positive(delta, "theorem3_sufficient: delta");
  require_positive(alpha, "theorem3_sufficient: alpha");
  require_positive(sigma_r, "theorem3_sufficient: sigma_r");
  double m1 = delta * alpha / sigma_r - 1.0;
  double m2 = delta * alpha * alpha / (sigma_r * sigma_r) - 1.0;
  return {m1 > 0.0 && m2 > 0.0, {m1, m2}};
}

std::pair<bool, double> exact_concavity_inequality(double delta, double alpha, double sigma_r,
                                                   double constant) {
  require_positive(delta, "exact_concavity_inequality: delta");
  require_positive(alpha, "exact_concavity_inequality: alpha");
  require_positive(sigma_r, "exact_concavity_inequality: sigma_r");
  const double s = sigma_r, s2 = sigma_r * sigma_r;
  const double b = delta * alpha;
  const double g = (b / s2) * alpha + constant * (b / s);
  if (g > 350.0) return {true, -std::numeric_limits<double>::infinity()};
  const double e = std::exp(2.0 * g);
  const double da_s = delta * alpha / s;
  const double kappa = e * (2.0 * delta * alpha * alpha / s2 + constant * da_s - 1.0) + 1.0 +
                       constant * da_s;
  const double grad = 2.0 * delta * alpha / s2 + constant * delta / s;
  const double inner = e * (6.0 * delta * alpha * alpha / s2 + 4.0 * constant * da_s - 3.0 -
                            2.0 * alpha * alpha * grad * grad) +
                       3.0 + 2.0 * constant * da_s;
  const double lhs = kappa * inner;
  return {lhs < 0.0, lhs};
}

std::pair<double, double> siegmund_alpha_derivatives(double alpha, double b, double sigma_r) {
  require_positive(alpha, "siegmund_alpha_derivatives: alpha");
  require_positive(b, "siegmund_alpha_derivatives: b");
  require_positive(sigma_r, "siegmund_alpha_derivatives: sigma_r");
  double g = siegmund_g(alpha, b, sigma_r);
  if (g > 350.0) return {0.0, -0.0};
  double em = std::expm1(2.0 * g);
  double first = b / em;
  double second = -2.0 * b * b * b * std::exp(2.0 * g) / (sigma_r * sigma_r * em * em * em);
  return {first, second};
}

LinearityProbe linearity_probe(const model::AttackMap& map, const std::vector<double>& alpha_grid,
                               double b, const Eigen::MatrixXd& Sigma_r_sqrt) {
  require_positive(b, "linearity_probe: b");
  return probe_impl(map, alpha_grid, Sigma_r_sqrt, b, 0.0);
}

LinearityProbe linearity_probe_delta(const model::AttackMap& map,
                                     const std::vector<double>& alpha_grid, double delta,
                                     const Eigen::MatrixXd& Sigma_r_sqrt) {
  require_positive(delta, "linearity_probe_delta: delta");
  return probe_impl(map, alpha_grid, Sigma_r_sqrt, 0.0, delta);
}

ConcavityCertificate proposition1_certificate(int m, double b, double sigma_r,
                                              const std::vector<double>& tau_grid) {
  if (m < 1) throw std::domain_error("proposition1_certificate: m must be positive");
  require_positive(b, "proposition1_certificate: b");
  require_positive(sigma_r, "proposition1_certificate: sigma_r");
  ConcavityCertificate cert;
  cert.kind = CertificateKind::Thm3Sufficient;
  for (double tau : tau_grid) {
    // Shared threshold obeys the scalar Siegmund map, so the certificate is
    // identical to m = 1.
    double alpha = threshold_from_tau_siegmund(tau, b, sigma_r);
    auto [first, second] = siegmund_alpha_derivatives(alpha, b, sigma_r);
    (void)first;
    cert.tau.push_back(tau);
    cert.margin.push_back(-second);
    cert.holds.push_back(second < 0.0);
  }
  return cert;
}

ConcavityCertificate proposition1_certificate(const Eigen::MatrixXd& Sigma_r, double b,
                                              const std::vector<double>& tau_grid) {
  const int m = static_cast<int>(Sigma_r.rows());
  if (Sigma_r.cols() != m || m < 1)
    throw std::invalid_argument("proposition1_certificate: Sigma_r must be square");
  const double d = Sigma_r(0, 0);
  if ((Sigma_r - d * Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("proposition1_certificate: Sigma_r must be isotropic (sigma^2 I)");
  if (!(d > 0.0)) throw std::invalid_argument("proposition1_certificate: Sigma_r must be SPD");
  return proposition1_certificate(m, b, std::sqrt(d), tau_grid);
}

ImpactCurve cusum_curve(const model::AttackMap& map, const std::vector<double>& tau_grid, double b,
                        double delta, double sigma_r, const Eigen::MatrixXd& Sigma_r_sqrt) {
  ImpactCurve curve;
  curve.detector = Detector::Cusum;
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    if (i > 0 && tau_grid[i] <= tau_grid[i - 1])
      throw std::invalid_argument("cusum_curve: tau grid must be strictly increasing");
    double tau = tau_grid[i];
    double alpha = delta > 0.0 ? threshold_from_tau_delta(tau, delta, sigma_r)
                               : threshold_from_tau_siegmund(tau, b, sigma_r);
    double beff = delta > 0.0 ? delta * alpha : b;
    curve.points.push_back({tau, alpha, cusum_impact(map, alpha, beff, Sigma_r_sqrt).value});
  }
  return curve;
}

}  // namespace impact::cusum
