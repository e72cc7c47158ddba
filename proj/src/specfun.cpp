#include "impact/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace impact::specfun {

namespace {

constexpr double kTermTol = 1e-14;
constexpr int kMaxIter = 500;

void require(bool ok, const char* msg, double v) {
  if (!ok) throw std::domain_error(std::string(msg) + " (got " + std::to_string(v) + ")");
}

// Lower series: P(x;a) = x^a e^{-x} / Gamma(a+1) * sum_k x^k / ((a+1)...(a+k)).
double p_series(double x, double a) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int k = 0; k < kMaxIter; ++k) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kTermTol) break;
  }
  return sum * std::exp(-x + a * std::log(x) - ln_gamma(a));
}

// Continued fraction for Q(x;a) = 1 - P(x;a), modified Lentz.
double q_contfrac(double x, double a) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kTermTol) break;
  }
  return h * std::exp(-x + a * std::log(x) - ln_gamma(a));
}

}  // namespace

double ln_gamma(double x) {
  require(x > 0.0, "ln_gamma: argument must be positive", x);
  return std::lgamma(x);
}

double rlig_p(double x, double a) {
  require(x >= 0.0, "rlig_p: x must be nonnegative", x);
  require(a > 0.0, "rlig_p: a must be positive", a);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return p_series(x, a);
  return 1.0 - q_contfrac(x, a);
}

double rlig_p_derivative(double x, double a) {
  require(x >= 0.0, "rlig_p_derivative: x must be nonnegative", x);
  require(a > 0.0, "rlig_p_derivative: a must be positive", a);
  if (x == 0.0) {
    if (a < 1.0) return std::numeric_limits<double>::infinity();
    if (a == 1.0) return 1.0;
    return 0.0;
  }
  return std::exp((a - 1.0) * std::log(x) - x - ln_gamma(a));
}

double rlig_p_second_derivative(double x, double a) {
  require(x > 0.0, "rlig_p_second_derivative: x must be positive", x);
  require(a > 0.0, "rlig_p_second_derivative: a must be positive", a);
  return std::exp((a - 2.0) * std::log(x) - x - ln_gamma(a)) * (a - x - 1.0);
}

double rlig_p_inverse(double q, double a) {
  require(q >= 0.0 && q < 1.0, "rlig_p_inverse: q must lie in [0,1)", q);
  require(a > 0.0, "rlig_p_inverse: a must be positive", a);
  if (q == 0.0) return 0.0;

  // Bracket [0, hi], doubling hi until P(hi;a) exceeds q.
  double lo = 0.0;
  double hi = a + 10.0 * std::sqrt(a) + 20.0;
  while (rlig_p(hi, a) < q) hi *= 2.0;

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double f = rlig_p(x, a) - q;
    if (f > 0.0) hi = x; else lo = x;
    double dp = rlig_p_derivative(x, a);
    // Iterate on the abscissa, not on |f|: near q -> 1 the density is tiny and
    // an |f| stop would leave x orders of magnitude less accurate than f.
    double xn = (dp > 0.0 && std::isfinite(dp)) ? x - f / dp : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);  // Newton left the bracket
    if (std::fabs(xn - x) <= 1e-14 * (1.0 + std::fabs(x))) return xn;
    x = xn;
  }
  return x;
}

}  // namespace impact::specfun
