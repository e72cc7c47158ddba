#pragma once

// Gamma-family special functions used by the chi^2 threshold map and the
// concavity checks: the regularized lower incomplete gamma P(x;a), its
// inverse in x, and its first two derivatives.

namespace impact::specfun {

/// ln Gamma(x), x > 0. Throws std::domain_error otherwise.
double ln_gamma(double x);

/// Regularized lower incomplete gamma P(x;a) = gamma(a,x)/Gamma(a).
/// Series expansion for x < a+1, continued fraction for the complement
/// otherwise. x >= 0, a > 0.
double rlig_p(double x, double a);

/// Inverse of rlig_p in its first argument: returns x with P(x;a) = q,
/// 0 <= q < 1. Bracketing plus safeguarded Newton; |P(x;a)-q| <= 1e-10.
double rlig_p_inverse(double q, double a);

/// d/dx P(x;a) = x^{a-1} e^{-x} / Gamma(a).
/// For a < 1 and x = 0 the derivative diverges; returns +infinity.
double rlig_p_derivative(double x, double a);

/// d^2/dx^2 P(x;a) = x^{a-2} e^{-x} (a - x - 1) / Gamma(a), x > 0.
double rlig_p_second_derivative(double x, double a);

}  // namespace impact::specfun
