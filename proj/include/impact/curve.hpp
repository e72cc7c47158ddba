#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace impact {

enum class Detector { Chi2, Cusum };

struct CurvePoint {
  double tau;
  double alpha;
  double impact;
};

/// Sampled (tau, alpha, impact) triples for one detector configuration.
/// tau strictly increasing, impact >= 0.
struct ImpactCurve {
  std::vector<CurvePoint> points;
  Detector detector = Detector::Chi2;
  std::string meta;  // config snapshot, free-form
};

enum class CertificateKind { Thm1Sufficient, Thm2LocalIff, Thm3Sufficient, ExactInequality, NumericalOnly };

/// Per-grid-point concavity certificate: which test fired, over which tau
/// values, with the evaluated inequality margin per point (holds <=> margin > 0).
struct ConcavityCertificate {
  CertificateKind kind = CertificateKind::NumericalOnly;
  std::vector<double> tau;
  std::vector<bool> holds;
  std::vector<double> margin;

  bool all_hold() const {
    for (bool h : holds)
      if (!h) return false;
    return true;
  }
};

/// Formats a double with 12 significant digits, '.' decimal separator.
std::string csv_number(double v);

/// Writes "tau,alpha,impact" CSV with header. Deterministic byte-for-byte.
void write_curve_csv(std::ostream& os, const ImpactCurve& curve);

/// Writes "tau,margin,holds" CSV for a certificate.
void write_certificate_csv(std::ostream& os, const ConcavityCertificate& cert);

}  // namespace impact
