#include "impact/curve.hpp"

#include <cstdio>

namespace impact {

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_curve_csv(std::ostream& os, const ImpactCurve& curve) {
  os << "tau,alpha,impact\n";
  for (const auto& p : curve.points)
    os << csv_number(p.tau) << ',' << csv_number(p.alpha) << ',' << csv_number(p.impact) << '\n';
}

void write_certificate_csv(std::ostream& os, const ConcavityCertificate& cert) {
  os << "tau,margin,holds\n";
  for (std::size_t i = 0; i < cert.tau.size(); ++i)
    os << csv_number(cert.tau[i]) << ',' << csv_number(cert.margin[i]) << ','
       << (cert.holds[i] ? 1 : 0) << '\n';
}

}  // namespace impact
