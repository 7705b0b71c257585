#include "circlab/types.hpp"

#include <cmath>
#include <sstream>

#include "circlab/errors.hpp"

namespace circlab {

Concentration::Concentration(double kappa) : kappa_(kappa) {
  if (!std::isfinite(kappa) || kappa < 0.0) {
    std::ostringstream msg;
    msg << "concentration must be finite and >= 0, got " << kappa;
    throw DomainError(msg.str());
  }
}

ArcFraction::ArcFraction(double tau) : tau_(tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    std::ostringstream msg;
    msg << "arc fraction must lie in (0, 1], got " << tau;
    throw DomainError(msg.str());
  }
}

double reduce_angle(double radians) {
  if (!std::isfinite(radians)) throw DomainError("angle must be finite");
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative number plus 2*pi can round up to 2*pi itself.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double circular_distance(double a, double b) {
  const double d = reduce_angle(a - b);
  return std::min(d, kTwoPi - d);
}

bool in_arc(double x, double anchor, double width) {
  if (width >= kTwoPi) return true;
  return reduce_angle(x - anchor) <= width;
}

std::string describe(const SignalKind& signal) {
  std::ostringstream out;
  out.precision(17);
  if (const auto* hard = std::get_if<HardCluster>(&signal)) {
    out << "hard(tau=" << hard->tau.value() << ")";
  } else {
    out << "vonmises(kappa=" << std::get<VonMises>(signal).kappa.value() << ")";
  }
  return out.str();
}

}  // namespace circlab
