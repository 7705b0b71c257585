#pragma once

#include <numbers>
#include <string>
#include <variant>

namespace circlab {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Von Mises concentration; kappa >= 0 and finite.
class Concentration {
 public:
  explicit Concentration(double kappa);
  double value() const { return kappa_; }

 private:
  double kappa_;
};

// Arc length as a fraction of the full circle; 0 < tau <= 1.
class ArcFraction {
 public:
  explicit ArcFraction(double tau);
  double value() const { return tau_; }
  // Arc length in radians.
  double radians() const { return kTwoPi * tau_; }

 private:
  double tau_;
};

// Reduces any finite real into [0, 2*pi) with a single correction step.
double reduce_angle(double radians);

// Point on the circle, canonically stored in [0, 2*pi).
class Angle {
 public:
  Angle() = default;
  explicit Angle(double radians) : value_(reduce_angle(radians)) {}
  double value() const { return value_; }

  friend bool operator==(Angle, Angle) = default;

 private:
  double value_ = 0.0;
};

// Minimal unsigned angular separation in [0, pi].
double circular_distance(double a, double b);

// True when x lies in the closed arc [anchor, anchor + width] taken mod 2*pi.
// Widths >= 2*pi cover the whole circle.
bool in_arc(double x, double anchor, double width);

struct HardCluster {
  ArcFraction tau;
};

struct VonMises {
  Concentration kappa;
};

// Which alternative distribution is planted.
using SignalKind = std::variant<HardCluster, VonMises>;

std::string describe(const SignalKind& signal);

}  // namespace circlab
