#pragma once

// Special functions used by the detectors and the bounds: modified Bessel
// functions of order 0 and 1, the von Mises mean resultant length A(kappa),
// the second-moment ratio R(kappa), arc probabilities and the Gaussian tail.

#include "circlab/types.hpp"

namespace circlab {

// Branch point between the power series and the asymptotic expansion.
inline constexpr double kBesselSeriesLimit = 30.0;

// I0(x) for x >= 0. Overflows to +inf beyond x ~ 713; use the scaled or log
// forms for large arguments.
double bessel_i0(double x);
// exp(-x) * I0(x).
double bessel_i0_scaled(double x);
// log I0(x), finite for every finite x >= 0.
double log_bessel_i0(double x);

double bessel_i1(double x);
double bessel_i1_scaled(double x);

// Branch-level access, used to check agreement on the crossover band.
double bessel_i0_scaled_series(double x);
double bessel_i0_scaled_asymptotic(double x);

// A(kappa) = I1(kappa) / I0(kappa).
double mean_resultant(Concentration kappa);

// Mean resultant length of the uniform law on an arc: sin(pi tau) / (pi tau).
double arc_mean_resultant(ArcFraction tau);

// R(kappa) = I0(2 kappa) / I0(kappa)^2, evaluated in log space.
double ratio_R(Concentration kappa);
double log_ratio_R(Concentration kappa);

// rho_kappa(theta) = I0(2 kappa cos theta) / I0(kappa)^2.
double rho(Concentration kappa, double theta);
double log_rho(Concentration kappa, double theta);

// Von Mises(0, kappa) mass of [-pi tau, pi tau].
double arc_prob(Concentration kappa, ArcFraction tau);

// D_KL(signal || uniform).
double kl_divergence(const SignalKind& signal);

// Standard normal upper tail Q(x) = P(Z > x).
double gaussian_upper_tail(double x);

struct C0Constant {
  double c0;       // min over c > 0 of (2/pi) c / (1 - 2 Q(c))^2
  double c2_star;  // its minimizer
  double derivative_at_min;
};

// Objective minimized by compute_c0 and its derivative.
double c0_objective(double c);
double c0_objective_derivative(double c);

inline constexpr double kPaperC0 = 0.5057;
inline constexpr double kPaperC2Star = 0.7518;

// Golden-section search on [1e-4, 10] followed by bisection on the sign of
// the derivative. Throws NumericError if the bracket holds no interior minimum.
C0Constant compute_c0();

}  // namespace circlab
