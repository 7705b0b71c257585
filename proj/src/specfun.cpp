#include "circlab/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "circlab/errors.hpp"
#include "circlab/quadrature.hpp"

namespace circlab {
namespace {

using std::numbers::pi;

void require_nonnegative(double x, const char* fn) {
  if (!std::isfinite(x) || x < 0.0) {
    std::ostringstream msg;
    msg << fn << ": argument must be finite and >= 0, got " << x;
    throw DomainError(msg.str());
  }
}

// Sum_{k>=1} (x/2)^{2k} / (k!)^2, i.e. I0(x) - 1. Kept separate from the
// constant term so that log I0 stays accurate for tiny x.
double i0_series_tail(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double tail = 0.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * k);
    tail += term;
    if (term < 1e-17 * (1.0 + tail)) break;
  }
  return tail;
}

double i1_series(double x) {
  const double q = 0.25 * x * x;
  double term = 0.5 * x;
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// Hankel expansion of exp(-x) I_nu(x) sqrt(2 pi x), truncated at the smallest
// term. mu = 4 nu^2.
double hankel_scaled_sum(double x, double mu) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double bessel_i0_scaled_series(double x) {
  require_nonnegative(x, "bessel_i0_scaled_series");
  return std::exp(-x) * (1.0 + i0_series_tail(x));
}

double bessel_i0_scaled_asymptotic(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError("bessel_i0_scaled_asymptotic: argument must be > 0");
  }
  return hankel_scaled_sum(x, 0.0) / std::sqrt(2.0 * pi * x);
}

double bessel_i0_scaled(double x) {
  require_nonnegative(x, "bessel_i0_scaled");
  return x <= kBesselSeriesLimit ? bessel_i0_scaled_series(x)
                                 : bessel_i0_scaled_asymptotic(x);
}

double bessel_i0(double x) {
  require_nonnegative(x, "bessel_i0");
  if (x <= kBesselSeriesLimit) return 1.0 + i0_series_tail(x);
  return std::exp(x) * bessel_i0_scaled_asymptotic(x);
}

double log_bessel_i0(double x) {
  require_nonnegative(x, "log_bessel_i0");
  if (x <= kBesselSeriesLimit) return std::log1p(i0_series_tail(x));
  return x + std::log(bessel_i0_scaled_asymptotic(x));
}

double bessel_i1_scaled(double x) {
  require_nonnegative(x, "bessel_i1_scaled");
  if (x <= kBesselSeriesLimit) return std::exp(-x) * i1_series(x);
  return hankel_scaled_sum(x, 4.0) / std::sqrt(2.0 * pi * x);
}

double bessel_i1(double x) {
  require_nonnegative(x, "bessel_i1");
  if (x <= kBesselSeriesLimit) return i1_series(x);
  return std::exp(x) * hankel_scaled_sum(x, 4.0) / std::sqrt(2.0 * pi * x);
}

double mean_resultant(Concentration kappa) {
  const double k = kappa.value();
  if (k == 0.0) return 0.0;
  if (k <= kBesselSeriesLimit) return i1_series(k) / (1.0 + i0_series_tail(k));
  return hankel_scaled_sum(k, 4.0) / hankel_scaled_sum(k, 0.0);
}

double arc_mean_resultant(ArcFraction tau) {
  const double t = tau.value();
  if (t == 1.0) return 0.0;
  return std::sin(pi * t) / (pi * t);
}

double log_ratio_R(Concentration kappa) {
  const double k = kappa.value();
  if (k == 0.0) return 0.0;
  return log_bessel_i0(2.0 * k) - 2.0 * log_bessel_i0(k);
}

double ratio_R(Concentration kappa) { return std::exp(log_ratio_R(kappa)); }

double log_rho(Concentration kappa, double theta) {
  if (!std::isfinite(theta)) throw DomainError("rho: theta must be finite");
  const double k = kappa.value();
  if (k == 0.0) return 0.0;
  // I0 is even, so |cos| keeps the argument in the domain.
  return log_bessel_i0(2.0 * k * std::abs(std::cos(theta))) -
         2.0 * log_bessel_i0(k);
}

double rho(Concentration kappa, double theta) {
  return std::exp(log_rho(kappa, theta));
}

double arc_prob(Concentration kappa, ArcFraction tau) {
  const double k = kappa.value();
  const double t = tau.value();
  if (t == 1.0) return 1.0;
  if (k == 0.0) return t;
  // Density of vonMises(0, k) is exp(k (cos x - 1)) / (2 pi I0s(k)); the
  // window is symmetric so integrate over [0, pi t] and double.
  const double scale = 1.0 / (pi * bessel_i0_scaled(k));
  QuadratureOptions opts;
  opts.abs_tol = 1e-11 / scale;
  const auto res = integrate(
      [k](double x) { return std::exp(k * (std::cos(x) - 1.0)); }, 0.0,
      pi * t, opts);
  return std::min(1.0, res.value * scale);
}

double kl_divergence(const SignalKind& signal) {
  if (const auto* hard = std::get_if<HardCluster>(&signal)) {
    return -std::log(hard->tau.value());
  }
  const double k = std::get<VonMises>(signal).kappa.value();
  if (k == 0.0) return 0.0;
  return std::max(0.0, k * mean_resultant(Concentration{k}) - log_bessel_i0(k));
}

double gaussian_upper_tail(double x) {
  if (std::isnan(x)) throw DomainError("gaussian_upper_tail: NaN argument");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double c0_objective(double c) {
  const double e = std::erf(c / std::numbers::sqrt2);  // 1 - 2 Q(c)
  return (2.0 / pi) * c / (e * e);
}

double c0_objective_derivative(double c) {
  const double e = std::erf(c / std::numbers::sqrt2);
  const double de = std::sqrt(2.0 / pi) * std::exp(-0.5 * c * c);
  return (2.0 / pi) * (e - 2.0 * c * de) / (e * e * e);
}

C0Constant compute_c0() {
  constexpr double kLo = 1e-4;
  constexpr double kHi = 10.0;
  constexpr double kTol = 1e-8;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

  double a = kLo;
  double b = kHi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = c0_objective(x1);
  double f2 = c0_objective(x2);
  while (b - a > kTol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = c0_objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = c0_objective(x2);
    }
  }
  double c = 0.5 * (a + b);
  if (!(c0_objective(c) < c0_objective(kLo) &&
        c0_objective(c) < c0_objective(kHi))) {
    throw NumericError("compute_c0: no interior minimum on [1e-4, 10]");
  }

  // Polish on the sign of f' (the golden-section value is only accurate to
  // about sqrt(machine epsilon) in c because f is flat at its minimum).
  double lo = c;
  double hi = c;
  double step = 1e-6;
  while (c0_objective_derivative(lo) > 0.0 && lo > kLo) lo = std::max(kLo, lo - step), step *= 2;
  step = 1e-6;
  while (c0_objective_derivative(hi) < 0.0 && hi < kHi) hi = std::min(kHi, hi + step), step *= 2;
  if (!(c0_objective_derivative(lo) <= 0.0 && c0_objective_derivative(hi) >= 0.0)) {
    throw NumericError("compute_c0: failed to bracket the stationary point");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (c0_objective_derivative(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  c = 0.5 * (lo + hi);
  return {c0_objective(c), c, c0_objective_derivative(c)};
}

}  // namespace circlab
