#pragma once

#include <cstddef>
#include <functional>

namespace circlab {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  std::size_t max_subdivisions = 1'000'000;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t subdivisions = 0;
};

// Globally adaptive 7/15-point Gauss-Kronrod integration of f over [a, b].
// Bisects the interval with the largest error estimate until the summed
// estimate drops below abs_tol. Throws NumericError with diagnostics when the
// subdivision budget is exhausted or the integrand produces a non-finite value.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& options = {});

}  // namespace circlab
