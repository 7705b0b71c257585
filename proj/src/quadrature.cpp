#include "circlab/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "circlab/errors.hpp"

namespace circlab {
namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd Kronrod nodes (indices 1, 3, 5, 7).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  double abs_value;

  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment evaluate(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = 0.0;
  double gauss = 0.0;
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < kKronrodNodes.size(); ++i) {
    const double dx = half * kKronrodNodes[i];
    const double y = (i + 1 == kKronrodNodes.size())
                         ? f(center)
                         : f(center - dx) + f(center + dx);
    if (!std::isfinite(y)) {
      std::ostringstream msg;
      msg << "integrand is not finite near x=" << center << " on [" << a
          << ", " << b << "]";
      throw NumericError(msg.str());
    }
    kronrod += kKronrodWeights[i] * y;
    abs_sum += kKronrodWeights[i] * std::abs(y);
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * y;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half),
          abs_sum * std::abs(half)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& options) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integrate: limits must be finite");
  }
  if (a == b) return {};

  std::priority_queue<Segment> work;
  work.push(evaluate(f, a, b));
  double total = work.top().value;
  double error = work.top().error;
  double abs_total = work.top().abs_value;
  std::size_t subdivisions = 0;

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  while (error > std::max(options.abs_tol, 50.0 * kEps * abs_total)) {
    if (subdivisions >= options.max_subdivisions) {
      std::ostringstream msg;
      msg << "integrate: no convergence on [" << a << ", " << b << "] after "
          << subdivisions << " subdivisions (value=" << total
          << ", error estimate=" << error << ", tolerance=" << options.abs_tol
          << ")";
      throw NumericError(msg.str());
    }
    const Segment worst = work.top();
    work.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = evaluate(f, worst.a, mid);
    const Segment right = evaluate(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    abs_total += left.abs_value + right.abs_value - worst.abs_value;
    work.push(left);
    work.push(right);
    ++subdivisions;
  }

  // Re-sum from the segments to shed accumulated update drift.
  double value = 0.0;
  double err = 0.0;
  std::vector<Segment> segments;
  segments.reserve(work.size());
  while (!work.empty()) {
    segments.push_back(work.top());
    work.pop();
  }
  for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
    value += it->value;
    err += it->error;
  }
  return {value, err, subdivisions};
}

}  // namespace circlab
