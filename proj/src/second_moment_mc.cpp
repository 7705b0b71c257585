#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "circlab/combinations.hpp"
#include "circlab/errors.hpp"
#include "circlab/lab.hpp"
#include "circlab/random.hpp"
#include "circlab/specfun.hpp"

namespace circlab {
namespace {

// Measure of {theta : every x in [theta, theta + w]} for sorted angles x.
// Each point excludes the arc (x, x + 2 pi - w) of anchors, and the union
// of those equal-length arcs covers min(gap, 2 pi - w) after each point.
double anchor_measure(const std::vector<double>& sorted, double w) {
  if (w >= kTwoPi) return kTwoPi;
  const double g = kTwoPi - w;
  double covered = 0.0;
  const std::size_t m = sorted.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double gap = i + 1 < m ? sorted[i + 1] - sorted[i]
                                 : sorted[0] + kTwoPi - sorted[i];
    covered += std::min(gap, g);
  }
  return std::max(0.0, kTwoPi - covered);
}

void check_enumeration(int n, int k) {
  if (binomial(n, k) > kMaxSecondMomentSubsets) {
    std::ostringstream msg;
    msg << "empirical second moment: C(" << n << "," << k << ")="
        << binomial(n, k) << " subsets exceeds " << kMaxSecondMomentSubsets;
    throw CapabilityError(msg.str());
  }
}

bool trivial_signal(const SignalKind& s) {
  if (const auto* h = std::get_if<HardCluster>(&s)) return h->tau.value() == 1.0;
  return std::get<VonMises>(s).kappa.value() == 0.0;
}

}  // namespace

double likelihood_ratio_flat(const FlatSample& x, int K, const SignalKind& s) {
  const int N = x.size();
  if (K < 1 || K > N) throw ParameterError("need 1 <= K <= N");
  check_enumeration(N, K);
  if (trivial_signal(s)) return 1.0;
  double total = 0.0;
  RevolvingDoor rd(N, K);
  int out = 0;
  int in = 0;
  std::vector<double> pts(static_cast<std::size_t>(K));
  do {
    const int* c = rd.data();
    if (const auto* h = std::get_if<HardCluster>(&s)) {
      for (int i = 0; i < K; ++i) pts[i] = x.angles[c[i]].value();
      std::sort(pts.begin(), pts.end());
      const double tau = h->tau.value();
      total += std::exp(std::log(anchor_measure(pts, h->tau.radians()) / kTwoPi) -
                        K * std::log(tau));
    } else {
      const double kappa = std::get<VonMises>(s).kappa.value();
      double sx = 0.0;
      double sy = 0.0;
      for (int i = 0; i < K; ++i) {
        sx += std::cos(x.angles[c[i]].value());
        sy += std::sin(x.angles[c[i]].value());
      }
      // (1/2pi) int exp(kappa sum cos(x_i - theta)) dtheta = I0(kappa |S|).
      total += std::exp(log_bessel_i0(kappa * std::hypot(sx, sy)) -
                        K * log_bessel_i0(kappa));
    }
  } while (rd.next(out, in));
  return total / binomial(N, K);
}

double likelihood_ratio_community(const EdgeSample& x, int k, const SignalKind& s) {
  const int n = x.vertices();
  if (k < 2 || k > n) throw ParameterError("need 2 <= k <= n");
  check_enumeration(n, k);
  if (trivial_signal(s)) return 1.0;
  const int m = k * (k - 1) / 2;
  double total = 0.0;
  RevolvingDoor rd(n, k);
  int out = 0;
  int in = 0;
  std::vector<double> pts(static_cast<std::size_t>(m));
  do {
    const int* c = rd.data();
    std::size_t e = 0;
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) pts[e++] = x.edge_angles()[edge_index(n, c[a], c[b])].value();
    }
    if (const auto* h = std::get_if<HardCluster>(&s)) {
      std::sort(pts.begin(), pts.end());
      const double tau = h->tau.value();
      total += std::exp(std::log(anchor_measure(pts, h->tau.radians()) / kTwoPi) -
                        m * std::log(tau));
    } else {
      const double kappa = std::get<VonMises>(s).kappa.value();
      double sx = 0.0;
      double sy = 0.0;
      for (double p : pts) {
        sx += std::cos(p);
        sy += std::sin(p);
      }
      total += std::exp(log_bessel_i0(kappa * std::hypot(sx, sy)) -
                        m * log_bessel_i0(kappa));
    }
  } while (rd.next(out, in));
  return total / binomial(n, k);
}

MomentEstimate empirical_second_moment(const ModelParams& params, int trials,
                                       std::uint64_t seed) {
  if (trials < 2) throw ParameterError("need at least 2 trials");
  const bool hard = params.model == ModelId::FlatHard ||
                    params.model == ModelId::CommunityHard;
  if (hard && !params.tau) throw ParameterError("model needs tau");
  if (!hard && !params.kappa) throw ParameterError("model needs kappa");
  const SignalKind s = hard ? SignalKind{HardCluster{ArcFraction(*params.tau)}}
                            : SignalKind{VonMises{Concentration(*params.kappa)}};
  const bool comm = is_community(params.model);
  if (comm) {
    if (params.K < 2 || params.K > params.N) throw ParameterError("need 2 <= k <= n");
  } else if (params.K < 1 || params.K > params.N) {
    throw ParameterError("need 1 <= K <= N");
  }
  check_enumeration(params.N, params.K);
  if (trivial_signal(s)) return {1.0, 0.0};

  std::vector<double> values(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(t), 3);
    double L = 0.0;
    if (comm) {
      L = likelihood_ratio_community(gen_community(params.N, params.K, s, false, rng),
                                     params.K, s);
    } else {
      L = likelihood_ratio_flat(gen_flat(params.N, params.K, s, false, rng), params.K, s);
    }
    values[t] = L * L;
  }
  const double n = trials;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  // For a sample mean the leave-one-out jackknife variance reduces to
  // s^2 / n with the unbiased sample variance s^2.
  const double var = ss / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace circlab
