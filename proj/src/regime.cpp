#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "circlab/combinations.hpp"
#include "circlab/errors.hpp"
#include "circlab/specfun.hpp"
#include "circlab/theory.hpp"

// Finite-size reading of the asymptotic regime statements.
//
// Boundary slack L (default ln N): tau = o(f) is read as tau <= f / L and
// tau = omega(f) as tau >= f L.
// Size regimes use r = max(1, ln ln n): k = o(log n) iff k <= ln n / r,
// k = omega(log n) iff k >= r ln n, otherwise k = c log n with c = k / ln n.
// "K fixed" in the flat model is the o(log N) case; otherwise K = N^alpha
// with alpha = ln K / ln N.

namespace circlab {
namespace {

using std::numbers::pi;

enum class SizeRegime { Small, LogLinear, Large };

struct Sizes {
  double logn;
  double r;
  SizeRegime regime;
  double c;  // k / ln n
};

Sizes size_regime(int n, int k) {
  const double logn = std::log(static_cast<double>(n));
  const double r = std::max(1.0, std::log(std::max(logn, 1.0)));
  SizeRegime regime = SizeRegime::LogLinear;
  if (k <= logn / r) regime = SizeRegime::Small;
  if (k >= r * logn) regime = SizeRegime::Large;
  return {logn, r, regime, k / logn};
}

const char* size_name(SizeRegime s) {
  switch (s) {
    case SizeRegime::Small: return "o(log n)";
    case SizeRegime::LogLinear: return "c log n";
    case SizeRegime::Large: return "omega(log n)";
  }
  return "?";
}

struct Builder {
  RegimeVerdict v;

  void value(const std::string& name, double x) {
    v.condition_values.emplace_back(name, x);
  }
  RegimeVerdict fire(Verdict verdict, std::string citation,
                     std::string condition) {
    v.verdict = verdict;
    v.citation = std::move(citation);
    v.condition = std::move(condition);
    return v;
  }
  RegimeVerdict none(std::string why) {
    v.verdict = Verdict::Indeterminate;
    v.citation.clear();
    v.condition = std::move(why);
    return v;
  }
};

RegimeVerdict flat_hard(const ModelParams& p, const RegimeTunables& t) {
  if (!p.tau) throw ParameterError("flat-hard classification needs tau");
  const double N = p.N;
  const double K = p.K;
  const double tau = *p.tau;
  const double eps = t.epsilon;
  const double logN = std::log(N);
  const double L = t.boundary_slack.value_or(logN);
  const auto sz = size_regime(p.N, p.K);
  Builder b;
  b.value("tau", tau);
  b.value("slack_L", L);

  if (K >= 2 && sz.regime == SizeRegime::Small) {
    const double t0 = std::pow(N, -1.0 - 1.0 / (K - 1.0));
    b.value("N^(-1-1/(K-1))", t0);
    if (tau <= t0 / L) {
      return b.fire(Verdict::Achievable, "cor1-b1",
                    "K fixed (K <= lnN/r) and tau <= N^(-1-1/(K-1))/L");
    }
    if (tau >= t0 * L) {
      return b.fire(Verdict::Impossible, "cor2-b1",
                    "K fixed (K <= lnN/r) and tau >= N^(-1-1/(K-1))*L");
    }
    return b.none("K fixed, tau inside the slack band around N^(-1-1/(K-1))");
  }

  const double alpha = std::log(K) / logN;
  b.value("alpha", alpha);
  if (alpha <= 0.5) {
    const double ach = K * K / ((2.0 + eps) * N * logN);
    b.value("K^2/((2+eps)N lnN)", ach);
    if (tau <= ach) {
      return b.fire(Verdict::Achievable, "cor1-b2",
                    "alpha <= 1/2 and tau <= K^2/((2+eps)N lnN)");
    }
  }
  if (alpha < 0.5) {
    const double imp = K * K / ((1.0 - 2.0 * alpha) * N * logN);
    b.value("K^2/((1-2alpha)N lnN)", imp);
    if (tau > imp) {
      return b.fire(Verdict::Impossible, "cor2-b2",
                    "alpha < 1/2 and tau > K^2/((1-2alpha)N lnN)");
    }
  }
  if (alpha > 0.5 && alpha < 1.0 && tau <= 1.0 - eps) {
    return b.fire(Verdict::Achievable, "cor1-b3", "1/2 < alpha < 1 and tau <= 1-eps");
  }
  return b.none("no flat hard-cluster condition holds");
}

RegimeVerdict flat_vm(const ModelParams& p, const RegimeTunables& t) {
  if (!p.kappa) throw ParameterError("flat-vm classification needs kappa");
  const double N = p.N;
  const double K = p.K;
  const double kappa = *p.kappa;
  const double logN = std::log(N);
  const double alpha = std::log(K) / logN;
  const double c_eff = K * K * std::sqrt(kappa) / (N * logN);
  static const C0Constant c0 = compute_c0();
  Builder b;
  b.value("alpha", alpha);
  b.value("c_eff=K^2 sqrt(kappa)/(N lnN)", c_eff);
  b.value("c0_paper", kPaperC0);
  b.value("c0_computed", c0.c0);
  b.value("c_eff>c0_computed", c_eff > c0.c0 ? 1.0 : 0.0);
  if (alpha > 0.0 && alpha <= 0.5 && c_eff > kPaperC0) {
    return b.fire(Verdict::Achievable, "cor3-b1",
                  "alpha <= 1/2 and K^2 sqrt(kappa)/(N lnN) > 0.5057");
  }
  if (alpha > 0.5 && alpha < 1.0 && kappa >= t.epsilon) {
    return b.fire(Verdict::Achievable, "cor3-b2", "1/2 < alpha < 1 and kappa >= eps");
  }
  const double limit = (1.0 - 2.0 * alpha) / (2.0 * std::sqrt(pi));
  b.value("(1-2alpha)/(2 sqrt(pi))", limit);
  if (alpha > 0.0 && alpha < 0.5 && c_eff < limit) {
    return b.fire(Verdict::Impossible, "cor4",
                  "alpha < 1/2 and K^2 sqrt(kappa)/(N lnN) < (1-2alpha)/(2 sqrt(pi))");
  }
  return b.none("no flat von Mises condition holds");
}

RegimeVerdict comm_hard(const ModelParams& p, const RegimeTunables& t) {
  if (!p.tau) throw ParameterError("comm-hard classification needs tau");
  const double n = p.N;
  const double k = p.K;
  const double tau = *p.tau;
  const double eps = t.epsilon;
  const auto sz = size_regime(p.N, p.K);
  const double eps_n = t.eps_n.value_or(1.0 / sz.logn);
  Builder b;
  b.value("tau", tau);
  b.value("c=k/ln n", sz.c);
  b.value("r", sz.r);
  const std::string reg = size_name(sz.regime);

  if (sz.regime == SizeRegime::LogLinear) {
    const double lim = std::exp(-2.0 / sz.c);
    b.value("exp(-2/c)", lim);
    if (tau <= lim) {
      return b.fire(Verdict::Achievable, "cor5-b1", "k = c log n and tau <= exp(-2/c)");
    }
  }
  if (k > 3.0 / eps) {
    const double lim = std::pow(k / (n * std::numbers::e), (2.0 + eps) / (k - 1.0));
    b.value("(k/(ne))^((2+eps)/(k-1))", lim);
    if (tau <= lim) {
      return b.fire(Verdict::Achievable, "cor5-b2",
                    "3/eps < k and tau <= (k/(ne))^((2+eps)/(k-1))");
    }
  }
  if (sz.regime == SizeRegime::Large) {
    const double lim = 1.0 - 2.0 * (1.0 + eps) / (k - 1.0) * std::log(n * std::numbers::e / k);
    b.value("1-2(1+eps)/(k-1) ln(ne/k)", lim);
    if (tau <= lim) {
      return b.fire(Verdict::Achievable, "cor5-b3",
                    "k = omega(log n) and tau <= 1-2(1+eps)/(k-1) ln(ne/k)");
    }
  }
  if (k >= 3) {
    const double lim = std::pow(k / (n * std::numbers::e),
                                (1.0 + eps) * k / (binomial(p.K, 2) - 1.0));
    b.value("(k/(ne))^((1+eps)k/(C(k,2)-1))", lim);
    if (tau <= lim) {
      return b.fire(Verdict::Achievable, "cor5-b4",
                    "k >= 3 and tau <= (k/(ne))^((1+eps)k/(C(k,2)-1))");
    }
  }
  if (k > 3.0 / eps && k <= n / sz.r) {
    const double lim = std::pow(k / n, (2.0 + eps) / (k - 1.0));
    b.value("(k/n)^((2+eps)/(k-1))", lim);
    if (tau <= lim) {
      return b.fire(Verdict::Achievable, "cor5-b5",
                    "3/eps < k = o(n) and tau <= (k/n)^((2+eps)/(k-1))");
    }
  }

  if (sz.regime == SizeRegime::LogLinear && tau > std::exp(-2.0 / sz.c)) {
    return b.fire(Verdict::Impossible, "cor6-b1", "k = c log n and tau > exp(-2/c)");
  }
  if (k <= std::sqrt(n) / sz.r) {
    const double lim = std::exp(-(2.0 - eps) * std::log(n / (k * k)) / (k - 1.0));
    b.value("exp(-(2-eps)ln(n/k^2)/(k-1))", lim);
    if (tau >= lim) {
      return b.fire(Verdict::Impossible, "cor6-b2",
                    "k = o(sqrt n) and tau >= exp(-(2-eps)ln(n/k^2)/(k-1))");
    }
  }
  if (sz.regime == SizeRegime::Large) {
    const double lim =
        1.0 - 2.0 * (1.0 - eps) / (k - 1.0) * std::log1p(eps_n * n / (k * k));
    b.value("eps_n", eps_n);
    b.value("1-2(1-eps)/(k-1) ln(1+eps_n n/k^2)", lim);
    if (tau >= lim) {
      return b.fire(Verdict::Impossible, "cor6-b3",
                    "k = omega(log n) and tau >= 1-2(1-eps)/(k-1) ln(1+eps_n n/k^2)");
    }
  }
  return b.none("no community hard-cluster condition holds (size regime " + reg + ")");
}

RegimeVerdict comm_vm(const ModelParams& p, const RegimeTunables& t) {
  if (!p.kappa) throw ParameterError("comm-vm classification needs kappa");
  const double n = p.N;
  const double k = p.K;
  const double kappa = *p.kappa;
  const double eps = t.epsilon;
  const auto sz = size_regime(p.N, p.K);
  const double A = mean_resultant(Concentration(kappa));
  const double lr = log_ratio_R(Concentration(kappa));
  Builder b;
  b.value("kappa", kappa);
  b.value("c=k/ln n", sz.c);
  b.value("A(kappa)", A);

  if (sz.regime == SizeRegime::Small && k > 3.0 / eps) {
    const double lim = (4.0 / (pi * pi) + eps) * std::log(k) *
                       std::pow(n / k, 4.0 * (1.0 + eps) / (k - 1.0));
    b.value("(4/pi^2+eps) ln k (n/k)^(4(1+eps)/(k-1))", lim);
    if (kappa >= lim) {
      return b.fire(Verdict::Achievable, "cor7-b1",
                    "3/eps < k = o(log n) and kappa >= (4/pi^2+eps) ln k (n/k)^(4(1+eps)/(k-1))");
    }
  }
  if (sz.regime == SizeRegime::LogLinear) {
    b.value("A^2 c", A * A * sz.c);
    if (sz.c > 2.0 && A * A * sz.c > 2.0) {
      return b.fire(Verdict::Achievable, "cor7-b2", "k = c log n, c > 2 and A(kappa)^2 c > 2");
    }
    const double lim = 2.0 * std::log(k) / (1.0 - std::cos(pi * std::exp(-2.0 / sz.c)));
    b.value("2 ln k/(1-cos(pi exp(-2/c)))", lim);
    if (kappa >= lim) {
      return b.fire(Verdict::Achievable, "cor7-b3",
                    "k = c log n and kappa >= 2 ln k/(1-cos(pi exp(-2/c)))");
    }
  }
  if (sz.regime == SizeRegime::Large) {
    const double lim = (1.0 + eps) * std::sqrt(8.0 * sz.logn / (k - 1.0));
    b.value("(1+eps) sqrt(8 ln n/(k-1))", lim);
    if (kappa >= lim) {
      return b.fire(Verdict::Achievable, "cor7-b4",
                    "k = omega(log n) and kappa >= (1+eps) sqrt(8 ln n/(k-1))");
    }
  }

  if (sz.regime == SizeRegime::Small) {
    const double lim = std::pow(n / (k * k), (4.0 - eps) / (k - 1.0));
    b.value("(n/k^2)^((4-eps)/(k-1))", lim);
    if (kappa <= lim) {
      return b.fire(Verdict::Impossible, "cor8-b1",
                    "k = o(log n) and kappa <= (n/k^2)^((4-eps)/(k-1))");
    }
  }
  if (sz.regime == SizeRegime::LogLinear) {
    b.value("c log R(kappa)", sz.c * lr);
    if (sz.c * lr < 2.0) {
      return b.fire(Verdict::Impossible, "cor8-b2", "k = c log n and c log R(kappa) < 2");
    }
  }
  if (sz.regime == SizeRegime::Large) {
    const double cexp = std::log(k) / sz.logn;
    b.value("c'=ln k/ln n", cexp);
    if (cexp < 0.5) {
      const double lim = 4.0 * (1.0 - 2.0 * cexp - eps) * sz.logn / (k - 1.0);
      b.value("4(1-2c'-eps) ln n/(k-1)", lim);
      if (kappa * kappa <= lim) {
        return b.fire(Verdict::Impossible, "cor8-b3",
                      "k = omega(log n), k <= n^c' with c' < 1/2, kappa^2 <= 4(1-2c'-eps) ln n/(k-1)");
      }
    }
  }
  return b.none(std::string("no community von Mises condition holds (size regime ") +
                size_name(sz.regime) + ")");
}

}  // namespace

RegimeVerdict regime_classify(const ModelParams& p, const RegimeTunables& t) {
  if (p.K < 1 || p.K > p.N) throw ParameterError("need 1 <= K <= N");
  if (!(t.epsilon > 0.0 && t.epsilon < 1.0)) {
    throw ParameterError("epsilon must lie in (0, 1)");
  }
  switch (p.model) {
    case ModelId::FlatHard: return flat_hard(p, t);
    case ModelId::FlatVonMises: return flat_vm(p, t);
    case ModelId::CommunityHard: return comm_hard(p, t);
    case ModelId::CommunityVonMises: return comm_vm(p, t);
  }
  return {};
}

RegimeVerdict known_theta_regime(int N, int K, double tau) {
  Builder b;
  const double logN = std::log(static_cast<double>(N));
  const double ratio = static_cast<double>(K) * K / N;
  b.value("K^2/N", ratio);
  if (ratio > 1.0) return b.none("K^2 > N: outside the known-phase statement");
  const double ach = ratio / logN;
  const double imp = std::min(1.0, ratio * logN);
  b.value("K^2/(N lnN)", ach);
  b.value("min(1, K^2 lnN/N)", imp);
  if (tau <= ach) {
    return b.fire(Verdict::Achievable, "prop1-a", "K^2 <= N and tau <= K^2/(N lnN)");
  }
  if (tau >= imp) {
    return b.fire(Verdict::Impossible, "prop1-b", "K^2 <= N and tau >= min(1, K^2 lnN/N)");
  }
  return b.none("tau between K^2/(N lnN) and K^2 lnN/N");
}

}  // namespace circlab
