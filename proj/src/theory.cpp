#include "circlab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "circlab/combinations.hpp"
#include "circlab/errors.hpp"
#include "circlab/quadrature.hpp"
#include "circlab/specfun.hpp"

namespace circlab {
namespace {

using std::numbers::pi;

// exp(x) capped at 1, so that probability bounds stay readable.
double prob_from_log(double log_value) {
  return log_value >= 0.0 ? 1.0 : std::exp(log_value);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

void check_tau(double tau) {
  require(tau > 0.0 && tau <= 1.0, "tau must lie in (0, 1]");
}

// log of N C(N-1, g-1) tau^(g-1), the union bound over anchored windows.
double log_union_windows(int N, double g, double tau) {
  if (g - 1 > N - 1) return -INFINITY;
  return std::log(static_cast<double>(N)) + log_binomial(N - 1.0, g - 1.0) +
         (g - 1.0) * std::log(tau);
}

double chernoff_upper_exponent(int N, double tau, double gamma) {
  const double mu = 1.0 + (N - 1.0) * tau;
  const double d = gamma - mu;
  return -(d * d) / (mu + gamma);
}

// log(tau^(-2j) E[delta^j]) without overflow; j >= 1.
double log_scaled_delta_moment(double tau, int j) {
  const double lt = std::log(tau);
  const double jp = j + 1.0;
  double bracket = 2.0 / jp;
  if (tau > 0.5) {
    const double r = (2.0 * tau - 1.0) / tau;
    const double rp = std::pow(r, jp);
    bracket = (2.0 / jp) * (1.0 - rp) + rp;
  }
  return -2.0 * j * lt + jp * lt + std::log(bracket);
}

std::vector<double> hypergeom_table(int N, int K) {
  std::vector<double> pmf(static_cast<std::size_t>(K) + 1);
  for (int j = 0; j <= K; ++j) pmf[j] = hypergeom_pmf({N, K}, j);
  return pmf;
}

// (1/2pi) int_0^{2pi} sum_s w_s rho(phi)^{e_s} dphi; the integrand has
// period pi and is even, so integrate on [0, pi/2].
double rho_mixture_mean(const std::vector<double>& weights,
                        const std::vector<double>& exponents, double kappa) {
  const Concentration kap(kappa);
  double top = 0.0;
  const double lr = log_ratio_R(kap);
  for (std::size_t s = 0; s < weights.size(); ++s) {
    if (weights[s] <= 0.0) continue;
    if (exponents[s] * lr > 700.0) {
      std::ostringstream msg;
      msg << "second moment overflows double range (exponent " << exponents[s]
          << " x log R = " << exponents[s] * lr << ")";
      throw NumericError(msg.str());
    }
    top += weights[s] * std::exp(exponents[s] * lr);
  }
  const auto f = [&](double theta) {
    const double l = log_rho(kap, theta);
    double sum = 0.0;
    for (std::size_t s = 0; s < weights.size(); ++s) {
      if (weights[s] > 0.0) sum += weights[s] * std::exp(exponents[s] * l);
    }
    return sum;
  };
  QuadratureOptions opts;
  opts.abs_tol = 1e-11 * std::max(1.0, top);
  return (2.0 / pi) * integrate(f, 0.0, pi / 2.0, opts).value;
}

}  // namespace

void BoundReport::add(std::string name, BoundEntry entry) {
  for (auto& [k, v] : entries_) {
    if (k == name) {
      v = std::move(entry);
      return;
    }
  }
  entries_.emplace_back(std::move(name), std::move(entry));
}

const BoundEntry* BoundReport::find(const std::string& name) const {
  for (const auto& [k, v] : entries_) {
    if (k == name) return &v;
  }
  return nullptr;
}

std::optional<double> BoundReport::value(const std::string& name) const {
  const auto* e = find(name);
  if (!e || !e->applicable) return std::nullopt;
  return e->value;
}

BoundReport flat_hard_bounds(int N, int K, double tau, double gamma) {
  require(K >= 1 && K <= N, "need 1 <= K <= N");
  check_tau(tau);
  BoundReport r;
  const double g = std::ceil(gamma);
  const double union_bound =
      g <= 0 ? 1.0 : prob_from_log(log_union_windows(N, std::max(g, 1.0), tau));
  r.add("pfa_union", union_bound);

  const bool chernoff_ok = gamma >= 1.0 + (N - 1.0) * tau;
  BoundEntry chernoff{
      prob_from_log(std::log(static_cast<double>(N)) +
                    chernoff_upper_exponent(N, tau, gamma)),
      chernoff_ok,
      {{"gamma >= 1+(N-1)tau", chernoff_ok}}};
  r.add("pfa_chernoff", chernoff);
  r.add("pfa", chernoff_ok ? std::min(union_bound, chernoff.value) : union_bound);

  if (gamma <= K) {
    r.add("pmiss", BoundEntry{0.0, true, {{"gamma <= K", true}}});
  } else {
    const double mean = (N - K) * tau;
    const bool ok = mean > 0.0 && mean >= gamma - K;
    const double d = mean - gamma + K;
    r.add("pmiss", BoundEntry{ok ? std::exp(-d * d / (2.0 * mean)) : 1.0, ok,
                              {{"(N-K)tau >= gamma-K", ok}}});
  }
  return r;
}

BoundReport flat_vm_bounds_at(int N, int K, double kappa, double tau,
                              double gamma) {
  require(K >= 1 && K <= N, "need 1 <= K <= N");
  check_tau(tau);
  BoundReport r;
  const double g = K * (arc_prob(Concentration(kappa), ArcFraction(tau)) - tau);
  const double m = N * tau + g;
  r.add("g", g);
  r.add("gamma", gamma);
  const bool feasible = gamma >= 1.0 + (N - 1.0) * tau;
  r.add("feasible", BoundEntry{feasible ? 1.0 : 0.0, true,
                               {{"gamma >= 1+(N-1)tau", feasible}}});
  const double cg = std::ceil(gamma);
  const double union_bound =
      cg <= 0 ? 1.0 : prob_from_log(log_union_windows(N, std::max(cg, 1.0), tau));
  r.add("pfa_union", union_bound);
  const double chern = prob_from_log(std::log(static_cast<double>(N)) +
                                     chernoff_upper_exponent(N, tau, gamma));
  r.add("pfa_chernoff", BoundEntry{chern, feasible,
                                   {{"gamma >= 1+(N-1)tau", feasible}}});
  r.add("pfa", feasible ? std::min(union_bound, chern) : union_bound);
  const bool ok = m > 0.0 && gamma <= m;
  const double d = m - gamma;
  r.add("pmiss", BoundEntry{ok ? std::exp(-d * d / (2.0 * m)) : 1.0, ok,
                            {{"gamma <= N tau + g", ok}}});
  return r;
}

BoundReport flat_vm_bounds(int N, int K, double kappa, double tau, double c_N) {
  require(c_N > 0.0, "c_N must be positive");
  require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
  const double g = K * (arc_prob(Concentration(kappa), ArcFraction(tau)) - tau);
  const double m = N * tau + g;
  const double gamma = m - c_N * std::sqrt(m);
  BoundReport r = flat_vm_bounds_at(N, K, kappa, tau, gamma);
  r.add("gamma_N", gamma);
  r.add("c_N", c_N);
  r.add("pmiss", std::exp(-0.5 * c_N * c_N));
  return r;
}

BoundReport known_theta_bounds(int N, int K, double tau, double gamma) {
  require(K >= 1 && K <= N, "need 1 <= K <= N");
  check_tau(tau);
  BoundReport r;
  const double g = std::ceil(gamma);
  const double logN = std::log(static_cast<double>(N));
  const double union_bound =
      g <= 0 ? 1.0
             : prob_from_log(log_union_windows(N, std::max(g, 1.0), tau) - logN);
  r.add("pfa_union", union_bound);
  const bool ok = gamma >= 1.0 + (N - 1.0) * tau;
  const double chern = prob_from_log(chernoff_upper_exponent(N, tau, gamma));
  r.add("pfa_chernoff", BoundEntry{chern, ok, {{"gamma >= 1+(N-1)tau", ok}}});
  r.add("pfa", ok ? std::min(union_bound, chern) : union_bound);
  const auto hard = flat_hard_bounds(N, K, tau, gamma);
  r.add("pmiss", *hard.find("pmiss"));
  return r;
}

BoundReport comm_interval_bounds(int n, int k, double tau,
                                 std::optional<double> kappa) {
  require(k >= 2 && k <= n, "need 2 <= k <= n");
  check_tau(tau);
  BoundReport r;
  const double m = binomial(k, 2);
  const double lt = std::log(tau);
  const double log_pfa =
      std::log(m) - lt +
      k * (std::log(static_cast<double>(n) / k) + 1.0 + 0.5 * (k - 1.0) * lt);
  r.add("log_pfa", log_pfa);
  r.add("pfa", prob_from_log(log_pfa));
  if (!kappa) {
    r.add("pmiss", BoundEntry{0.0, true, {{"hard cluster", true}}});
    return r;
  }
  const double kap = *kappa;
  const double s = std::abs(std::sin(pi * tau));
  const bool ok = s > 1e-300 && kap > 0.0;
  double vm = 1.0;
  if (ok) {
    const double log_vm = std::log(m) + (std::cos(pi * tau) - 1.0) * kap -
                          std::log(2.0 * pi * pi) -
                          std::log(bessel_i0_scaled(kap)) - std::log(kap) -
                          std::log(s);
    vm = prob_from_log(log_vm);
  }
  r.add("pmiss_vm", BoundEntry{vm, ok, {{"sin(pi tau) != 0 and kappa > 0", ok}}});
  const double un = std::min(
      1.0, m * (1.0 - arc_prob(Concentration(kap), ArcFraction(tau))));
  r.add("pmiss_union", un);
  r.add("pmiss", ok ? std::min(vm, un) : un);
  return r;
}

BoundReport comm_coherence_bounds(int n, int k, double kappa, double epsilon,
                                  std::optional<int> B) {
  require(k >= 2 && k <= n, "need 2 <= k <= n");
  require(kappa > 0.0, "coherence bounds need kappa > 0");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  const double A = mean_resultant(Concentration(kappa));
  const double lead = std::log(n * std::numbers::e / k);
  const double shrink = (1.0 - epsilon / 4.0) * (1.0 - epsilon / 4.0) * (k - 1.0) * A * A / 2.0;
  const auto log_pfa = [&](int b) {
    const double c = std::cos(pi / b);
    return std::log(static_cast<double>(b)) + k * (lead - shrink * c * c);
  };
  int best = 3;
  if (B) {
    require(*B >= 3, "B must be >= 3");
    best = *B;
  } else {
    for (int b = 4; b <= 4096; ++b) {
      if (log_pfa(b) < log_pfa(best)) best = b;
    }
  }
  BoundReport r;
  r.add("B", best);
  r.add("log_pfa", log_pfa(best));
  r.add("pfa", prob_from_log(log_pfa(best)));
  r.add("pmiss", std::exp(-epsilon * epsilon * binomial(k, 2) * A * A / 32.0));
  return r;
}

BoundReport rayleigh_bounds(int n, int k, double kappa, double beta) {
  require(k >= 2 && k <= n, "need 2 <= k <= n");
  const double ne = binomial(n, 2);
  const double mu1 = binomial(k, 2) * mean_resultant(Concentration(kappa));
  BoundReport r;
  r.add("mu1", mu1);
  r.add("pfa", std::min(1.0, 4.0 * std::exp(-beta * beta / (2.0 * ne))));
  const bool ok = beta < mu1;
  const double d = mu1 - beta;
  r.add("pmiss", BoundEntry{ok ? std::exp(-d * d / (2.0 * ne)) : 1.0, ok,
                            {{"beta < mu1", ok}}});
  return r;
}

RayleighCondition rayleigh_condition(int n, int k, double kappa) {
  require(k >= 2 && k <= n, "need 2 <= k <= n");
  const double A = mean_resultant(Concentration(kappa));
  const double m = binomial(k, 2);
  const double ne = binomial(n, 2);
  return {static_cast<double>(k) * k * A / n,
          5.0 * std::exp(-m * m * A * A / (8.0 * ne))};
}

double delta_overlap(double tau, double u) {
  check_tau(tau);
  require(u >= 0.0 && u <= 0.5, "u must lie in [0, 1/2]");
  if (tau <= 0.5) return std::max(0.0, tau - u);
  return (2.0 * tau - 1.0) + std::max(0.0, 1.0 - tau - u);
}

double delta_moment(double tau, int j) {
  check_tau(tau);
  require(j >= 1, "moment order must be >= 1");
  const double jp = j + 1.0;
  if (tau <= 0.5) return 2.0 / jp * std::pow(tau, jp);
  const double b = 2.0 * tau - 1.0;
  return 2.0 / jp * (std::pow(tau, jp) - std::pow(b, jp)) +
         2.0 * (tau - 0.5) * std::pow(b, j);
}

double hypergeom_pmf(OverlapLaw law, int j) {
  const int N = law.N;
  const int K = law.K;
  require(K >= 0 && K <= N, "hypergeometric law needs 0 <= K <= N");
  if (j < 0 || j > K || K - j > N - K) return 0.0;
  return std::exp(log_binomial(K, j) + log_binomial(N - K, K - j) -
                  log_binomial(N, K));
}

double second_moment_exact_flat_hard(int N, int K, double tau) {
  require(K >= 1 && K <= N, "need 1 <= K <= N");
  check_tau(tau);
  double sum = hypergeom_pmf({N, K}, 0);
  for (int j = 1; j <= K; ++j) {
    const double p = hypergeom_pmf({N, K}, j);
    if (p > 0.0) sum += p * std::exp(log_scaled_delta_moment(tau, j));
  }
  return std::max(1.0, sum);
}

double second_moment_exact_comm_hard(int n, int k, double tau) {
  require(k >= 2 && k <= n, "need 2 <= k <= n");
  check_tau(tau);
  double sum = 0.0;
  for (int s = 0; s <= k; ++s) {
    const double p = hypergeom_pmf({n, k}, s);
    const int m = s * (s - 1) / 2;
    if (p > 0.0) sum += m == 0 ? p : p * std::exp(log_scaled_delta_moment(tau, m));
  }
  return std::max(1.0, sum);
}

double second_moment_exact_flat_vm(int N, int K, double kappa) {
  require(K >= 1 && K <= N, "need 1 <= K <= N");
  if (kappa == 0.0) return 1.0;
  std::vector<double> e(static_cast<std::size_t>(K) + 1);
  for (int j = 0; j <= K; ++j) e[j] = j;
  return std::max(1.0, rho_mixture_mean(hypergeom_table(N, K), e, kappa));
}

double second_moment_exact_comm_vm(int n, int k, double kappa) {
  require(k >= 2 && k <= n, "need 2 <= k <= n");
  if (kappa == 0.0) return 1.0;
  std::vector<double> e(static_cast<std::size_t>(k) + 1);
  for (int s = 0; s <= k; ++s) e[s] = s * (s - 1) / 2.0;
  return std::max(1.0, rho_mixture_mean(hypergeom_table(n, k), e, kappa));
}

std::map<std::string, double> impossibility_functionals(const ModelParams& p) {
  std::map<std::string, double> out;
  const double N = p.N;
  const double K = p.K;
  const auto need_tau = [&]() {
    if (!p.tau) throw ParameterError("model needs tau");
    check_tau(*p.tau);
    return *p.tau;
  };
  const auto need_kappa = [&]() {
    if (!p.kappa) throw ParameterError("model needs kappa");
    return Concentration(*p.kappa).value();
  };
  std::optional<double> exact;
  switch (p.model) {
    case ModelId::FlatHard: {
      const double tau = need_tau();
      const double f = std::exp(std::log(2.0 * N * tau * tau / (K * K)) +
                                (K + 1.0) * std::log1p(K / (N * tau)));
      out["functional"] = f;
      if (tau <= 0.5) out["var_bound"] = f;
      exact = second_moment_exact_flat_hard(p.N, p.K, tau);
      break;
    }
    case ModelId::FlatVonMises: {
      const double kappa = need_kappa();
      const double lr = log_ratio_R(Concentration(kappa));
      const double rm1 = std::expm1(lr);
      const double a = K * K / N;
      out["functional"] = a * rm1 - lr;
      out["var_bound"] = (std::exp(a * rm1) - std::exp(-a)) / std::exp(lr);
      if (K * lr < 700.0) exact = second_moment_exact_flat_vm(p.N, p.K, kappa);
      break;
    }
    case ModelId::CommunityHard: {
      const double tau = need_tau();
      const double f = K * K / N * std::expm1(-0.5 * (K - 1.0) * std::log(tau));
      out["functional"] = f;
      out["var_bound"] = std::expm1(f);
      exact = second_moment_exact_comm_hard(p.N, p.K, tau);
      break;
    }
    case ModelId::CommunityVonMises: {
      const double kappa = need_kappa();
      const double lr = log_ratio_R(Concentration(kappa));
      const double f = K * K / N * std::expm1(0.5 * (K - 1.0) * lr);
      out["functional"] = f;
      out["var_bound"] = std::expm1(f);
      if (binomial(p.K, 2) * lr < 700.0) {
        exact = second_moment_exact_comm_vm(p.N, p.K, kappa);
      }
      break;
    }
  }
  if (exact) {
    out["second_moment"] = *exact;
    out["tv_bound"] = 0.5 * std::sqrt(std::max(0.0, *exact - 1.0));
  } else if (out.count("var_bound")) {
    out["tv_bound"] = 0.5 * std::sqrt(std::max(0.0, out["var_bound"]));
  }
  return out;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Achievable: return "achievable";
    case Verdict::Impossible: return "impossible";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "?";
}

}  // namespace circlab
