#include "circlab/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "circlab/clique.hpp"
#include "circlab/combinations.hpp"
#include "circlab/errors.hpp"
#include "circlab/specfun.hpp"

namespace circlab {
namespace {

// reduce_angle(x - anchor) for x, anchor already in [0, 2 pi).
inline double offset_from(double x, double anchor) {
  const double d = x - anchor;
  return d < 0.0 ? d + kTwoPi : d;
}

Decision decide(bool reject) {
  return reject ? Decision::RejectH0 : Decision::RetainH0;
}

void check_k(const EdgeSample& sample, int k, int min_k) {
  if (k < min_k || k > sample.vertices()) {
    std::ostringstream msg;
    msg << "need " << min_k << " <= k <= n, got k=" << k
        << " n=" << sample.vertices();
    throw ParameterError(msg.str());
  }
}

void check_budget(const EdgeSample& sample, int k, double per_subset,
                  double budget, const char* what) {
  const double subsets = binomial(sample.vertices(), k);
  if (subsets * per_subset > budget) {
    std::ostringstream msg;
    msg << what << ": C(" << sample.vertices() << "," << k << ")=" << subsets
        << " subsets x " << per_subset << " edge operations exceeds the budget "
        << budget << "; use a smaller instance or raise the budget";
    throw CapabilityError(msg.str());
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

double CnSchedule::at(int N) const {
  if (constant) return value;
  return std::pow(std::log(static_cast<double>(std::max(N, 2))), 0.25);
}

std::string CnSchedule::describe() const {
  return constant ? "c=" + fmt(value) : "c=(lnN)^0.25";
}

ResolvedThreshold resolve_threshold(const ThresholdPolicy& policy,
                                    const ThresholdContext& ctx) {
  const auto need_tau = [&]() {
    if (!ctx.tau) throw ParameterError("threshold policy needs tau");
    return *ctx.tau;
  };
  const auto need_kappa = [&]() {
    if (!ctx.kappa) throw ParameterError("threshold policy needs kappa");
    return *ctx.kappa;
  };
  const double N = ctx.N;
  const double K = ctx.K;
  return std::visit(
      [&](const auto& p) -> ResolvedThreshold {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, policy::Fixed>) {
          return {p.value, true, "fixed"};
        } else if constexpr (std::is_same_v<P, policy::FlatHardA1>) {
          return {K, true, "gamma=K"};
        } else if constexpr (std::is_same_v<P, policy::FlatHardA2>) {
          const double tau = need_tau();
          const double c = p.cn.at(ctx.N);
          const double mean = (N - K) * tau;
          const double gamma = mean + K - c * std::sqrt(mean);
          const bool ok = gamma >= 1.0 + (N - 1.0) * tau;
          return {gamma, ok,
                  "gamma_N=(N-K)tau+K-c_N*sqrt((N-K)tau), " + p.cn.describe() +
                      (ok ? "" : ", infeasible: gamma_N < 1+(N-1)tau")};
        } else if constexpr (std::is_same_v<P, policy::FlatVonMises>) {
          const double tau = need_tau();
          const double kappa = need_kappa();
          const double c = p.cn.at(ctx.N);
          const double g =
              K * (arc_prob(Concentration(kappa), ArcFraction(tau)) - tau);
          const double m = N * tau + g;
          const double gamma = m - c * std::sqrt(m);
          const bool ok = gamma >= 1.0 + (N - 1.0) * tau;
          return {gamma, ok,
                  "gamma_N=N*tau+g-c_N*sqrt(N*tau+g), g=" + fmt(g) + ", " +
                      p.cn.describe() +
                      (ok ? "" : ", infeasible: gamma_N < 1+(N-1)tau")};
        } else if constexpr (std::is_same_v<P, policy::CoherencePaper>) {
          return {coherence_threshold(ctx.K, Concentration(need_kappa()),
                                      p.epsilon),
                  true, "beta=(1-eps/4)C(k,2)A(kappa), eps=" + fmt(p.epsilon)};
        } else {
          if (!p.rule) throw ParameterError("custom policy has no rule");
          return {p.rule(ctx), true, "custom:" + p.name};
        }
      },
      policy);
}

std::string describe(const ThresholdPolicy& policy) {
  return std::visit(
      [](const auto& p) -> std::string {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, policy::Fixed>) {
          return "fixed:" + fmt(p.value);
        } else if constexpr (std::is_same_v<P, policy::FlatHardA1>) {
          return "a1";
        } else if constexpr (std::is_same_v<P, policy::FlatHardA2>) {
          return p.cn.constant ? "a2:" + fmt(p.cn.value) : "a2";
        } else if constexpr (std::is_same_v<P, policy::FlatVonMises>) {
          return p.cn.constant ? "vm:" + fmt(p.cn.value) : "vm";
        } else if constexpr (std::is_same_v<P, policy::CoherencePaper>) {
          return "coherence:" + fmt(p.epsilon);
        } else {
          return "custom:" + p.name;
        }
      },
      policy);
}

ThresholdPolicy parse_policy(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  std::optional<double> arg;
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      arg = std::stod(text.substr(colon + 1), &used);
      if (used != text.size() - colon - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ParameterError("bad policy argument in '" + text + "'");
    }
  }
  const auto cn = [&]() {
    if (!arg) return CnSchedule::log_quarter();
    if (*arg <= 0) throw ParameterError("c_N must be positive");
    return CnSchedule::fixed(*arg);
  };
  if (head == "fixed") {
    if (!arg) throw ParameterError("fixed policy needs a value: fixed:<v>");
    return policy::Fixed{*arg};
  }
  if (head == "a1") return policy::FlatHardA1{};
  if (head == "a2") return policy::FlatHardA2{cn()};
  if (head == "vm") return policy::FlatVonMises{cn()};
  if (head == "coherence") {
    const double eps = arg.value_or(0.5);
    if (!(eps > 0 && eps < 1)) throw ParameterError("epsilon must be in (0,1)");
    return policy::CoherencePaper{eps};
  }
  throw ParameterError("unknown policy '" + text +
                       "' (expected fixed:<v>, a1, a2[:c], vm[:c], coherence[:eps])");
}

IntervalCount interval_stat_flat(const FlatSample& sample, ArcFraction tau) {
  const int n = sample.size();
  if (n < 1) throw ParameterError("interval statistic needs a nonempty sample");
  std::vector<double> a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) a[i] = sample.angles[i].value();
  std::sort(a.begin(), a.end());
  const double w = tau.radians();
  if (w >= kTwoPi) return {n, Angle(a[0])};

  int best = 0;
  int best_anchor = 0;
  int end = 0;  // last index (into the doubled sequence) inside the window
  for (int i = 0; i < n; ++i) {
    end = std::max(end, i);
    while (end + 1 < i + n && offset_from(a[(end + 1) % n], a[i]) <= w) ++end;
    if (end - i + 1 > best) {
      best = end - i + 1;
      best_anchor = i;
    }
  }
  return {best, Angle(a[best_anchor])};
}

TestReport interval_test_flat(const FlatSample& sample, ArcFraction tau,
                              const ThresholdPolicy& policy, int K,
                              std::optional<Concentration> kappa) {
  ThresholdContext ctx{sample.size(), K, tau.value(), std::nullopt};
  if (kappa) ctx.kappa = kappa->value();
  const auto threshold = resolve_threshold(policy, ctx);
  const auto stat = interval_stat_flat(sample, tau);
  TestReport r;
  r.statistic = stat.count;
  r.threshold = threshold.value;
  r.decision = decide(r.statistic >= r.threshold);
  r.witness_theta = stat.witness_theta;
  r.work_counter = static_cast<std::uint64_t>(sample.size());
  r.threshold_feasible = threshold.feasible;
  r.threshold_note = threshold.note;
  return r;
}

CommunityInterval interval_stat_community(const EdgeSample& sample, int k,
                                          ArcFraction tau, int max_exact_n) {
  check_k(sample, k, 2);
  const int n = sample.vertices();
  if (n > max_exact_n || n > 64) {
    std::ostringstream msg;
    msg << "community interval statistic: n=" << n
        << " exceeds the exact-search limit " << std::min(max_exact_n, 64)
        << "; use a smaller instance";
    throw CapabilityError(msg.str());
  }
  const double w = tau.radians();
  const auto& angles = sample.edge_angles();
  CommunityInterval out;
  std::vector<VertexMask> adj(static_cast<std::size_t>(n));

  // Some clique in the optimal window has a minimum-angle edge; anchoring the
  // window at that edge's angle loses nothing, so try every edge as anchor
  // and insist the clique contains it.
  int best = 0;
  std::size_t anchor = 0;
  for (int a = 0; a < n && best < k; ++a) {
    for (int b = a + 1; b < n && best < k; ++b, ++anchor) {
      const double theta = angles[anchor].value();
      std::fill(adj.begin(), adj.end(), 0);
      std::size_t e = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++e) {
          if (w >= kTwoPi || offset_from(angles[e].value(), theta) <= w) {
            adj[i] |= VertexMask{1} << j;
            adj[j] |= VertexMask{1} << i;
          }
        }
      }
      out.work += 1;
      const VertexMask required = (VertexMask{1} << a) | (VertexMask{1} << b);
      const VertexMask cands = adj[a] & adj[b];
      const auto res = max_clique_capped(adj, required, cands, best + 1, k);
      out.work += res.nodes;
      if (res.size > best) {
        best = res.size;
        out.witness_theta = Angle(theta);
        out.witness_subset = mask_to_vertices(res.members);
      }
    }
  }
  out.best_size = best;
  out.found = best >= k;
  return out;
}

TestReport interval_test_community(const EdgeSample& sample, int k,
                                   ArcFraction tau, int max_exact_n) {
  const auto stat = interval_stat_community(sample, k, tau, max_exact_n);
  TestReport r;
  r.statistic = stat.best_size;
  r.threshold = k;
  r.decision = decide(stat.found);
  r.witness_theta = stat.witness_theta;
  r.witness_subset = stat.witness_subset;
  r.work_counter = stat.work;
  r.threshold_note = "threshold k";
  return r;
}

SubsetMax coherence_stat(const EdgeSample& sample, int k, double budget) {
  check_k(sample, k, 2);
  check_budget(sample, k, k - 1.0, budget, "coherence statistic");
  const int n = sample.vertices();
  std::vector<std::complex<double>> z(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double x = sample.at(i, j).value();
      z[i * n + j] = z[j * n + i] = {std::cos(x), std::sin(x)};
    }
  }
  const auto exact_sum = [&](const int* c) {
    std::complex<double> s = 0.0;
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) s += z[c[a] * n + c[b]];
    }
    return s;
  };

  RevolvingDoor rd(n, k);
  std::complex<double> sum = exact_sum(rd.data());
  SubsetMax out;
  out.value = std::abs(sum);
  out.subset = rd.current();
  std::uint64_t steps = 1;
  int gone = 0;
  int added = 0;
  while (rd.next(gone, added)) {
    const int* c = rd.data();
    for (int a = 0; a < k; ++a) {
      if (c[a] == added) continue;
      sum -= z[gone * n + c[a]];
      sum += z[added * n + c[a]];
    }
    // Refresh now and then so rounding drift cannot pile up.
    if (++steps % 4096 == 0) sum = exact_sum(c);
    const double v = std::abs(sum);
    if (v > out.value) {
      out.value = v;
      out.subset.assign(c, c + k);
    }
  }
  const auto best = exact_sum(out.subset.data());
  out.value = std::abs(best);
  out.theta = Angle(std::arg(best));
  out.work = steps * static_cast<std::uint64_t>(k - 1);
  return out;
}

double coherence_threshold(int k, Concentration kappa, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ParameterError("coherence epsilon must lie in (0, 1)");
  }
  return (1.0 - epsilon / 4.0) * binomial(k, 2) * mean_resultant(kappa);
}

TestReport coherence_test(const EdgeSample& sample, int k, Concentration kappa,
                          double epsilon, double budget) {
  if (kappa.value() <= 0.0) throw ParameterError("coherence test needs kappa > 0");
  const double beta = coherence_threshold(k, kappa, epsilon);
  const auto stat = coherence_stat(sample, k, budget);
  TestReport r;
  r.statistic = stat.value;
  r.threshold = beta;
  r.decision = decide(stat.value >= beta);
  r.witness_theta = stat.theta;
  r.witness_subset = stat.subset;
  r.work_counter = stat.work;
  r.threshold_note = "beta=(1-eps/4)C(k,2)A(kappa), eps=" + fmt(epsilon);
  return r;
}

double rayleigh_threshold(int k, Concentration kappa) {
  return 0.5 * binomial(k, 2) * mean_resultant(kappa);
}

double rayleigh_threshold_arc(int k, ArcFraction tau) {
  return 0.5 * binomial(k, 2) * arc_mean_resultant(tau);
}

TestReport rayleigh_test(const EdgeSample& sample, int k, Concentration kappa) {
  if (k < 2 || k > sample.vertices()) throw ParameterError("need 2 <= k <= n");
  std::complex<double> sum = 0.0;
  for (const Angle& x : sample.edge_angles()) {
    sum += std::complex<double>(std::cos(x.value()), std::sin(x.value()));
  }
  TestReport r;
  r.statistic = std::abs(sum);
  r.threshold = rayleigh_threshold(k, kappa);
  r.decision = decide(r.statistic >= r.threshold);
  r.witness_theta = Angle(std::arg(sum));
  r.work_counter = sample.edge_angles().size();
  r.threshold_note = "beta=C(k,2)A(kappa)/2";
  return r;
}

std::pair<double, double> circular_variance_min(std::vector<double> angles) {
  const std::size_t m = angles.size();
  if (m < 2) throw ParameterError("variance needs at least two angles");
  std::sort(angles.begin(), angles.end());
  // Shift so the smallest value is 0; equal inputs then give exactly 0.
  const double origin = angles[0];
  for (double& x : angles) x -= origin;
  const double md = static_cast<double>(m);
  double s = 0.0;
  double q = 0.0;
  for (double x : angles) {
    s += x;
    q += x * x;
  }
  // Cut c keeps x_c..x_{m-1} and moves x_0..x_{c-1} up by 2 pi; the best cut
  // has every point within pi of the optimal theta, where linear and
  // circular distances agree.
  double best = INFINITY;
  double best_theta = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    if (c > 0) {
      const double x = angles[c - 1];
      s += kTwoPi;
      q += (x + kTwoPi) * (x + kTwoPi) - x * x;
    }
    const double ss = std::max(0.0, q - s * s / md);
    if (ss < best) {
      best = ss;
      best_theta = s / md;
    }
  }
  return {best / (md - 1.0), reduce_angle(best_theta + origin)};
}

SubsetMax variance_stat(const EdgeSample& sample, int k, double budget) {
  check_k(sample, k, 3);
  const double m = binomial(k, 2);
  check_budget(sample, k, m, budget, "variance statistic");
  const int n = sample.vertices();
  RevolvingDoor rd(n, k);
  std::vector<double> buf;
  buf.reserve(static_cast<std::size_t>(m));
  SubsetMax out;
  out.value = INFINITY;
  std::uint64_t subsets = 0;
  int gone = 0;
  int added = 0;
  do {
    const int* c = rd.data();
    buf.clear();
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) buf.push_back(sample.at(c[a], c[b]).value());
    }
    const auto [v, theta] = circular_variance_min(buf);
    ++subsets;
    if (v < out.value) {
      out.value = v;
      out.subset.assign(c, c + k);
      out.theta = Angle(theta);
    }
  } while (rd.next(gone, added));
  out.work = subsets * static_cast<std::uint64_t>(m);
  return out;
}

TestReport variance_test(const EdgeSample& sample, int k, double sigma2,
                         double budget) {
  if (!(sigma2 >= 0.0)) throw ParameterError("sigma2 must be >= 0");
  const auto stat = variance_stat(sample, k, budget);
  TestReport r;
  r.statistic = stat.value;
  r.threshold = sigma2;
  r.decision = decide(stat.value <= sigma2);
  r.witness_theta = stat.theta;
  r.witness_subset = stat.subset;
  r.work_counter = stat.work;
  r.threshold_note = "reject if V <= sigma2";
  return r;
}

TestReport known_theta_test_flat(const FlatSample& sample, ArcFraction tau,
                                 double gamma, Angle theta) {
  const double w = tau.radians();
  int y = 0;
  for (const Angle& x : sample.angles) {
    if (w >= kTwoPi || offset_from(x.value(), theta.value()) <= w) ++y;
  }
  TestReport r;
  r.statistic = y;
  r.threshold = gamma;
  r.decision = decide(y >= gamma);
  r.witness_theta = theta;
  r.work_counter = static_cast<std::uint64_t>(sample.size());
  r.threshold_note = "count in [theta, theta+2 pi tau]";
  return r;
}

}  // namespace circlab
