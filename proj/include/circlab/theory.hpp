#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "circlab/dataset_io.hpp"
#include "circlab/types.hpp"

namespace circlab {

struct SideCondition {
  std::string name;
  bool holds = false;
};

struct BoundEntry {
  double value = 0.0;
  bool applicable = true;
  std::vector<SideCondition> side_conditions;
};

// Named bounds in insertion order.
class BoundReport {
 public:
  void add(std::string name, BoundEntry entry);
  void add(std::string name, double value) { add(std::move(name), BoundEntry{value, true, {}}); }
  const BoundEntry* find(const std::string& name) const;
  // Value of an applicable entry, or nullopt.
  std::optional<double> value(const std::string& name) const;
  const std::vector<std::pair<std::string, BoundEntry>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, BoundEntry>> entries_;
};

// Flat hard-cluster interval test at threshold gamma. Entries: pfa_union
// (at ceil(gamma)), pfa_chernoff, pfa (best applicable, capped at 1), pmiss.
BoundReport flat_hard_bounds(int N, int K, double tau, double gamma);

// Flat von Mises interval test. Entries: g, gamma_N, feasible (1/0),
// pfa_chernoff, pfa_union, pfa, pmiss = exp(-c_N^2/2).
BoundReport flat_vm_bounds(int N, int K, double kappa, double tau, double c_N);

// Same as flat_vm_bounds but at an arbitrary threshold gamma: pmiss becomes
// the lower-tail Chernoff bound around N tau + g.
BoundReport flat_vm_bounds_at(int N, int K, double kappa, double tau,
                              double gamma);

// Known-phase count test: union/Chernoff without the leading factor N, and
// the flat hard miss bound.
BoundReport known_theta_bounds(int N, int K, double tau, double gamma);

// Community interval test with threshold k. pfa from the union over windows
// and k-sets; pmiss = 0 for hard clusters (no kappa), else the displayed
// von Mises bound and the direct union bound C(k,2)(1 - p_kappa(tau)).
BoundReport comm_interval_bounds(int n, int k, double tau,
                                 std::optional<double> kappa = std::nullopt);

// Coherence test at beta = (1-eps/4) C(k,2) A(kappa). When B is absent the
// integer B in [3, 4096] minimizing the pfa bound is used.
BoundReport comm_coherence_bounds(int n, int k, double kappa, double epsilon,
                                  std::optional<int> B = std::nullopt);

// Rayleigh test at threshold beta.
BoundReport rayleigh_bounds(int n, int k, double kappa, double beta);

struct RayleighCondition {
  double ratio;        // k^2 A(kappa) / n
  double total_bound;  // 5 exp(-m^2 A^2 / (8 N_E))
};
RayleighCondition rayleigh_condition(int n, int k, double kappa);

// Normalized overlap of two arcs of length 2 pi tau at anchor distance 2 pi u.
double delta_overlap(double tau, double u);
// E[delta^j] for u ~ uniform[0, 1/2].
double delta_moment(double tau, int j);

struct OverlapLaw {
  int N;
  int K;
};
double hypergeom_pmf(OverlapLaw law, int j);

double second_moment_exact_flat_hard(int N, int K, double tau);
double second_moment_exact_flat_vm(int N, int K, double kappa);
double second_moment_exact_comm_hard(int n, int k, double tau);
double second_moment_exact_comm_vm(int n, int k, double kappa);

struct ModelParams {
  ModelId model = ModelId::FlatHard;
  int N = 0;  // N or n
  int K = 0;  // K or k
  std::optional<double> tau;
  std::optional<double> kappa;
};

// Keys: functional (the displayed converse quantity), var_bound (upper bound
// on Var_Q(L) derived from it), second_moment (exact E_Q[L^2] when cheap),
// tv_bound (1/2 sqrt(E_Q[L^2] - 1), from the exact value when present).
std::map<std::string, double> impossibility_functionals(const ModelParams& p);

enum class Verdict { Achievable, Impossible, Indeterminate };
std::string verdict_name(Verdict v);

struct RegimeVerdict {
  Verdict verdict = Verdict::Indeterminate;
  std::string citation;   // empty when Indeterminate
  std::string condition;  // the finite inequality that fired
  std::vector<std::pair<std::string, double>> condition_values;
};

struct RegimeTunables {
  double epsilon = 0.1;
  // Sequence standing in for eps_n -> 0; default 1 / ln n.
  std::optional<double> eps_n;
  // Slack L for o(.) / omega(.) boundaries: o(f) becomes <= f / L and
  // omega(f) becomes >= f L. Default ln N.
  std::optional<double> boundary_slack;
};

RegimeVerdict regime_classify(const ModelParams& p, const RegimeTunables& t = {});
RegimeVerdict known_theta_regime(int N, int K, double tau);

}  // namespace circlab
