#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "circlab/models.hpp"
#include "circlab/types.hpp"

namespace circlab {

enum class Decision { RejectH0, RetainH0 };

struct TestReport {
  double statistic = 0.0;
  double threshold = 0.0;
  Decision decision = Decision::RetainH0;
  std::optional<Angle> witness_theta;
  std::optional<std::vector<int>> witness_subset;
  std::uint64_t work_counter = 0;
  // False when a flat recipe produced gamma_N < 1 + (N-1) tau. The test still
  // runs with that threshold.
  bool threshold_feasible = true;
  std::string threshold_note;
};

// c_N schedule for the flat recipes: (ln N)^{1/4} by default, or a constant.
struct CnSchedule {
  bool constant = false;
  double value = 0.0;

  static CnSchedule log_quarter() { return {}; }
  static CnSchedule fixed(double c) { return {true, c}; }
  double at(int N) const;
  std::string describe() const;
};

// What a policy may look at when turning itself into a number.
struct ThresholdContext {
  int N = 0;  // N, or n for community tests
  int K = 0;  // K, or k
  std::optional<double> tau;
  std::optional<double> kappa;
};

namespace policy {
struct Fixed {
  double value;
};
// gamma = K.
struct FlatHardA1 {};
// gamma_N = (N-K) tau + K - c_N sqrt((N-K) tau).
struct FlatHardA2 {
  CnSchedule cn;
};
// gamma_N = N tau + g - c_N sqrt(N tau + g), g = K (p_kappa(tau) - tau).
struct FlatVonMises {
  CnSchedule cn;
};
// beta = (1 - eps/4) C(k,2) A(kappa).
struct CoherencePaper {
  double epsilon = 0.5;
};
struct Custom {
  std::string name;
  std::function<double(const ThresholdContext&)> rule;
};
}  // namespace policy

using ThresholdPolicy =
    std::variant<policy::Fixed, policy::FlatHardA1, policy::FlatHardA2,
                 policy::FlatVonMises, policy::CoherencePaper, policy::Custom>;

struct ResolvedThreshold {
  double value = 0.0;
  bool feasible = true;
  std::string note;
};

ResolvedThreshold resolve_threshold(const ThresholdPolicy& policy,
                                    const ThresholdContext& ctx);
std::string describe(const ThresholdPolicy& policy);
// Parses fixed:<v>, a1, a2[:<c>], vm[:<c>], coherence[:<eps>].
ThresholdPolicy parse_policy(const std::string& text);

struct IntervalCount {
  int count = 0;
  Angle witness_theta;
};

// sup over theta of #{i : X_i in [theta, theta + 2 pi tau]}, attained at a
// data point. Witness is the first maximizing anchor in angular order.
IntervalCount interval_stat_flat(const FlatSample& sample, ArcFraction tau);

TestReport interval_test_flat(const FlatSample& sample, ArcFraction tau,
                              const ThresholdPolicy& policy, int K,
                              std::optional<Concentration> kappa = std::nullopt);

struct CommunityInterval {
  bool found = false;
  // Largest m <= k such that some m-set has every internal edge in one
  // window; equals k iff found.
  int best_size = 0;
  std::optional<Angle> witness_theta;
  std::optional<std::vector<int>> witness_subset;
  std::uint64_t work = 0;
};

inline constexpr int kDefaultMaxExactN = 48;
inline constexpr double kDefaultEnumerationBudget = 1e8;

CommunityInterval interval_stat_community(const EdgeSample& sample, int k,
                                          ArcFraction tau,
                                          int max_exact_n = kDefaultMaxExactN);

// Rejects iff a k-set fits in one window (statistic best_size >= k).
TestReport interval_test_community(const EdgeSample& sample, int k,
                                   ArcFraction tau,
                                   int max_exact_n = kDefaultMaxExactN);

struct SubsetMax {
  double value = 0.0;
  std::vector<int> subset;
  std::optional<Angle> theta;
  std::uint64_t work = 0;
};

// max over k-subsets C of |sum_{e in E(C)} exp(i X_e)|.
SubsetMax coherence_stat(const EdgeSample& sample, int k,
                         double budget = kDefaultEnumerationBudget);

double coherence_threshold(int k, Concentration kappa, double epsilon);

TestReport coherence_test(const EdgeSample& sample, int k, Concentration kappa,
                          double epsilon = 0.5,
                          double budget = kDefaultEnumerationBudget);

double rayleigh_threshold(int k, Concentration kappa);
// Same midpoint rule for hard clusters: C(k,2) sin(pi tau) / (2 pi tau).
double rayleigh_threshold_arc(int k, ArcFraction tau);
TestReport rayleigh_test(const EdgeSample& sample, int k, Concentration kappa);

// V_C of one set of edge angles: min over theta of
// sum |X_e - theta|^2 / (m - 1) with circular distances. Also returns the
// minimizing theta.
std::pair<double, double> circular_variance_min(std::vector<double> angles);

// min over k-subsets of V_C.
SubsetMax variance_stat(const EdgeSample& sample, int k,
                        double budget = kDefaultEnumerationBudget);

TestReport variance_test(const EdgeSample& sample, int k, double sigma2,
                         double budget = kDefaultEnumerationBudget);

// Y = #{i : X_i in [theta, theta + 2 pi tau]}; rejects iff Y >= gamma.
TestReport known_theta_test_flat(const FlatSample& sample, ArcFraction tau,
                                 double gamma, Angle theta = Angle(0.0));

}  // namespace circlab
