#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace circlab {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  std::vector<std::pair<std::string, std::string>> values;
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  int threads = 0;
  // Monte Carlo trial count for the second-moment checks.
  int moment_trials = 100000;
};

// specfun, overlap, second-moment, bounds, transitions, all.
const std::vector<std::string>& verify_suites();
// Throws ParameterError for an unknown suite name.
std::vector<CheckResult> run_verify_suite(const std::string& suite,
                                          const VerifyOptions& options = {});
// One human-readable line per check, then `key=value` lines.
void print_report(std::ostream& out, const std::vector<CheckResult>& checks);

// (1/2pi) int rho_kappa = 1 for kappa in {0.1, 1, 5, 20, 100}, to 1e-8.
CheckResult check_rho_normalization();
// Series and asymptotic branches agree to 1e-6 relative on [25, 35].
CheckResult check_bessel_crossover();
// I0(k) <= exp(k^2/4) on [1e-3, 50] and exp(-k) sqrt(k) I0(k) >= 0.3 for k >= 1.
CheckResult check_bessel_inequalities();
// |A(0.01) - 0.005| < 1e-5.
CheckResult check_small_kappa_resultant();
// compute_c0 stationarity, unimodality, and comparison with the published constants.
CheckResult check_c0_constants();
// Hypergeometric overlap is dominated by the binomial in convex order:
// E[z^J] <= (1 - K/N + K z/N)^K for N <= 40, K <= min(N, 10).
CheckResult check_convex_order();
CheckResult check_delta_moments();
// Monte Carlo against the exact second moment, plus the displayed bound.
CheckResult check_second_moment_flat_hard(int N, int K, double tau, int trials,
                                          std::uint64_t seed);
CheckResult check_second_moment_comm_vm(int n, int k, double kappa, int trials,
                                        std::uint64_t seed);

}  // namespace circlab
