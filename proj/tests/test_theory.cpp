#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "circlab/combinations.hpp"
#include "circlab/errors.hpp"
#include "circlab/quadrature.hpp"
#include "circlab/specfun.hpp"
#include "circlab/theory.hpp"

using namespace circlab;
using std::numbers::pi;

// Frozen references were computed once with 30-40 digit arithmetic.

TEST(FlatHardBounds, UnionArithmetic) {
  const auto r = flat_hard_bounds(10, 3, 0.01, 3);
  EXPECT_NEAR(*r.value("pfa_union"), 0.036, 1e-15);
  EXPECT_EQ(*r.value("pmiss"), 0.0);
  EXPECT_LE(*r.value("pfa"), 0.036 + 1e-15);
}

TEST(FlatHardBounds, ShrinksWithTau) {
  double prev = 1.0;
  for (double tau : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const double b = *flat_hard_bounds(50, 4, tau, 4).value("pfa_union");
    EXPECT_LT(b, prev);
    prev = b;
  }
  EXPECT_LT(prev, 1e-9);
}

TEST(FlatHardBounds, MissAboveK) {
  const auto r = flat_hard_bounds(1000, 10, 0.01, 15);
  const double mean = 990 * 0.01;
  EXPECT_NEAR(*r.value("pmiss"), std::exp(-(mean - 5) * (mean - 5) / (2 * mean)), 1e-15);
}

TEST(FlatVmBounds, RecipeValues) {
  const auto r = flat_vm_bounds(500, 10, 0.0, 0.05, 3.0);
  EXPECT_NEAR(*r.value("g"), 0.0, 1e-15);
  EXPECT_NEAR(*r.value("pmiss"), std::exp(-4.5), 1e-15);
  const auto s = flat_vm_bounds(500, 10, 2.0, 0.05, 1.0);
  const double g = 10 * (arc_prob(Concentration(2.0), ArcFraction(0.05)) - 0.05);
  EXPECT_NEAR(*s.value("g"), g, 1e-12);
  EXPECT_NEAR(*s.value("gamma_N"), 25 + g - std::sqrt(25 + g), 1e-10);
}

TEST(FlatVmBounds, GaussianLimitOfPlantedMass) {
  const double c2 = kPaperC2Star;
  for (double kappa : {1e4, 1e5}) {
    const double tau = c2 / (pi * std::sqrt(kappa));
    const double g = *flat_vm_bounds(10000, 100, kappa, tau, 1.0).value("g");
    EXPECT_NEAR(g / (100 * (1 - 2 * gaussian_upper_tail(c2))), 1.0, 0.05);
  }
  // 40-digit references for the ratio.
  const double tau = c2 / (pi * 100.0);
  const double g = *flat_vm_bounds(10000, 100, 1e4, tau, 1.0).value("g");
  EXPECT_NEAR(g / (100 * (1 - 2 * gaussian_upper_tail(c2))), 0.995619485927236341, 1e-8);
}

TEST(KnownThetaBounds, NoLeadingFactor) {
  const auto flat = flat_hard_bounds(10, 3, 0.01, 3);
  const auto known = known_theta_bounds(10, 3, 0.01, 3);
  EXPECT_NEAR(*known.value("pfa_union") * 10, *flat.value("pfa_union"), 1e-15);
  EXPECT_EQ(*known.value("pmiss"), 0.0);
}

TEST(CommIntervalBounds, HardMissIsZeroAndPfaDecays) {
  EXPECT_EQ(*comm_interval_bounds(20, 5, 0.05).value("pmiss"), 0.0);
  const double expect[] = {-11.727369202346852, -15.21012702516724, -30.785691783327669};
  int i = 0;
  double prev = 0.0;
  for (int n : {1000, 10000, 100000}) {
    const int k = static_cast<int>(std::lround(2 * std::log(static_cast<double>(n))));
    const double lp = *comm_interval_bounds(n, k, std::exp(-1.0)).value("log_pfa");
    EXPECT_NEAR(lp, expect[i++], 1e-9);
    if (i > 1) {
      EXPECT_LT(lp, prev);
    }
    prev = lp;
  }
}

TEST(CommIntervalBounds, WindowDependence) {
  // The tau exponent of the false-alarm bound is k(k-1)/2 - 1: flat for k=2,
  // shrinking as tau -> 0 for k >= 3. The miss bound grows as tau -> 0.
  const double flat = *comm_interval_bounds(30, 2, 0.1, 3.0).value("log_pfa");
  double prev_pfa = INFINITY;
  double prev_miss = 0.0;
  for (double tau : {1e-1, 1e-2, 1e-3, 1e-4}) {
    EXPECT_NEAR(*comm_interval_bounds(30, 2, tau, 3.0).value("log_pfa"), flat, 1e-12);
    const auto r = comm_interval_bounds(30, 3, tau, 3.0);
    EXPECT_LT(*r.value("log_pfa"), prev_pfa);
    EXPECT_GE(*r.value("pmiss_vm"), prev_miss);
    prev_pfa = *r.value("log_pfa");
    prev_miss = *r.value("pmiss_vm");
  }
  const auto r = comm_interval_bounds(30, 5, 0.2, 50.0);
  EXPECT_LE(*r.value("pmiss"), *r.value("pmiss_union"));
}

TEST(Overlap, DeltaValues) {
  EXPECT_EQ(delta_overlap(0.3, 0.0), 0.3);
  EXPECT_EQ(delta_overlap(0.3, 0.4), 0.0);
  EXPECT_NEAR(delta_overlap(0.7, 0.1), 0.6, 1e-15);
  EXPECT_NEAR(delta_moment(0.5, 1), 0.25, 1e-15);
  EXPECT_NEAR(delta_moment(0.3, 2), 0.018, 1e-15);
  EXPECT_NEAR(delta_moment(0.8, 2), 0.41333333333333341682, 1e-14);
  EXPECT_NEAR(delta_moment(0.7, 3), 0.13284999999999995910, 1e-14);
}

TEST(Overlap, DeltaMomentsMatchQuadrature) {
  for (double tau : {0.05, 0.25, 0.5, 0.65, 0.8, 0.95}) {
    for (int j : {1, 2, 3, 7}) {
      // delta is piecewise linear with kinks at tau and 1 - tau; integrate
      // each polynomial piece separately.
      const auto f = [&](double u) { return std::pow(delta_overlap(tau, u), j); };
      double q = 0.0;
      double lo = 0.0;
      for (double b : {std::min(tau, 1 - tau), 0.5}) {
        if (b <= lo) continue;
        q += 2 * integrate(f, lo, b, {1e-17, 1000}).value;
        lo = b;
      }
      EXPECT_NEAR(delta_moment(tau, j), q, 1e-13 * q) << tau << " " << j;
    }
  }
}

TEST(Overlap, HypergeometricPmf) {
  EXPECT_NEAR(hypergeom_pmf({4, 4}, 4), 1.0, 1e-15);
  EXPECT_NEAR(hypergeom_pmf({4, 2}, 0), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(hypergeom_pmf({10, 3}, 1), 0.525, 1e-13);
  double s = 0.0;
  for (int j = 0; j <= 7; ++j) s += hypergeom_pmf({30, 7}, j);
  EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(SecondMoment, ExactValues) {
  EXPECT_NEAR(second_moment_exact_flat_hard(8, 3, 0.3), 1.4087301587301586849, 1e-12);
  EXPECT_NEAR(second_moment_exact_flat_hard(10, 2, 0.6), 1.0029263831732967386, 1e-12);
  EXPECT_NEAR(second_moment_exact_flat_hard(20, 4, 0.1), 2.5717234262125901211, 1e-11);
  EXPECT_NEAR(second_moment_exact_comm_hard(10, 3, 0.5), 1.0083333333333333333, 1e-12);
  EXPECT_NEAR(second_moment_exact_comm_hard(12, 4, 0.7), 1.0099376284488342441, 1e-12);
  EXPECT_NEAR(second_moment_exact_flat_vm(10, 3, 1.5), 1.0514968026545724239, 1e-10);
  EXPECT_NEAR(second_moment_exact_flat_vm(30, 5, 0.8), 1.0087466608980444089, 1e-10);
  EXPECT_NEAR(second_moment_exact_comm_vm(10, 3, 0.5), 1.0001731038229846297, 1e-11);
  EXPECT_NEAR(second_moment_exact_comm_vm(12, 4, 1.0), 1.0184580883709063911, 1e-10);
}

TEST(SecondMoment, Limits) {
  EXPECT_NEAR(second_moment_exact_flat_hard(6, 6, 0.999), 1.0, 1e-2);
  EXPECT_EQ(second_moment_exact_comm_vm(10, 4, 0.0), 1.0);
}

TEST(SecondMoment, FlatHardBelowFunctional) {
  for (int N : {5, 10, 40, 200}) {
    for (int K : {1, 2, 4}) {
      for (double tau : {0.01, 0.1, 0.3, 0.5}) {
        const double exact = second_moment_exact_flat_hard(N, K, tau);
        const double f = impossibility_functionals({ModelId::FlatHard, N, K, tau, {}}).at("functional");
        EXPECT_LE(exact - 1.0, f * (1 + 1e-12)) << N << " " << K << " " << tau;
      }
    }
  }
}

TEST(SecondMoment, CommVmBelowExponentialBound) {
  for (int n : {6, 10, 30}) {
    for (int k : {2, 3, 5}) {
      for (double kappa : {0.1, 0.5, 1.0, 2.0}) {
        const double exact = second_moment_exact_comm_vm(n, k, kappa);
        const double f =
            impossibility_functionals({ModelId::CommunityVonMises, n, k, {}, kappa}).at("functional");
        EXPECT_LE(exact, std::exp(f) * (1 + 1e-12)) << n << " " << k << " " << kappa;
      }
    }
  }
}

TEST(Functionals, Values) {
  // Flat hard: 2 N tau^2 / K^2 (1 + K/(N tau))^(K+1). The power term dominates
  // as tau -> 0, so the functional is not monotone in tau.
  const double fh = impossibility_functionals({ModelId::FlatHard, 1000, 5, 0.01, {}}).at("functional");
  EXPECT_NEAR(fh, 0.091125, 1e-15);
  double prev = 0.0;
  for (double tau : {1e-2, 1e-3, 1e-4}) {
    const double f = impossibility_functionals({ModelId::FlatHard, 1000, 5, tau, {}}).at("functional");
    EXPECT_GT(f, prev);
    prev = f;
  }
  EXPECT_NEAR(prev, 14077.030240799979, 1e-8);
  const double vm = impossibility_functionals({ModelId::FlatVonMises, 100, 10, {}, 0.01}).at("functional");
  EXPECT_NEAR(vm, 1.2499114636335891e-9, 1e-15);
  EXPECT_GT(vm, 0.0);
  // At kappa = (n/k^2)^{3.5/19} with n = 1e6, k = 20 the functional is large,
  // not small (reference 52.011183708444523).
  const double kappa = std::pow(1e6 / 400.0, 3.5 / 19.0);
  const double cv = impossibility_functionals({ModelId::CommunityVonMises, 1000000, 20, {}, kappa}).at("functional");
  EXPECT_NEAR(cv, 52.011183708444523, 1e-8);
}

TEST(Regime, FlatHardFixedK) {
  const int N = 1000000;
  const double t0 = std::pow(static_cast<double>(N), -1.5);
  const double logN = std::log(static_cast<double>(N));
  auto v = regime_classify({ModelId::FlatHard, N, 3, t0 / logN, {}});
  EXPECT_EQ(v.verdict, Verdict::Achievable);
  EXPECT_EQ(v.citation, "cor1-b1");
  v = regime_classify({ModelId::FlatHard, N, 3, t0 * logN, {}});
  EXPECT_EQ(v.verdict, Verdict::Impossible);
  EXPECT_EQ(v.citation, "cor2-b1");
  v = regime_classify({ModelId::FlatHard, N, 3, t0, {}});
  EXPECT_EQ(v.verdict, Verdict::Indeterminate);
  EXPECT_TRUE(v.citation.empty());
}

TEST(Regime, FlatHardPolynomialK) {
  const auto v = regime_classify({ModelId::FlatHard, 2000, 21, 21.0 * 21 / (3 * 2000 * std::log(2000.0)), {}});
  EXPECT_EQ(v.verdict, Verdict::Achievable);
  EXPECT_EQ(v.citation, "cor1-b2");
  const auto w = regime_classify({ModelId::FlatHard, 2000, 21, 0.5, {}});
  EXPECT_EQ(w.verdict, Verdict::Impossible);
}

TEST(Regime, FlatVmReportsBothConstants) {
  const auto v = regime_classify({ModelId::FlatVonMises, 10000, 100, {}, 25.0});
  bool paper = false;
  bool computed = false;
  for (const auto& [name, value] : v.condition_values) {
    paper = paper || (name == "c0_paper" && value == kPaperC0);
    computed = computed || (name == "c0_computed" && std::abs(value - 1.2676980469) < 1e-9);
  }
  EXPECT_TRUE(paper);
  EXPECT_TRUE(computed);
}

TEST(Regime, KnownTheta) {
  auto v = known_theta_regime(1000000, 500, 1e-5);
  EXPECT_EQ(v.verdict, Verdict::Achievable);
  const double cap = std::min(1.0, 250000.0 * std::log(1e6) / 1e6);
  v = known_theta_regime(1000000, 500, cap);
  EXPECT_EQ(v.verdict, Verdict::Impossible);
  v = known_theta_regime(100, 20, 0.01);
  EXPECT_EQ(v.verdict, Verdict::Indeterminate);
}

TEST(BoundReport, LookupAndApplicability) {
  BoundReport r;
  r.add("a", 0.5);
  r.add("b", BoundEntry{0.1, false, {{"side", false}}});
  EXPECT_EQ(*r.value("a"), 0.5);
  EXPECT_FALSE(r.value("b"));
  EXPECT_FALSE(r.value("c"));
  EXPECT_EQ(r.entries().size(), 2u);
}
