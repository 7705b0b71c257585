#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "circlab/config.hpp"
#include "circlab/errors.hpp"
#include "circlab/lab.hpp"
#include "circlab/quadrature.hpp"
#include "circlab/specfun.hpp"
#include "circlab/verify.hpp"

using namespace circlab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig flat_hard(int N, int K, double tau, int trials) {
  ExperimentConfig c;
  c.model = ModelId::FlatHard;
  c.N = N;
  c.K = K;
  c.tau = tau;
  c.trials = trials;
  c.seed = 77;
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "circlab_lab_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Config, ParsesEntriesCommentsAndAxes) {
  const auto t = parse_config_text(
      "# header\nmodel = flat-hard\n\nN=100  # trailing\naxis.tau = 0.1, 0.2 ,0.3\n");
  ASSERT_EQ(t.entries.size(), 2u);
  EXPECT_EQ(t.entries[1].first, "N");
  EXPECT_EQ(t.entries[1].second, "100");
  ASSERT_EQ(t.axes.size(), 1u);
  EXPECT_EQ(t.axes[0].values, (std::vector<std::string>{"0.1", "0.2", "0.3"}));
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_config_text("model\n"), FormatError);
  EXPECT_THROW(parse_config_text("N = 1\nN = 2\n"), FormatError);
  EXPECT_THROW(parse_config_text("axis.tau = 0.1,,0.2\n"), FormatError);
  EXPECT_THROW(config_from_text(parse_config_text("colour = red\n")), FormatError);
  ExperimentConfig c;
  EXPECT_THROW(apply_key(c, "N", "12x"), FormatError);
  EXPECT_THROW(apply_key(c, "seed", "-1"), FormatError);
  apply_key(c, "seed", "18446744073709551615");
  EXPECT_EQ(c.seed, 18446744073709551615ull);
}

TEST(Config, Validation) {
  ExperimentConfig c = flat_hard(10, 3, 0.1, 10);
  EXPECT_NO_THROW(validate(c));
  c.detector = DetectorId::Coherence;
  EXPECT_THROW(validate(c), ParameterError);
  c = flat_hard(10, 11, 0.1, 10);
  EXPECT_THROW(validate(c), ParameterError);
  c = flat_hard(10, 3, 0.1, 0);
  EXPECT_THROW(validate(c), ParameterError);
  c = flat_hard(10, 3, 0.1, 10);
  c.model = ModelId::FlatVonMises;
  EXPECT_THROW(validate(c), ParameterError);
}

TEST(Wilson, ContainsEstimateAndStaysInUnitInterval) {
  for (std::uint64_t n : {1u, 7u, 100u, 10000u}) {
    for (std::uint64_t s = 0; s <= n; s += std::max<std::uint64_t>(1, n / 7)) {
      const auto ci = wilson_interval(s, n);
      const double p = static_cast<double>(s) / n;
      EXPECT_GE(ci.lo, 0.0);
      EXPECT_LE(ci.hi, 1.0);
      EXPECT_LE(ci.lo, p);
      EXPECT_GE(ci.hi, p);
    }
  }
  const auto ci = wilson_interval(50, 100);
  EXPECT_NEAR(ci.lo, 0.40383153, 1e-7);
  EXPECT_NEAR(ci.hi, 0.59616847, 1e-7);
}

TEST(EstimateErrors, GammaKNeverMisses) {
  auto c = flat_hard(100, 5, 0.01, 2000);
  c.policy = policy::FlatHardA1{};
  const auto p = estimate_errors(c);
  EXPECT_EQ(p.misses, 0u);
  EXPECT_EQ(p.pmiss_hat, 0.0);
}

TEST(EstimateErrors, ZeroThresholdAlwaysRejects) {
  auto c = flat_hard(50, 5, 0.01, 500);
  c.gamma = 0.0;
  EXPECT_EQ(estimate_errors(c).pfa_hat, 1.0);
}

TEST(EstimateErrors, FalseAlarmsWithinUnionBound) {
  auto c = flat_hard(200, 40, 0.005, 4000);
  c.policy = policy::FlatHardA1{};
  const auto p = estimate_errors(c);
  ASSERT_TRUE(p.bound_pfa);
  const double union_bound = *p.bounds.value("pfa_union");
  const double se = std::sqrt(std::max(union_bound * (1 - union_bound), 1.0 / c.trials) / c.trials);
  EXPECT_LE(p.pfa_hat, union_bound + 3 * se);
}

TEST(EstimateErrors, IndependentOfThreadCount) {
  ExperimentConfig c;
  c.model = ModelId::CommunityVonMises;
  c.N = 10;
  c.K = 4;
  c.kappa = 1.5;
  c.detector = DetectorId::Coherence;
  c.trials = 300;
  c.seed = 5;
  c.threads = 1;
  const auto a = estimate_errors(c);
  c.threads = 4;
  const auto b = estimate_errors(c);
  EXPECT_EQ(a.false_alarms, b.false_alarms);
  EXPECT_EQ(a.misses, b.misses);
}

TEST(EstimateErrors, CapabilityFailureMarksCell) {
  ExperimentConfig c;
  c.model = ModelId::CommunityVonMises;
  c.N = 12;
  c.K = 6;
  c.kappa = 1.0;
  c.detector = DetectorId::Coherence;
  c.trials = 5;
  c.budget = 10.0;
  const auto p = estimate_errors(c);
  EXPECT_TRUE(p.failed);
  EXPECT_NE(p.failure.find("budget"), std::string::npos);
}

TEST(EstimateErrors, TheoryAttached) {
  auto c = flat_hard(2000, 21, 21.0 * 21 / (3 * 2000 * std::log(2000.0)), 10);
  const auto p = estimate_errors(c);
  EXPECT_EQ(p.verdict.verdict, Verdict::Achievable);
  EXPECT_EQ(p.verdict.citation, "cor1-b2");
  EXPECT_EQ(p.label, "achievable");
  EXPECT_TRUE(p.functionals.count("functional"));
}

TEST(Sweep, RowsFollowGridOrder) {
  auto c = flat_hard(200, 10, 0.01, 1000);
  c.policy = policy::FlatHardA1{};
  SweepGrid g{{{"tau", {"0.002", "0.004", "0.008", "0.016", "0.032"}}}};
  const auto rows = sweep(g, c);
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(*rows[i].cell_index, i);
    if (i > 0) {
      EXPECT_GT(*rows[i].config.tau, *rows[i - 1].config.tau);
      const double se = std::sqrt(0.25 / c.trials);
      EXPECT_GE(rows[i].pfa_hat, rows[i - 1].pfa_hat - 3 * se);
    }
  }
}

TEST(Sweep, CrossProductFirstAxisOutermost) {
  auto c = flat_hard(50, 3, 0.01, 5);
  SweepGrid g{{{"K", {"2", "3"}}, {"tau", {"0.01", "0.02", "0.03"}}}};
  const auto rows = sweep(g, c);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].config.K, 2);
  EXPECT_EQ(rows[2].config.K, 2);
  EXPECT_EQ(rows[3].config.K, 3);
  EXPECT_EQ(*rows[4].config.tau, 0.02);
}

TEST(Sweep, CsvIsReproducible) {
  auto c = flat_hard(100, 5, 0.01, 200);
  SweepGrid g{{{"tau", {"0.01", "0.02"}}}};
  std::ostringstream a;
  std::ostringstream b;
  c.threads = 1;
  write_csv(a, sweep(g, c));
  c.threads = 3;
  write_csv(b, sweep(g, c));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "model,detector,policy,N_or_n,K_or_k,tau,kappa,trials,pfa_hat,pfa_lo,pfa_hi,"
            "pmiss_hat,pmiss_lo,pmiss_hi,total_err,verdict,verdict_citation,bound_pfa,"
            "bound_pmiss,seed,cell_index");
}

TEST(Sweep, BadCellDoesNotAbort) {
  auto c = flat_hard(50, 3, 0.01, 5);
  SweepGrid g{{{"K", {"3", "60", "4"}}}};
  const auto rows = sweep(g, c);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_FALSE(rows[0].failed);
  EXPECT_TRUE(rows[1].failed);
  EXPECT_FALSE(rows[2].failed);
}

TEST(SecondMomentMc, TrivialSignals) {
  const auto a = empirical_second_moment({ModelId::CommunityVonMises, 10, 3, {}, 0.0}, 100, 1);
  EXPECT_EQ(a.estimate, 1.0);
  EXPECT_EQ(a.standard_error, 0.0);
  const auto b = empirical_second_moment({ModelId::FlatHard, 8, 3, 1.0, {}}, 100, 1);
  EXPECT_EQ(b.estimate, 1.0);
  EXPECT_THROW(empirical_second_moment({ModelId::FlatHard, 40, 10, 0.1, {}}, 10, 1), CapabilityError);
}

TEST(SecondMomentMc, LikelihoodRatioMatchesPhaseQuadrature) {
  Rng rng = make_rng(3);
  const double tau = 0.3;
  const auto x = gen_flat(6, 2, HardCluster{ArcFraction(tau)}, false, rng);
  // Direct (1/2pi) int avg_S prod_i 1{x_i in arc(theta)} / tau dtheta.
  const auto integrand = [&](double theta) {
    double s = 0.0;
    int count = 0;
    for (int i = 0; i < 6; ++i) {
      for (int j = i + 1; j < 6; ++j) {
        const bool in = in_arc(x.angles[i].value(), theta, tau * kTwoPi) &&
                        in_arc(x.angles[j].value(), theta, tau * kTwoPi);
        s += in ? 1.0 / (tau * tau) : 0.0;
        ++count;
      }
    }
    return s / count;
  };
  // The integrand is piecewise constant; a fine midpoint rule is exact up to
  // the breakpoint cells.
  const int steps = 2000000;
  double direct = 0.0;
  for (int i = 0; i < steps; ++i) direct += integrand((i + 0.5) * kTwoPi / steps);
  direct /= steps;
  EXPECT_NEAR(likelihood_ratio_flat(x, 2, HardCluster{ArcFraction(tau)}), direct, 1e-4);

  const double kappa = 1.3;
  const auto e = gen_community(5, 3, VonMises{Concentration(kappa)}, false, rng);
  const auto vm = [&](double theta) {
    double s = 0.0;
    int count = 0;
    for (int a = 0; a < 5; ++a) {
      for (int b = a + 1; b < 5; ++b) {
        for (int c = b + 1; c < 5; ++c) {
          const double sum = std::cos(e.at(a, b).value() - theta) +
                             std::cos(e.at(a, c).value() - theta) +
                             std::cos(e.at(b, c).value() - theta);
          s += std::exp(kappa * sum) / std::pow(bessel_i0(kappa), 3);
          ++count;
        }
      }
    }
    return s / count;
  };
  const double q = integrate(vm, 0.0, kTwoPi, {1e-13, 1000000}).value / kTwoPi;
  EXPECT_NEAR(likelihood_ratio_community(e, 3, VonMises{Concentration(kappa)}), q, 1e-11);
}

TEST(SecondMomentMc, AgreesWithExactOnSmallInstances) {
  const auto m = empirical_second_moment({ModelId::CommunityHard, 7, 3, 0.6, {}}, 20000, 9);
  EXPECT_LT(std::abs(m.estimate - second_moment_exact_comm_hard(7, 3, 0.6)), 3 * m.standard_error);
  const auto f = empirical_second_moment({ModelId::FlatVonMises, 8, 2, {}, 1.0}, 20000, 10);
  EXPECT_LT(std::abs(f.estimate - second_moment_exact_flat_vm(8, 2, 1.0)), 3 * f.standard_error);
}

TEST(PhaseDiagram, BoundaryMatchesAchievabilityCurve) {
  ExperimentConfig c;
  c.model = ModelId::FlatHard;
  c.N = 500;
  c.regime_epsilon = 0.1;
  SweepGrid g{{{"K", {"5", "10", "20"}}, {"tau", {"0.001", "0.01", "0.1"}}}};
  const auto rows = theory_boundaries(g, c);
  int found = 0;
  for (const auto& r : rows) {
    if (r.boundary != "achievable") continue;
    const double K = std::stod(r.x_value);
    EXPECT_NEAR(r.y_value, K * K / (2.1 * 500 * std::log(500.0)), 1e-9 * r.y_value);
    ++found;
  }
  EXPECT_EQ(found, 3);
}

TEST(PhaseDiagram, SingleRegimeGridHasHeaderOnly) {
  ExperimentConfig c;
  c.model = ModelId::FlatHard;
  c.N = 500;
  c.trials = 5;
  SweepGrid g{{{"K", {"10", "20"}}, {"tau", {"1e-5", "2e-5"}}}};
  const auto prefix = scratch("single").string();
  const auto files = phase_diagram(g, c, prefix);
  EXPECT_EQ(read_file(files.boundary_csv), "x_name,x_value,boundary,y_name,y_value\n");
}

TEST(PhaseDiagram, RerunGivesIdenticalFiles) {
  ExperimentConfig c;
  c.model = ModelId::FlatHard;
  c.N = 300;
  c.trials = 50;
  c.seed = 4;
  SweepGrid g{{{"K", {"4", "8"}}, {"tau", {"0.001", "0.01", "0.05"}}}};
  const auto a = phase_diagram(g, c, scratch("a").string());
  c.threads = 2;
  const auto b = phase_diagram(g, c, scratch("b").string());
  EXPECT_EQ(read_file(a.svg), read_file(b.svg));
  EXPECT_EQ(read_file(a.sweep_csv), read_file(b.sweep_csv));
  EXPECT_EQ(read_file(a.boundary_csv), read_file(b.boundary_csv));
  EXPECT_NE(read_file(a.svg).find("<svg"), std::string::npos);
  SweepGrid one{{{"K", {"4"}}}};
  EXPECT_THROW(phase_diagram(one, c, scratch("c").string()), ParameterError);
}

TEST(Verify, SuitesRun) {
  EXPECT_THROW(run_verify_suite("nope"), ParameterError);
  for (const char* s : {"specfun", "overlap"}) {
    const auto checks = run_verify_suite(s);
    EXPECT_FALSE(checks.empty());
    for (const auto& c : checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
  }
  const auto spec = run_verify_suite("specfun");
  bool has_normalization = false;
  for (const auto& c : spec) has_normalization = has_normalization || c.name == "rho_normalization";
  EXPECT_TRUE(has_normalization);
  std::ostringstream out;
  print_report(out, spec);
  EXPECT_NE(out.str().find("c0_constants.c0_computed="), std::string::npos);
}
