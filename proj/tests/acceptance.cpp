// One line per acceptance criterion: "criterion N: PASS|FAIL <detail>".
// Usage: acceptance [N ...]; no arguments runs every criterion.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "circlab/errors.hpp"
#include "circlab/lab.hpp"
#include "circlab/verify.hpp"

using namespace circlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void add(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Outcome from_checks(const std::vector<CheckResult>& checks) {
  Outcome o;
  for (const auto& c : checks) {
    std::string values;
    for (const auto& [k, v] : c.values) values += " " + k + "=" + v;
    o.add(c.pass, c.name + ": " + c.detail + values);
  }
  return o;
}

double se(double p, int n) { return std::sqrt(p * (1.0 - p) / n); }

Outcome criterion1() { return from_checks({check_rho_normalization()}); }

Outcome criterion2() {
  return from_checks({check_bessel_crossover(), check_bessel_inequalities(),
                      check_small_kappa_resultant()});
}

Outcome criterion3() { return from_checks({check_c0_constants()}); }

Outcome criterion4() { return from_checks({check_convex_order()}); }

Outcome criterion5() {
  return from_checks({check_second_moment_flat_hard(8, 3, 0.3, 100000, 501),
                      check_second_moment_flat_hard(10, 2, 0.6, 100000, 502)});
}

Outcome criterion6() { return from_checks({check_second_moment_comm_vm(10, 3, 0.5, 100000, 601)}); }

Outcome criterion7() {
  Outcome o;
  ExperimentConfig flat;
  flat.model = ModelId::FlatHard;
  flat.N = 100;
  flat.K = 5;
  flat.tau = 0.01;
  flat.policy = policy::FlatHardA1{};
  flat.trials = 10000;
  flat.seed = 701;
  ExperimentConfig comm;
  comm.model = ModelId::CommunityHard;
  comm.N = 20;
  comm.K = 5;
  comm.tau = 0.05;
  comm.gamma = 5;
  comm.trials = 10000;
  comm.seed = 702;
  for (const auto* cfg : {&flat, &comm}) {
    const auto p = estimate_errors(*cfg);
    const std::uint64_t rejected = cfg->trials - p.misses;
    o.add(!p.failed && p.misses == 0,
          model_name(cfg->model) + " interval threshold=" + fmt(p.threshold) + ": " +
              std::to_string(rejected) + "/" + std::to_string(cfg->trials) +
              " H1 rejections" + (p.failed ? " (" + p.failure + ")" : ""));
  }
  return o;
}

ExperimentConfig cell(ModelId m, DetectorId d, int N, int K, std::optional<double> tau,
                      std::optional<double> kappa) {
  ExperimentConfig c;
  c.model = m;
  c.detector = d;
  c.N = N;
  c.K = K;
  c.tau = tau;
  c.kappa = kappa;
  c.trials = 10000;
  return c;
}

Outcome criterion8() {
  using D = DetectorId;
  using M = ModelId;
  std::vector<ExperimentConfig> grid = {
      cell(M::FlatHard, D::Interval, 200, 40, 0.005, {}),
      cell(M::FlatHard, D::Interval, 500, 12, 0.002, {}),
      cell(M::FlatHard, D::KnownTheta, 100, 10, 0.02, {}),
      cell(M::FlatVonMises, D::Interval, 500, 100, 0.02, 50.0),
      cell(M::FlatVonMises, D::Interval, 300, 60, 0.03, 30.0),
      cell(M::FlatVonMises, D::KnownTheta, 200, 40, 0.05, 20.0),
      cell(M::CommunityHard, D::Interval, 12, 4, 0.1, {}),
      cell(M::CommunityVonMises, D::Interval, 12, 4, 0.1, 60.0),
      cell(M::CommunityHard, D::Rayleigh, 20, 8, 0.2, {}),
      cell(M::CommunityVonMises, D::Rayleigh, 20, 10, {}, 8.0),
      cell(M::CommunityVonMises, D::Coherence, 14, 7, {}, 8.0),
      cell(M::CommunityVonMises, D::Variance, 12, 5, {}, 3.0),
  };
  grid[1].policy = policy::FlatHardA2{CnSchedule::log_quarter()};
  grid[4].gamma = 22.0;
  grid[5].gamma = 25.0;
  grid[11].sigma2 = 0.5;
  Outcome o;
  int bounded = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i].seed = 800 + i;
    const auto p = estimate_errors(grid[i]);
    std::string name = model_name(grid[i].model) + "/" + detector_name(grid[i].detector) +
                       " N=" + std::to_string(grid[i].N) + " K=" + std::to_string(grid[i].K);
    if (p.failed) {
      o.add(false, name + ": failed: " + p.failure);
      continue;
    }
    std::string detail = name + ": pfa=" + fmt(p.pfa_hat) + " pmiss=" + fmt(p.pmiss_hat);
    bool ok = true;
    if (p.bound_pfa) {
      ok = ok && p.pfa_hat <= *p.bound_pfa + 3 * se(p.pfa_hat, grid[i].trials);
      detail += " bound_pfa=" + fmt(*p.bound_pfa);
      ++bounded;
    }
    if (p.bound_pmiss) {
      ok = ok && p.pmiss_hat <= *p.bound_pmiss + 3 * se(p.pmiss_hat, grid[i].trials);
      detail += " bound_pmiss=" + fmt(*p.bound_pmiss);
      ++bounded;
    }
    if (!p.bound_pfa && !p.bound_pmiss) detail += " (no analytic bound for this cell)";
    o.add(ok, detail);
  }
  o.lines.push_back("bounds compared: " + std::to_string(bounded));
  return o;
}

Outcome criterion9() {
  Outcome o;
  const int N = 2000;
  const int K = static_cast<int>(std::ceil(std::pow(N, 0.4)));
  const double logN = std::log(static_cast<double>(N));
  ExperimentConfig c;
  c.model = ModelId::FlatHard;
  c.N = N;
  c.K = K;
  c.policy = policy::FlatHardA2{CnSchedule::log_quarter()};
  c.trials = 2000;
  c.seed = 901;

  c.tau = K * K / (3.0 * N * logN);
  const auto a = estimate_errors(c);
  o.add(!a.failed && a.total_error() <= 0.1,
        "achievable side tau=" + fmt(*c.tau) + ": total error " + fmt(a.total_error()) +
            " (pfa=" + fmt(a.pfa_hat) + " pmiss=" + fmt(a.pmiss_hat) + ", need <= 0.1)");

  c.tau = K * K / (0.05 * N * logN);
  c.seed = 902;
  const auto b = estimate_errors(c);
  o.add(!b.failed && b.total_error() >= 0.8,
        "impossibility-side tau=" + fmt(*c.tau) + ": total error " + fmt(b.total_error()) +
            " (pfa=" + fmt(b.pfa_hat) + " pmiss=" + fmt(b.pmiss_hat) + ", need >= 0.8)");
  const auto f = b.functionals.find("functional");
  const bool have = f != b.functionals.end();
  o.add(have && f->second < 0.05,
        "functional at that tau: " + (have ? fmt(f->second) : std::string("n/a")) +
            " (need < 0.05)");
  o.add(b.label == "consistent-with-impossibility", "cell label: " + b.label);
  return o;
}

Outcome criterion10() {
  Outcome o;
  ExperimentConfig c;
  c.model = ModelId::CommunityVonMises;
  c.detector = DetectorId::Coherence;
  c.N = 16;
  c.K = 8;
  c.kappa = 2.0;
  c.epsilon = 0.5;
  c.trials = 500;
  c.seed = 1001;
  const auto strong = estimate_errors(c);
  o.add(!strong.failed && strong.total_error() <= 0.1,
        "coherence kappa=2 threshold=" + fmt(strong.threshold) + ": total error " +
            fmt(strong.total_error()) + " (need <= 0.1)");

  ExperimentConfig weak = c;
  weak.kappa = 0.1;
  weak.gamma = strong.threshold;
  weak.seed = 1002;
  const auto w = estimate_errors(weak);
  o.add(!w.failed && w.total_error() >= 0.8,
        "coherence kappa=0.1 at the same threshold: total error " + fmt(w.total_error()) +
            " (need >= 0.8)");

  ExperimentConfig ray = c;
  ray.detector = DetectorId::Rayleigh;
  ray.seed = 1003;
  const auto r = estimate_errors(ray);
  o.add(!r.failed && r.total_error() > strong.total_error(),
        "rayleigh kappa=2 threshold=" + fmt(r.threshold) + ": total error " +
            fmt(r.total_error()) + " vs coherence " + fmt(strong.total_error()));
  return o;
}

Outcome criterion11() {
  Outcome o;
  const int N = 4000;
  const int K = 60;
  const double logN = std::log(static_cast<double>(N));
  ExperimentConfig c;
  c.model = ModelId::FlatHard;
  c.detector = DetectorId::KnownTheta;
  c.N = N;
  c.K = K;
  c.trials = 2000;
  c.seed = 1101;
  c.tau = K * K / (N * logN) / 5.0;
  const auto a = estimate_errors(c);
  o.add(!a.failed && a.total_error() <= 0.1,
        "tau=" + fmt(*c.tau) + " threshold=" + fmt(a.threshold) + ": total error " +
            fmt(a.total_error()) + " (need <= 0.1)");
  c.tau = std::min(1.0, K * K * logN / N);
  c.seed = 1102;
  const auto b = estimate_errors(c);
  o.add(!b.failed && b.total_error() >= 0.8,
        "tau=" + fmt(*c.tau) + ": total error " + fmt(b.total_error()) + " (need >= 0.8)");
  return o;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(CIRCLAB_CLI) + " " + args).c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion12() {
  Outcome o;
  const auto dir = fs::temp_directory_path() / "circlab_acceptance_12";
  fs::create_directories(dir);
  const auto cfg = dir / "sweep.cfg";
  {
    std::ofstream out(cfg);
    out << "model = flat-hard\nN = 300\ntrials = 2000\nseed = 1201\n"
           "axis.K = 5, 10, 20\naxis.tau = 0.001, 0.005, 0.02, 0.05\n";
  }
  const auto one = dir / "threads1.csv";
  const auto eight = dir / "threads8.csv";
  const int r1 = run_cli("sweep --config " + cfg.string() + " --threads 1 --out " + one.string());
  const int r8 = run_cli("sweep --config " + cfg.string() + " --threads 8 --out " + eight.string());
  o.add(r1 == 0 && r8 == 0, "exit codes " + std::to_string(r1) + ", " + std::to_string(r8));
  const auto a = slurp(one);
  const auto b = slurp(eight);
  o.add(!a.empty() && a == b, "threads 1 vs 8: " + std::to_string(a.size()) + " and " +
                                  std::to_string(b.size()) + " bytes, " +
                                  (a == b ? "identical" : "different"));
  return o;
}

const std::vector<std::function<Outcome()>> kCriteria = {
    criterion1, criterion2, criterion3,  criterion4,  criterion5,  criterion6,
    criterion7, criterion8, criterion9, criterion10, criterion11, criterion12};

bool run(int n) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = kCriteria[n - 1]();
  } catch (const std::exception& e) {
    o.add(false, std::string("error: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " ("
            << fmt(secs) << " s)\n";
  for (const auto& l : o.lines) std::cout << "  " << l << '\n';
  std::cout.flush();
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (int n = 1; n <= static_cast<int>(kCriteria.size()); ++n) which.push_back(n);
  }
  bool all = true;
  for (int n : which) {
    if (n < 1 || n > static_cast<int>(kCriteria.size())) {
      std::cerr << "no criterion " << n << '\n';
      return 2;
    }
    all = run(n) && all;
  }
  return all ? 0 : 1;
}
