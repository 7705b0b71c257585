#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "circlab/config.hpp"
#include "circlab/dataset_io.hpp"
#include "circlab/detectors.hpp"
#include "circlab/errors.hpp"
#include "circlab/lab.hpp"
#include "circlab/random.hpp"
#include "circlab/theory.hpp"
#include "circlab/verify.hpp"

using namespace circlab;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

// Writes to --out when given, else to stdout.
template <class F>
void with_output(const std::string& path, F&& f) {
  if (path.empty()) {
    f(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  f(out);
}

struct ModelFlags {
  std::string model;
  int N = 0;
  int K = 0;
  std::optional<double> tau;
  std::optional<double> kappa;

  void add(CLI::App* app, bool required = true) {
    auto* m = app->add_option("--model", model, "flat-hard, flat-vm, comm-hard, comm-vm");
    auto* n = app->add_option("--N,-n", N, "number of angles (flat) or vertices (community)");
    auto* k = app->add_option("--K,-k", K, "planted set size");
    if (required) {
      m->required();
      n->required();
      k->required();
    }
    app->add_option("--tau", tau, "arc fraction");
    app->add_option("--kappa", kappa, "von Mises concentration");
  }
};

// Flags shared by sweep and phase-diagram, applied over the config file.
struct ExperimentFlags {
  std::string config;
  std::vector<std::string> sets;
  std::vector<std::string> axes;
  std::map<std::string, std::string> keys;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out;

  void add(CLI::App* app) {
    app->add_option("--config", config, "config file (key = value)");
    app->add_option("--set", sets, "override a config key: key=value");
    app->add_option("--axis", axes, "sweep axis: name=v1,v2,...");
    for (const char* key : {"model", "N", "K", "tau", "kappa", "detector", "policy",
                            "trials", "gamma", "sigma2", "epsilon", "B",
                            "regime_epsilon", "max_exact_n", "budget"}) {
      app->add_option_function<std::string>(
          std::string("--") + key,
          [this, key](const std::string& v) { keys[key] = v; }, "config key " + std::string(key));
    }
    app->add_option("--seed", seed, "master seed (64-bit unsigned)");
    app->add_option("--threads", threads, "worker threads (default: available parallelism)");
    app->add_option("--out", out, "output path");
  }

  std::pair<SweepGrid, ExperimentConfig> resolve() const {
    ConfigText text;
    if (!config.empty()) text = read_config_file(config);
    ExperimentConfig cfg = config_from_text(text);
    SweepGrid grid{text.axes};
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw FormatError("--set expects key=value, got '" + s + "'");
      apply_key(cfg, trim_copy(s.substr(0, eq)), trim_copy(s.substr(eq + 1)));
    }
    for (const auto& [k, v] : keys) apply_key(cfg, k, v);
    for (const auto& a : axes) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw FormatError("--axis expects name=v1,v2, got '" + a + "'");
      const std::string name = trim_copy(a.substr(0, eq));
      bool replaced = false;
      for (auto& ax : grid.axes) {
        if (ax.name == name) {
          ax.values = split_list(a.substr(eq + 1));
          replaced = true;
        }
      }
      if (!replaced) grid.axes.push_back({name, split_list(a.substr(eq + 1))});
    }
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (!out.empty()) cfg.out = out;
    return {grid, cfg};
  }
};

int cmd_gen(const ModelFlags& m, bool h0, std::uint64_t seed, const std::string& out,
            bool reveal) {
  ExperimentConfig cfg;
  cfg.model = parse_model(m.model);
  cfg.N = m.N;
  cfg.K = m.K;
  cfg.tau = m.tau;
  cfg.kappa = m.kappa;
  validate_model(cfg);
  Dataset ds;
  ds.model = cfg.model;
  ds.N = cfg.N;
  ds.K = cfg.K;
  ds.signal = signal_of(cfg);
  ds.seed = seed;
  Rng rng = make_rng(seed);
  if (is_community(cfg.model)) {
    ds.data = gen_community(cfg.N, cfg.K, *ds.signal, !h0, rng);
  } else {
    ds.data = gen_flat(cfg.N, cfg.K, *ds.signal, !h0, rng);
  }
  with_output(out, [&](std::ostream& o) { write_dataset(o, ds, reveal); });
  return 0;
}

struct DetectFlags {
  std::string input;
  std::string test = "interval";
  std::optional<double> tau;
  std::optional<int> k;
  std::optional<double> kappa;
  std::optional<std::string> policy;
  std::optional<double> gamma;
  std::optional<double> sigma2;
  double theta = 0.0;
  double epsilon = 0.5;
  int max_exact_n = kDefaultMaxExactN;
  double budget = kDefaultEnumerationBudget;
};

int cmd_detect(const DetectFlags& f, const std::string& out) {
  Dataset ds;
  if (f.input.empty() || f.input == "-") {
    ds = read_dataset(std::cin);
  } else {
    std::ifstream in(f.input);
    if (!in) throw FormatError("cannot open '" + f.input + "'");
    ds = read_dataset(in);
  }
  const int k = f.k.value_or(ds.K);
  std::optional<double> kappa = f.kappa;
  std::optional<double> tau = f.tau;
  if (ds.signal) {
    if (const auto* vm = std::get_if<VonMises>(&*ds.signal); vm && !kappa) {
      kappa = vm->kappa.value();
    }
    if (const auto* h = std::get_if<HardCluster>(&*ds.signal); h && !tau) {
      tau = h->tau.value();
    }
  }
  const auto need_tau = [&]() {
    if (!tau) throw ParameterError("--tau is required for this test");
    return ArcFraction(*tau);
  };
  const auto need_kappa = [&]() {
    if (!kappa) throw ParameterError("--kappa is required for this test");
    return Concentration(*kappa);
  };
  const DetectorId det = parse_detector(f.test);
  TestReport r;
  if (const auto* flat = std::get_if<FlatSample>(&ds.data)) {
    ThresholdPolicy pol = policy::FlatHardA1{};
    if (det == DetectorId::KnownTheta) pol = policy::FlatHardA2{CnSchedule::log_quarter()};
    else if (ds.model == ModelId::FlatVonMises) pol = policy::FlatVonMises{CnSchedule::log_quarter()};
    if (f.policy) pol = parse_policy(*f.policy);
    if (f.gamma) pol = policy::Fixed{*f.gamma};
    if (det == DetectorId::Interval) {
      std::optional<Concentration> kap;
      if (kappa) kap = Concentration(*kappa);
      r = interval_test_flat(*flat, need_tau(), pol, k, kap);
    } else if (det == DetectorId::KnownTheta) {
      const ArcFraction t = need_tau();
      ThresholdContext ctx{flat->size(), k, t.value(), kappa};
      r = known_theta_test_flat(*flat, t, resolve_threshold(pol, ctx).value, Angle(f.theta));
    } else {
      throw ParameterError("test '" + f.test + "' needs a community dataset");
    }
  } else {
    const auto& edges = std::get<EdgeSample>(ds.data);
    switch (det) {
      case DetectorId::Interval:
        r = interval_test_community(edges, k, need_tau(), f.max_exact_n);
        break;
      case DetectorId::Coherence:
        if (f.gamma) {
          const auto s = coherence_stat(edges, k, f.budget);
          r.statistic = s.value;
          r.threshold = *f.gamma;
          r.decision = s.value >= *f.gamma ? Decision::RejectH0 : Decision::RetainH0;
          r.witness_theta = s.theta;
          r.witness_subset = s.subset;
        } else {
          r = coherence_test(edges, k, need_kappa(), f.epsilon, f.budget);
        }
        break;
      case DetectorId::Rayleigh:
        if (f.gamma) {
          r = rayleigh_test(edges, k, Concentration(kappa.value_or(0.0)));
          r.threshold = *f.gamma;
          r.decision = r.statistic >= *f.gamma ? Decision::RejectH0 : Decision::RetainH0;
        } else if (!kappa && tau) {
          r = rayleigh_test(edges, k, Concentration(0.0));
          r.threshold = rayleigh_threshold_arc(k, ArcFraction(*tau));
          r.decision = r.statistic >= r.threshold ? Decision::RejectH0 : Decision::RetainH0;
          r.threshold_note = "beta=C(k,2)sin(pi tau)/(2 pi tau)";
        } else {
          r = rayleigh_test(edges, k, need_kappa());
        }
        break;
      case DetectorId::Variance:
        if (!f.sigma2) throw ParameterError("--sigma2 is required for the variance test");
        r = variance_test(edges, k, *f.sigma2, f.budget);
        break;
      case DetectorId::KnownTheta:
        throw ParameterError("known-theta test needs a flat dataset");
    }
  }
  with_output(out, [&](std::ostream& o) {
    o << "statistic=" << g17(r.statistic) << " threshold=" << g17(r.threshold)
      << " decision=" << (r.decision == Decision::RejectH0 ? "reject" : "retain")
      << " witness_theta=" << (r.witness_theta ? g17(r.witness_theta->value()) : "none")
      << " witness_subset=" << (r.witness_subset ? join(*r.witness_subset) : "none") << '\n';
  });
  return 0;
}

int cmd_bounds(const ModelFlags& m, const std::string& detector,
               const std::optional<std::string>& pol, std::optional<double> gamma,
               double epsilon, std::optional<int> B, std::optional<double> sigma2,
               const std::string& out) {
  ExperimentConfig cfg;
  cfg.model = parse_model(m.model);
  cfg.N = m.N;
  cfg.K = m.K;
  cfg.tau = m.tau;
  cfg.kappa = m.kappa;
  cfg.detector = parse_detector(detector);
  if (pol) cfg.policy = parse_policy(*pol);
  cfg.gamma = gamma;
  cfg.epsilon = epsilon;
  cfg.B = B;
  cfg.sigma2 = sigma2;
  PhasePoint pt;
  pt.config = cfg;
  const ResolvedThreshold th = cell_threshold(cfg);
  pt.threshold = th.value;
  pt.threshold_feasible = th.feasible;
  attach_theory(pt);
  with_output(out, [&](std::ostream& o) {
    o << "threshold=" << g17(pt.threshold) << '\n';
    o << "threshold_feasible=" << (pt.threshold_feasible ? 1 : 0) << '\n';
    for (const auto& [name, e] : pt.bounds.entries()) {
      o << name << '=' << g17(e.value) << (e.applicable ? "" : " applicable=0") << '\n';
    }
    for (const auto& [name, v] : pt.functionals) o << name << '=' << g17(v) << '\n';
  });
  return 0;
}

int cmd_classify(const ModelFlags& m, const RegimeTunables& t, const std::string& out) {
  ModelParams p{parse_model(m.model), m.N, m.K, m.tau, m.kappa};
  const RegimeVerdict v = regime_classify(p, t);
  with_output(out, [&](std::ostream& o) {
    for (const auto& [name, value] : v.condition_values) o << name << '=' << g17(value) << '\n';
    o << "condition=" << v.condition << '\n';
    o << "citation=" << (v.citation.empty() ? "none" : v.citation) << '\n';
    o << "verdict=" << verdict_name(v.verdict) << '\n';
  });
  return 0;
}

int cmd_sweep(const ExperimentFlags& f) {
  const auto [grid, cfg] = f.resolve();
  const auto rows = sweep(grid, cfg);
  with_output(cfg.out, [&](std::ostream& o) { write_csv(o, rows); });
  return 0;
}

int cmd_phase(const ExperimentFlags& f) {
  const auto [grid, cfg] = f.resolve();
  if (cfg.out.empty()) throw ParameterError("phase-diagram needs --out <prefix>");
  const auto files = phase_diagram(grid, cfg, cfg.out);
  std::cout << "sweep=" << files.sweep_csv << "\nboundary=" << files.boundary_csv
            << "\nsvg=" << files.svg << '\n';
  return 0;
}

int cmd_verify(const std::string& suite, const VerifyOptions& o, const std::string& out) {
  const auto checks = run_verify_suite(suite, o);
  bool ok = true;
  for (const auto& c : checks) ok = ok && c.pass;
  with_output(out, [&](std::ostream& s) { print_report(s, checks); });
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detection of planted circular structure: data, tests, bounds, experiments"};
  app.require_subcommand(1);
  std::string out;

  auto* gen = app.add_subcommand("gen", "generate a dataset");
  ModelFlags gen_m;
  gen_m.add(gen);
  bool gen_h0 = false;
  std::uint64_t gen_seed = 1;
  bool reveal = false;
  gen->add_flag("--h0", gen_h0, "draw under the null instead of the planted model");
  gen->add_option("--seed", gen_seed, "seed (64-bit unsigned)");
  gen->add_flag("--reveal-truth", reveal, "write the planted set and phase");
  gen->add_option("--out", out, "output path");

  auto* detect = app.add_subcommand("detect", "run a test on a dataset file");
  DetectFlags df;
  detect->add_option("input", df.input, "dataset file (default stdin)");
  detect->add_option("--test", df.test, "interval, coherence, rayleigh, variance, known-theta");
  detect->add_option("--tau", df.tau, "window arc fraction");
  detect->add_option("--k", df.k, "planted set size (default from the dataset)");
  detect->add_option("--kappa", df.kappa, "concentration used by the threshold");
  detect->add_option("--policy", df.policy, "fixed:<v>, a1, a2[:c], vm[:c], coherence[:eps]");
  detect->add_option("--gamma", df.gamma, "explicit threshold");
  detect->add_option("--sigma2", df.sigma2, "variance threshold");
  detect->add_option("--theta", df.theta, "known phase for known-theta");
  detect->add_option("--epsilon", df.epsilon, "coherence epsilon");
  detect->add_option("--max-exact-n", df.max_exact_n, "largest n for exact community search");
  detect->add_option("--budget", df.budget, "enumeration budget (edge operations)");
  detect->add_option("--out", out, "output path");

  auto* bounds = app.add_subcommand("bounds", "analytic error bounds for one cell");
  ModelFlags b_m;
  b_m.add(bounds);
  std::string b_det = "interval";
  std::optional<std::string> b_pol;
  std::optional<double> b_gamma;
  std::optional<double> b_sigma2;
  double b_eps = 0.5;
  std::optional<int> b_B;
  bounds->add_option("--detector", b_det, "interval, coherence, rayleigh, variance, known-theta");
  bounds->add_option("--policy", b_pol, "threshold policy");
  bounds->add_option("--gamma", b_gamma, "explicit threshold");
  bounds->add_option("--sigma2", b_sigma2, "variance threshold");
  bounds->add_option("--epsilon", b_eps, "coherence epsilon");
  bounds->add_option("--B", b_B, "polygon size for the coherence bound");
  bounds->add_option("--out", out, "output path");

  auto* classify = app.add_subcommand("classify", "regime verdict for one cell");
  ModelFlags c_m;
  c_m.add(classify);
  RegimeTunables tun;
  std::optional<double> eps_n;
  std::optional<double> slack;
  classify->add_option("--epsilon", tun.epsilon, "epsilon in the corollary conditions");
  classify->add_option("--eps-n", eps_n, "value standing in for eps_n -> 0");
  classify->add_option("--slack", slack, "slack L for o() and omega() boundaries");
  classify->add_option("--out", out, "output path");

  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep to CSV");
  ExperimentFlags sf;
  sf.add(sweep_cmd);
  auto* phase_cmd = app.add_subcommand("phase-diagram", "sweep, theory boundaries and heatmap");
  ExperimentFlags pf;
  pf.add(phase_cmd);

  auto* verify = app.add_subcommand("verify", "run property suites");
  std::string suite;
  VerifyOptions vo;
  verify->add_option("suite", suite, "specfun, overlap, second-moment, bounds, transitions, all")
      ->required();
  verify->add_option("--seed", vo.seed, "seed");
  verify->add_option("--threads", vo.threads, "worker threads");
  verify->add_option("--trials", vo.moment_trials, "second-moment Monte Carlo trials");
  verify->add_option("--out", out, "report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_gen(gen_m, gen_h0, gen_seed, out, reveal);
    if (*detect) return cmd_detect(df, out);
    if (*bounds) return cmd_bounds(b_m, b_det, b_pol, b_gamma, b_eps, b_B, b_sigma2, out);
    if (*classify) {
      tun.eps_n = eps_n;
      tun.boundary_slack = slack;
      return cmd_classify(c_m, tun, out);
    }
    if (*sweep_cmd) return cmd_sweep(sf);
    if (*phase_cmd) return cmd_phase(pf);
    if (*verify) return cmd_verify(suite, vo, out);
  } catch (const CapabilityError& e) {
    std::cerr << "circlab: " << e.what() << '\n';
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "circlab: numeric failure: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "circlab: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
