#include "circlab/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include "circlab/errors.hpp"
#include "circlab/random.hpp"

namespace circlab {
namespace {

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw FormatError("bad number for '" + key + "': '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw FormatError("bad integer for '" + key + "': '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("");
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw FormatError("bad unsigned integer for '" + key + "': '" + v + "'");
  }
}

int to_int(const std::string& key, long long x) {
  if (x < 0 || x > 1'000'000'000) {
    throw FormatError("value for '" + key + "' out of range");
  }
  return static_cast<int>(x);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) {
  return v ? num(*v) : "";
}

// Everything needed to run trials for one cell, resolved once.
struct PreparedCell {
  ExperimentConfig cfg;
  SignalKind signal;
  ThresholdPolicy policy;
  double threshold = 0.0;
  bool feasible = true;
};

PreparedCell prepare(const ExperimentConfig& cfg) {
  validate(cfg);
  PreparedCell c{cfg, signal_of(cfg), effective_policy(cfg), 0.0, true};
  ThresholdContext ctx{cfg.N, cfg.K, cfg.tau, cfg.kappa};
  switch (cfg.detector) {
    case DetectorId::Interval:
      if (is_community(cfg.model)) {
        c.threshold = cfg.K;
      } else {
        const auto r = resolve_threshold(c.policy, ctx);
        c.threshold = r.value;
        c.feasible = r.feasible;
      }
      break;
    case DetectorId::KnownTheta: {
      const auto r = resolve_threshold(c.policy, ctx);
      c.threshold = r.value;
      c.feasible = r.feasible;
      break;
    }
    case DetectorId::Coherence:
    case DetectorId::Rayleigh:
      c.threshold = resolve_threshold(c.policy, ctx).value;
      break;
    case DetectorId::Variance:
      c.threshold = *cfg.sigma2;
      break;
  }
  return c;
}

bool run_trial(const PreparedCell& c, bool under_h1, Rng& rng) {
  const ExperimentConfig& cfg = c.cfg;
  if (!is_community(cfg.model)) {
    const FlatSample x = gen_flat(cfg.N, cfg.K, c.signal, under_h1, rng);
    const ArcFraction tau(*cfg.tau);
    if (cfg.detector == DetectorId::Interval) {
      return interval_stat_flat(x, tau).count >= c.threshold;
    }
    // Known phase: the planted window under H1, an arbitrary one under H0.
    double theta = 0.0;
    if (x.truth) {
      theta = x.truth->theta_star.value();
      if (std::holds_alternative<VonMises>(c.signal)) {
        theta -= std::numbers::pi * tau.value();
      }
    }
    return known_theta_test_flat(x, tau, c.threshold, Angle(theta)).decision ==
           Decision::RejectH0;
  }
  const EdgeSample x = gen_community(cfg.N, cfg.K, c.signal, under_h1, rng);
  switch (cfg.detector) {
    case DetectorId::Interval:
      return interval_test_community(x, cfg.K, ArcFraction(*cfg.tau),
                                     cfg.max_exact_n)
                 .decision == Decision::RejectH0;
    case DetectorId::Coherence:
      return coherence_stat(x, cfg.K, cfg.budget).value >= c.threshold;
    case DetectorId::Rayleigh: {
      double sx = 0.0;
      double sy = 0.0;
      for (const Angle a : x.edge_angles()) {
        sx += std::cos(a.value());
        sy += std::sin(a.value());
      }
      return std::hypot(sx, sy) >= c.threshold;
    }
    case DetectorId::Variance:
      return variance_stat(x, cfg.K, cfg.budget).value <= c.threshold;
    case DetectorId::KnownTheta:
      break;
  }
  throw ParameterError("detector not available for this model");
}

int worker_count(int requested, std::size_t work) {
  int t = requested;
  if (t <= 0) t = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(t), std::max<std::size_t>(work, 1)));
}

}  // namespace

std::string detector_name(DetectorId d) {
  switch (d) {
    case DetectorId::Interval: return "interval";
    case DetectorId::Coherence: return "coherence";
    case DetectorId::Rayleigh: return "rayleigh";
    case DetectorId::Variance: return "variance";
    case DetectorId::KnownTheta: return "known-theta";
  }
  return "?";
}

DetectorId parse_detector(const std::string& name) {
  for (auto d : {DetectorId::Interval, DetectorId::Coherence, DetectorId::Rayleigh,
                 DetectorId::Variance, DetectorId::KnownTheta}) {
    if (detector_name(d) == name) return d;
  }
  throw ParameterError("unknown detector '" + name +
                       "' (expected interval, coherence, rayleigh, variance, known-theta)");
}

void apply_key(ExperimentConfig& cfg, const std::string& key,
               const std::string& value) {
  if (key == "model") {
    cfg.model = parse_model(value);
  } else if (key == "N" || key == "n") {
    cfg.N = to_int(key, parse_int(key, value));
  } else if (key == "K" || key == "k") {
    cfg.K = to_int(key, parse_int(key, value));
  } else if (key == "tau") {
    cfg.tau = parse_double(key, value);
  } else if (key == "kappa") {
    cfg.kappa = parse_double(key, value);
  } else if (key == "detector") {
    cfg.detector = parse_detector(value);
  } else if (key == "policy") {
    cfg.policy = parse_policy(value);
  } else if (key == "epsilon") {
    cfg.epsilon = parse_double(key, value);
  } else if (key == "sigma2") {
    cfg.sigma2 = parse_double(key, value);
  } else if (key == "gamma") {
    cfg.gamma = parse_double(key, value);
  } else if (key == "B") {
    cfg.B = to_int(key, parse_int(key, value));
  } else if (key == "regime_epsilon") {
    cfg.regime_epsilon = parse_double(key, value);
  } else if (key == "trials") {
    cfg.trials = to_int(key, parse_int(key, value));
  } else if (key == "seed") {
    cfg.seed = parse_u64(key, value);
  } else if (key == "threads") {
    cfg.threads = to_int(key, parse_int(key, value));
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "max_exact_n") {
    cfg.max_exact_n = to_int(key, parse_int(key, value));
  } else if (key == "budget") {
    cfg.budget = parse_double(key, value);
  } else {
    throw FormatError("unknown config key '" + key + "'");
  }
}

ExperimentConfig config_from_text(const ConfigText& text) {
  ExperimentConfig cfg;
  for (const auto& [k, v] : text.entries) apply_key(cfg, k, v);
  return cfg;
}

void validate_model(const ExperimentConfig& cfg) {
  const bool comm = is_community(cfg.model);
  const bool hard = cfg.model == ModelId::FlatHard || cfg.model == ModelId::CommunityHard;
  if (cfg.K < 1 || cfg.K > cfg.N) throw ParameterError("need 1 <= K <= N");
  if (comm && cfg.K < 2) throw ParameterError("community models need k >= 2");
  if (cfg.tau) ArcFraction check(*cfg.tau);
  if (cfg.kappa) Concentration check(*cfg.kappa);
  if (hard && !cfg.tau) throw ParameterError(model_name(cfg.model) + " needs tau");
  if (!hard && !cfg.kappa) throw ParameterError(model_name(cfg.model) + " needs kappa");
}

void validate(const ExperimentConfig& cfg) {
  validate_model(cfg);
  const bool comm = is_community(cfg.model);
  if (cfg.trials < 1) throw ParameterError("trials must be >= 1");
  switch (cfg.detector) {
    case DetectorId::Interval:
      if (!cfg.tau) throw ParameterError("interval test needs tau (window)");
      break;
    case DetectorId::KnownTheta:
      if (comm) throw ParameterError("known-theta test needs a flat model");
      if (!cfg.tau) throw ParameterError("known-theta test needs tau");
      break;
    case DetectorId::Coherence:
    case DetectorId::Rayleigh:
      if (!comm) throw ParameterError(detector_name(cfg.detector) + " test needs a community model");
      if (!cfg.gamma && !cfg.kappa &&
          !(cfg.detector == DetectorId::Rayleigh && cfg.tau)) {
        throw ParameterError(detector_name(cfg.detector) + " test needs kappa or gamma" +
                              std::string(cfg.detector == DetectorId::Rayleigh ? " or tau" : ""));
      }
      break;
    case DetectorId::Variance:
      if (!comm) throw ParameterError("variance test needs a community model");
      if (cfg.K < 3) throw ParameterError("variance test needs k >= 3");
      if (!cfg.sigma2) throw ParameterError("variance test needs sigma2");
      break;
  }
}

ThresholdPolicy effective_policy(const ExperimentConfig& cfg) {
  if (cfg.gamma) return policy::Fixed{*cfg.gamma};
  if (cfg.policy) return *cfg.policy;
  switch (cfg.detector) {
    case DetectorId::Coherence:
      return policy::CoherencePaper{cfg.epsilon};
    case DetectorId::Rayleigh: {
      // beta = C(k,2) A / 2, the midpoint used by the Rayleigh bounds, with A
      // the mean resultant length of the planted law.
      return policy::Custom{"rayleigh", [](const ThresholdContext& ctx) {
                              return ctx.kappa
                                         ? rayleigh_threshold(ctx.K, Concentration(*ctx.kappa))
                                         : rayleigh_threshold_arc(ctx.K, ArcFraction(*ctx.tau));
                            }};
    }
    case DetectorId::KnownTheta:
      return policy::FlatHardA2{CnSchedule::log_quarter()};
    default:
      break;
  }
  if (cfg.model == ModelId::FlatVonMises) return policy::FlatVonMises{CnSchedule::log_quarter()};
  return policy::FlatHardA1{};
}

SignalKind signal_of(const ExperimentConfig& cfg) {
  if (cfg.model == ModelId::FlatHard || cfg.model == ModelId::CommunityHard) {
    return HardCluster{ArcFraction(*cfg.tau)};
  }
  return VonMises{Concentration(*cfg.kappa)};
}

Interval01 wilson_interval(std::uint64_t successes, std::uint64_t n) {
  if (n == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {std::clamp(std::min(center - half, p), 0.0, 1.0),
          std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

ResolvedThreshold cell_threshold(const ExperimentConfig& cfg) {
  const PreparedCell c = prepare(cfg);
  return {c.threshold, c.feasible, ""};
}

TestReport run_detector(const ExperimentConfig& cfg, bool under_h1, Rng& rng) {
  const PreparedCell c = prepare(cfg);
  TestReport r;
  r.threshold = c.threshold;
  r.threshold_feasible = c.feasible;
  r.decision = run_trial(c, under_h1, rng) ? Decision::RejectH0 : Decision::RetainH0;
  return r;
}

PhasePoint estimate_errors(const ExperimentConfig& cfg,
                           std::optional<std::uint64_t> cell_seed) {
  PhasePoint pt;
  pt.config = cfg;
  pt.cell_seed = cell_seed.value_or(cfg.seed);
  const PreparedCell cell = prepare(cfg);
  pt.threshold = cell.threshold;
  pt.threshold_feasible = cell.feasible;

  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t work = 2 * trials;
  std::vector<std::uint8_t> rejected(work, 0);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = work;
  std::exception_ptr error;

  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= work) return;
      const bool h1 = i >= trials;
      const std::size_t t = h1 ? i - trials : i;
      try {
        Rng rng = make_rng(pt.cell_seed, t, h1 ? 1 : 0);
        rejected[i] = run_trial(cell, h1, rng) ? 1 : 0;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        // Keep the lowest-index failure so the report does not depend on
        // scheduling.
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        next.store(work);
        return;
      }
    }
  };
  {
    const int width = worker_count(cfg.threads, work);
    std::vector<std::jthread> pool;
    for (int w = 1; w < width; ++w) pool.emplace_back(worker);
    worker();
  }
  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const CapabilityError& e) {
      pt.failed = true;
      pt.failure = e.what();
    } catch (const NumericError& e) {
      pt.failed = true;
      pt.failure = e.what();
    }
  }
  if (!pt.failed) {
    for (std::size_t i = 0; i < trials; ++i) pt.false_alarms += rejected[i];
    for (std::size_t i = trials; i < work; ++i) pt.misses += 1 - rejected[i];
    pt.pfa_hat = static_cast<double>(pt.false_alarms) / static_cast<double>(trials);
    pt.pmiss_hat = static_cast<double>(pt.misses) / static_cast<double>(trials);
    pt.pfa_ci = wilson_interval(pt.false_alarms, trials);
    pt.pmiss_ci = wilson_interval(pt.misses, trials);
  }
  attach_theory(pt);
  return pt;
}

RegimeVerdict cell_verdict(const ExperimentConfig& cfg) {
  const bool hard = cfg.model == ModelId::FlatHard || cfg.model == ModelId::CommunityHard;
  ModelParams mp{cfg.model, cfg.N, cfg.K, std::nullopt, std::nullopt};
  if (hard) mp.tau = cfg.tau;
  else mp.kappa = cfg.kappa;
  if (cfg.detector == DetectorId::KnownTheta && cfg.model == ModelId::FlatHard) {
    return known_theta_regime(cfg.N, cfg.K, *cfg.tau);
  }
  RegimeTunables tun;
  tun.epsilon = cfg.regime_epsilon;
  return regime_classify(mp, tun);
}

void attach_theory(PhasePoint& pt) {
  const ExperimentConfig& cfg = pt.config;
  const bool hard = cfg.model == ModelId::FlatHard || cfg.model == ModelId::CommunityHard;
  ModelParams mp{cfg.model, cfg.N, cfg.K, std::nullopt, std::nullopt};
  if (hard) mp.tau = cfg.tau;
  else mp.kappa = cfg.kappa;

  try {
    pt.verdict = cell_verdict(cfg);
  } catch (const Error&) {
    pt.verdict = {};
  }
  try {
    pt.functionals = impossibility_functionals(mp);
  } catch (const Error&) {
    pt.functionals.clear();
  }

  const double g = pt.threshold;
  try {
    switch (cfg.detector) {
      case DetectorId::Interval:
        if (cfg.model == ModelId::FlatHard) {
          pt.bounds = flat_hard_bounds(cfg.N, cfg.K, *cfg.tau, g);
        } else if (cfg.model == ModelId::FlatVonMises) {
          const ThresholdPolicy pol = effective_policy(cfg);
          if (const auto* vm = std::get_if<policy::FlatVonMises>(&pol)) {
            pt.bounds = flat_vm_bounds(cfg.N, cfg.K, *cfg.kappa, *cfg.tau, vm->cn.at(cfg.N));
          } else {
            pt.bounds = flat_vm_bounds_at(cfg.N, cfg.K, *cfg.kappa, *cfg.tau, g);
          }
        } else {
          pt.bounds = comm_interval_bounds(cfg.N, cfg.K, *cfg.tau,
                                           hard ? std::nullopt : cfg.kappa);
        }
        break;
      case DetectorId::KnownTheta:
        if (hard) {
          pt.bounds = known_theta_bounds(cfg.N, cfg.K, *cfg.tau, g);
        } else {
          // H0 side is the same as for hard clusters; the miss side uses the
          // lower-tail Chernoff bound around the planted-window mean.
          const auto k = known_theta_bounds(cfg.N, cfg.K, *cfg.tau, g);
          const auto v = flat_vm_bounds_at(cfg.N, cfg.K, *cfg.kappa, *cfg.tau, g);
          pt.bounds.add("pfa", *k.find("pfa"));
          pt.bounds.add("pmiss", *v.find("pmiss"));
        }
        break;
      case DetectorId::Coherence: {
        const ThresholdPolicy pol = effective_policy(cfg);
        const auto* cp = std::get_if<policy::CoherencePaper>(&pol);
        if (cp && !hard && *cfg.kappa > 0.0) {
          pt.bounds = comm_coherence_bounds(cfg.N, cfg.K, *cfg.kappa, cp->epsilon, cfg.B);
        }
        break;
      }
      case DetectorId::Rayleigh:
        if (!hard) {
          pt.bounds = rayleigh_bounds(cfg.N, cfg.K, *cfg.kappa, g);
        } else {
          // The false-alarm side does not depend on the planted law.
          const auto r = rayleigh_bounds(cfg.N, cfg.K, 0.0, g);
          pt.bounds.add("pfa", *r.find("pfa"));
        }
        break;
      case DetectorId::Variance:
        break;
    }
  } catch (const Error&) {
    pt.bounds = {};
  }
  pt.bound_pfa = pt.bounds.value("pfa");
  pt.bound_pmiss = pt.bounds.value("pmiss");

  pt.label = verdict_name(pt.verdict.verdict);
  pt.label_citation = pt.verdict.citation;
  const auto f = pt.functionals.find("functional");
  const bool small_functional = f != pt.functionals.end() && f->second < 0.05;
  if (pt.verdict.verdict == Verdict::Impossible || small_functional) {
    pt.label = "consistent-with-impossibility";
    if (pt.verdict.verdict != Verdict::Impossible) pt.label_citation = "second-moment";
  }
}

std::size_t SweepGrid::cells() const {
  std::size_t n = 1;
  for (const auto& a : axes) {
    if (a.values.empty()) throw ParameterError("axis '" + a.name + "' is empty");
    n *= a.values.size();
    if (n > kMaxSweepCells) return n;
  }
  return n;
}

std::vector<PhasePoint> sweep(const SweepGrid& grid, const ExperimentConfig& base) {
  if (grid.axes.empty()) throw ParameterError("sweep needs at least one axis");
  const std::size_t cells = grid.cells();
  if (cells > kMaxSweepCells) {
    throw CapabilityError("sweep has more than " + std::to_string(kMaxSweepCells) +
                          " cells");
  }
  std::vector<PhasePoint> rows;
  rows.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    ExperimentConfig cfg = base;
    // First axis outermost: decompose c with the last axis varying fastest.
    std::size_t rest = c;
    for (std::size_t a = grid.axes.size(); a-- > 0;) {
      const auto& axis = grid.axes[a];
      apply_key(cfg, axis.name, axis.values[rest % axis.values.size()]);
      rest /= axis.values.size();
    }
    const std::uint64_t seed = derive_seed(base.seed, c, 2);
    PhasePoint p;
    try {
      p = estimate_errors(cfg, seed);
    } catch (const ParameterError& e) {
      p.config = cfg;
      p.cell_seed = seed;
      p.failed = true;
      p.failure = e.what();
    } catch (const DomainError& e) {
      p.config = cfg;
      p.cell_seed = seed;
      p.failed = true;
      p.failure = e.what();
    }
    p.cell_index = c;
    rows.push_back(std::move(p));
  }
  return rows;
}

void write_csv_header(std::ostream& out) {
  out << "model,detector,policy,N_or_n,K_or_k,tau,kappa,trials,pfa_hat,pfa_lo,"
         "pfa_hi,pmiss_hat,pmiss_lo,pmiss_hi,total_err,verdict,verdict_citation,"
         "bound_pfa,bound_pmiss,seed,cell_index\n";
}

void write_csv_row(std::ostream& out, const PhasePoint& p) {
  const ExperimentConfig& c = p.config;
  std::string pol;
  try {
    pol = describe(effective_policy(c));
  } catch (const Error&) {
    pol = "";
  }
  out << model_name(c.model) << ',' << detector_name(c.detector) << ',' << pol << ','
      << c.N << ',' << c.K << ',' << opt_num(c.tau) << ',' << opt_num(c.kappa) << ','
      << c.trials << ',';
  if (p.failed) {
    out << ",,,,,,,failed,,,,";
  } else {
    out << num(p.pfa_hat) << ',' << num(p.pfa_ci.lo) << ',' << num(p.pfa_ci.hi) << ','
        << num(p.pmiss_hat) << ',' << num(p.pmiss_ci.lo) << ',' << num(p.pmiss_ci.hi)
        << ',' << num(p.total_error()) << ',' << p.label << ',' << p.label_citation
        << ',' << opt_num(p.bound_pfa) << ',' << opt_num(p.bound_pmiss) << ',';
  }
  out << p.cell_seed << ',';
  if (p.cell_index) out << *p.cell_index;
  out << '\n';
}

void write_csv(std::ostream& out, const std::vector<PhasePoint>& rows) {
  write_csv_header(out);
  for (const auto& r : rows) write_csv_row(out, r);
}

}  // namespace circlab
