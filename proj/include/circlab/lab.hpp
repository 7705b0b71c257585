#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "circlab/config.hpp"
#include "circlab/dataset_io.hpp"
#include "circlab/detectors.hpp"
#include "circlab/theory.hpp"

namespace circlab {

enum class DetectorId { Interval, Coherence, Rayleigh, Variance, KnownTheta };

std::string detector_name(DetectorId d);  // interval, coherence, ...
DetectorId parse_detector(const std::string& name);

struct ExperimentConfig {
  ModelId model = ModelId::FlatHard;
  int N = 100;  // N or n
  int K = 5;    // K or k
  std::optional<double> tau;    // planted arc, and window of interval tests
  std::optional<double> kappa;  // von Mises concentration
  DetectorId detector = DetectorId::Interval;
  std::optional<ThresholdPolicy> policy;  // default depends on model/detector
  double epsilon = 0.5;                   // coherence epsilon
  std::optional<double> sigma2;
  std::optional<double> gamma;  // explicit threshold, overrides the policy
  std::optional<int> B;
  double regime_epsilon = 0.1;
  int trials = 1000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  std::string out;
  int max_exact_n = kDefaultMaxExactN;
  double budget = kDefaultEnumerationBudget;
};

// Sets one config key from its text value. Throws FormatError for unknown
// keys or bad values.
void apply_key(ExperimentConfig& cfg, const std::string& key,
               const std::string& value);
ExperimentConfig config_from_text(const ConfigText& text);

// Checks sizes and the parameters the model itself needs.
void validate_model(const ExperimentConfig& cfg);
// Also checks model/detector compatibility and required parameters.
void validate(const ExperimentConfig& cfg);

ThresholdPolicy effective_policy(const ExperimentConfig& cfg);
SignalKind signal_of(const ExperimentConfig& cfg);

struct Interval01 {
  double lo = 0.0;
  double hi = 1.0;
};
Interval01 wilson_interval(std::uint64_t successes, std::uint64_t n);

struct PhasePoint {
  ExperimentConfig config;
  std::uint64_t cell_seed = 0;
  std::optional<std::uint64_t> cell_index;
  bool failed = false;
  std::string failure;
  std::uint64_t false_alarms = 0;
  std::uint64_t misses = 0;
  double pfa_hat = 0.0;
  double pmiss_hat = 0.0;
  Interval01 pfa_ci;
  Interval01 pmiss_ci;
  double threshold = 0.0;
  bool threshold_feasible = true;
  RegimeVerdict verdict;
  std::string label;  // achievable / indeterminate / consistent-with-impossibility
  std::string label_citation;
  BoundReport bounds;
  std::optional<double> bound_pfa;
  std::optional<double> bound_pmiss;
  std::map<std::string, double> functionals;

  double total_error() const { return pfa_hat + pmiss_hat; }
};

// Runs cfg.trials datasets under each hypothesis. Trial t under H0 uses
// seed derive_seed(cell_seed, t, 0), under H1 derive_seed(cell_seed, t, 1),
// so results do not depend on the number of threads.
PhasePoint estimate_errors(const ExperimentConfig& cfg,
                           std::optional<std::uint64_t> cell_seed = std::nullopt);

// Threshold the configured detector compares against.
ResolvedThreshold cell_threshold(const ExperimentConfig& cfg);

// One run of the configured detector on a freshly drawn dataset.
TestReport run_detector(const ExperimentConfig& cfg, bool under_h1, Rng& rng);

// Theory attached to a cell: bounds, verdict, label, functionals.
void attach_theory(PhasePoint& point);
// Regime verdict for the cell's model and parameters (the known-phase
// classification for the known-theta detector on hard clusters).
RegimeVerdict cell_verdict(const ExperimentConfig& cfg);

struct SweepGrid {
  std::vector<ConfigAxis> axes;
  std::size_t cells() const;
};

inline constexpr std::size_t kMaxSweepCells = 100000;

// Cross product with the first axis outermost.
std::vector<PhasePoint> sweep(const SweepGrid& grid, const ExperimentConfig& base);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const PhasePoint& p);
void write_csv(std::ostream& out, const std::vector<PhasePoint>& rows);

struct MomentEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

inline constexpr double kMaxSecondMomentSubsets = 1e5;

// Monte Carlo estimate of E_Q[L^2]: X ~ Q, L(X) computed by exact averaging
// over all planted subsets with the phase integrated in closed form.
MomentEstimate empirical_second_moment(const ModelParams& params, int trials,
                                       std::uint64_t seed);
// L(X) itself, for one dataset.
double likelihood_ratio_flat(const FlatSample& x, int K, const SignalKind& s);
double likelihood_ratio_community(const EdgeSample& x, int k, const SignalKind& s);

struct PhaseDiagramFiles {
  std::string sweep_csv;
  std::string boundary_csv;
  std::string svg;
};

// Needs exactly two axes: the first is horizontal, the second vertical.
// Writes <prefix>_sweep.csv, <prefix>_boundary.csv and <prefix>_heatmap.svg.
PhaseDiagramFiles phase_diagram(const SweepGrid& grid, const ExperimentConfig& base,
                                const std::string& prefix);

struct BoundaryRow {
  std::string x_name;
  std::string x_value;
  std::string boundary;
  std::string y_name;
  double y_value;
};
std::vector<BoundaryRow> theory_boundaries(const SweepGrid& grid,
                                           const ExperimentConfig& base);
std::string heatmap_svg(const SweepGrid& grid, const std::vector<PhasePoint>& rows);

}  // namespace circlab
