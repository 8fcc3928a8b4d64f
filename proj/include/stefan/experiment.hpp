#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stefan/analysis.hpp"
#include "stefan/experiment_spec.hpp"
#include "stefan/lumped.hpp"
#include "stefan/solver1d.hpp"
#include "stefan/spike.hpp"

namespace stefan {

/// Time after which a logistic source is effectively off (factor < 1/(1 + e^5));
/// +inf for sources without a cutoff, 0 for no source.
double pulse_end(const SourceModel& source);

/// First stored time after the early maximum of |phi| (taken over t <= early_limit)
/// at which |phi| drops below drop * max.
std::optional<double> relaxation_time(const StefanResidualTrace& residual, double early_limit, double drop);

/// Time of the thickness maximum, if the thickness declines afterwards.
std::optional<double> decline_onset(const std::vector<double>& times, const std::vector<double>& thickness);

struct CartesianResult {
  SimulationTrace trace;
  PhaseFrontTrace fronts;
  StefanResidualTrace residual;
  std::vector<TablelandMetrics> tableland;
  InstabilityTable instability;
  std::vector<double> thickness;
  double pulse_end = 0.0;
  std::optional<double> relaxation_time;
  std::optional<double> thickness_peak_time;
  /// Deposited energy over the domain and run time by adaptive quadrature.
  double deposited_energy = 0.0;
};

/// Runs the solver and every Cartesian diagnostic.
CartesianResult run_cartesian(const ExperimentSpec& spec);

/// Diagnostics only, on an existing trace.
CartesianResult analyse_cartesian(SimulationTrace trace, const ExperimentSpec& spec);

/// Sensitivity during extended-tableland epochs against the slow (Stefan) phase:
/// stored times between the relaxation time and the thickness decline onset
/// without an extended tableland.
struct InstabilityContrast {
  double tableland_max = 0.0;
  double slow_median = 0.0;
  double ratio = 0.0;
  std::size_t tableland_samples = 0;
  std::size_t slow_samples = 0;
};

InstabilityContrast instability_contrast(const CartesianResult& result);

struct LumpedResult {
  LumpedTrace trace;
  std::optional<TransitionBoundReport> bound;
};

LumpedResult run_lumped(const ExperimentSpec& spec);

struct SpikeResult {
  SpikeTrace trace;
  /// Lattice tableland per stored state.
  std::vector<TablelandMetrics> tableland;
  PhaseFrontTrace lattice_fronts;
};

SpikeResult run_spike_experiment(const ExperimentSpec& spec);

/// Levels n_x * refine^i (and n_t likewise). Analytic reference when the experiment
/// carries a pure cosine mode with no source and no latent heat.
ConvergenceResult run_convergence(const ExperimentSpec& spec, std::optional<std::size_t> levels = {});

struct CheckItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariant suite for one spec: energy ledger, transition bound, residual decay.
std::vector<CheckItem> run_checks(const ExperimentSpec& spec);

/// Runs spec and writes its outputs under output_root / spec.output_dir.
/// Returns the directory written.
std::filesystem::path run_experiment(const ExperimentSpec& spec, const std::filesystem::path& output_root);

struct SweepRun {
  std::string id;
  std::map<std::string, std::string> overrides;
  std::filesystem::path directory;
  bool ok = false;
  std::string error;
  /// Final exterior front (Cartesian kinds), NaN otherwise.
  double final_front = 0.0;
  double max_sensitivity = 0.0;
};

/// Cross product of the parameter lists, run concurrently on up to `threads`
/// workers (0: hardware concurrency). Writes one directory per run plus
/// sweep_summary.csv (and sweep_fronts.csv for Cartesian kinds).
std::vector<SweepRun> run_sweep(const ExperimentSpec& spec,
                                const std::vector<std::pair<std::string, std::vector<std::string>>>& params,
                                const std::filesystem::path& output_root, unsigned threads = 0);

/// STEFAN_OUTPUT_ROOT or "output".
std::filesystem::path default_output_root();

/// STEFAN_SPEC_DIR or the shipped specs directory.
std::filesystem::path default_spec_dir();

/// A path to an existing file, else spec_dir/<name>.ini, else the unique spec
/// in spec_dir whose name starts with `name`. Throws std::runtime_error.
std::filesystem::path resolve_spec(const std::string& name, const std::filesystem::path& spec_dir);

}  // namespace stefan
