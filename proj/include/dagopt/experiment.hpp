#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dagopt/graphs.hpp"
#include "dagopt/io.hpp"
#include "dagopt/simulate.hpp"
#include "dagopt/solvers.hpp"

namespace dagopt {

struct SimulateSpec {
  int d = 10;
  int avg_edges = -1;  // -1: ER1, i.e. d edges expected
  int n = 1000;
  double noise_std = 1.0;
  double weight_lo = 0.5;
  double weight_hi = 2.0;
  std::uint64_t seed = 0;
  bool write_truth = false;  // also emit <base>.truth.csv
};

// Grid of structure-learning runs over methods/optimizers x sizes x trials.
// Every artifact is a deterministic function of master_seed; the dataset of
// a (size, trial) cell is shared across methods so comparisons are paired.
struct ExperimentSpec {
  enum class Preset { AlmVsQpm, OptimizerStudy, Custom };

  Preset preset = Preset::AlmVsQpm;
  std::vector<int> sizes = {10, 20};
  int trials = 12;
  std::uint64_t master_seed = 0;
  SolverConfig base;
  int n_samples = 1000;
  double noise_std = 1.0;
  double weight_lo = 0.5;
  double weight_hi = 2.0;
  double metrics_threshold = 0.3;
  std::filesystem::path out_dir;
  int workers = 0;  // 0 = all logical cores
  bool charts = false;
  bool timings = false;
  bool allow_large = false;  // opt-in for sizes beyond 20

  void validate() const;
};

struct TrialKey {
  SolverKind method = SolverKind::Qpm;
  OptimizerKind optimizer = OptimizerKind::Lbfgs;
  int size = 0;
  int trial = 0;
};

struct TrialOutcome {
  TrialKey key;
  MetricsReport metrics;
  Termination termination = Termination::MaxOuter;
  Trace trace;
  bool inner_failure = false;  // any inner solve reported NumericalFailure
  std::optional<std::string> error;  // set when the trial threw
};

struct ExperimentResult {
  std::vector<TrialOutcome> outcomes;
  int completed = 0;
  int failed = 0;
};

// Dataset seed for a (size, trial) cell; method-independent by design.
std::uint64_t trial_seed(std::uint64_t master_seed, int size, int trial);

Dataset make_trial_dataset(std::uint64_t master_seed, int size, int trial,
                           int n_samples, double noise_std, double weight_lo,
                           double weight_hi);

// Writes <base>.csv and <base>.meta.json.
void cmd_simulate(const SimulateSpec& spec, const std::filesystem::path& base);

// Runs one fit and writes weights.csv, adjacency.csv, trace.csv and
// summary.json under out_dir.
SolveResult cmd_fit(const std::filesystem::path& dataset_base,
                    const std::optional<std::filesystem::path>& config_path,
                    const std::filesystem::path& out_dir,
                    bool include_timings = false);

// Thresholds the estimated weights at omega, scores against the nonzero
// pattern of the truth file, writes the report JSON when out_path is given.
MetricsReport cmd_evaluate(const std::filesystem::path& est_path,
                           const std::filesystem::path& truth_path,
                           double omega,
                           const std::optional<std::filesystem::path>& out_path);

// Full grid; writes trials.csv, aggregate.csv, per-trial trace CSVs (and
// failures.csv / charts when applicable) under spec.out_dir.
ExperimentResult run_experiment(const ExperimentSpec& spec);

void cmd_trace_plot(const std::filesystem::path& trace_csv,
                    const std::filesystem::path& out_svg);

// c = 1/d default for a Bin constraint parsed without an explicit bin_c.
SolverConfig resolve_constraint(SolverConfig cfg, Eigen::Index d);

}  // namespace dagopt
