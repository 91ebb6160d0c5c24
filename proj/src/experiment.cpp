#include "dagopt/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include <nlohmann/json.hpp>

#include "dagopt/charts.hpp"
#include "dagopt/errors.hpp"

namespace dagopt {

using nlohmann::json;

void ExperimentSpec::validate() const {
  if (trials < 1) throw InvalidInputError("ExperimentSpec: trials must be >= 1");
  if (sizes.empty()) throw InvalidInputError("ExperimentSpec: sizes is empty");
  for (int d : sizes) {
    if (d < 2) throw InvalidInputError("ExperimentSpec: sizes must be >= 2");
    if (d > 20 && !allow_large) {
      throw InvalidInputError(
          "ExperimentSpec: size " + std::to_string(d) +
          " exceeds the desk-scale default; pass --large to run it");
    }
  }
  if (n_samples < 1) throw InvalidInputError("ExperimentSpec: n_samples >= 1");
  if (out_dir.empty()) throw InvalidInputError("ExperimentSpec: out_dir not set");
  base.validate();
}

std::uint64_t trial_seed(std::uint64_t master_seed, int size, int trial) {
  return derive_seed(derive_seed(master_seed, static_cast<std::uint64_t>(size)),
                     static_cast<std::uint64_t>(trial));
}

Dataset make_trial_dataset(std::uint64_t master_seed, int size, int trial,
                           int n_samples, double noise_std, double weight_lo,
                           double weight_hi) {
  const std::uint64_t seed = trial_seed(master_seed, size, trial);
  const BinaryDag dag = sample_er_dag(size, size, seed);  // ER1
  const WeightMatrix w = sample_weights(dag, weight_lo, weight_hi, seed);
  return sample_linear_sem(w, n_samples, noise_std, seed);
}

SolverConfig resolve_constraint(SolverConfig cfg, Eigen::Index d) {
  if (cfg.constraint.tag == ConstraintKind::Tag::Bin &&
      !(cfg.constraint.c > 0.0)) {
    cfg.constraint = ConstraintKind::binomial_default(d);
  }
  return cfg;
}

void cmd_simulate(const SimulateSpec& spec, const std::filesystem::path& base) {
  const int avg_edges = spec.avg_edges < 0 ? spec.d : spec.avg_edges;
  const BinaryDag dag = sample_er_dag(spec.d, avg_edges, spec.seed);
  const WeightMatrix w =
      sample_weights(dag, spec.weight_lo, spec.weight_hi, spec.seed);
  const Dataset data =
      sample_linear_sem(w, spec.n, spec.noise_std, spec.seed);
  write_dataset(base, data);
  if (spec.write_truth) {
    write_matrix_csv(base.string() + ".truth.csv", dag.adjacency);
  }
}

SolveResult cmd_fit(const std::filesystem::path& dataset_base,
                    const std::optional<std::filesystem::path>& config_path,
                    const std::filesystem::path& out_dir,
                    bool include_timings) {
  const Dataset data = read_dataset(dataset_base);
  SolverConfig cfg =
      config_path ? read_solver_config(*config_path) : SolverConfig{};
  cfg = resolve_constraint(cfg, data.d());

  const SolveResult result = solve(data, cfg);

  std::filesystem::create_directories(out_dir);
  write_matrix_csv(out_dir / "weights.csv", result.weights);
  write_matrix_csv(out_dir / "adjacency.csv", result.thresholded);
  write_trace_csv(out_dir / "trace.csv", result.trace, include_timings);
  write_solve_summary(out_dir / "summary.json", result, cfg, include_timings);
  return result;
}

MetricsReport cmd_evaluate(const std::filesystem::path& est_path,
                           const std::filesystem::path& truth_path,
                           double omega,
                           const std::optional<std::filesystem::path>& out_path) {
  const Matrix est = read_matrix_csv(est_path);
  // A weights file and a 0/1 adjacency both reduce to the nonzero pattern.
  const Adjacency truth = threshold(read_matrix_csv(truth_path), 0.0);
  const MetricsReport report = evaluate_graphs(est, truth, omega);

  if (out_path) {
    json out;
    out["shd"] = report.shd;
    out["tpr"] = report.tpr;
    out["tpr_defined"] = report.tpr_defined;
    if (report.sid_defined) out["sid"] = report.sid;
    out["sid_defined"] = report.sid_defined;
    out["edges_true"] = report.true_edge_count;
    out["edges_est"] = report.est_edge_count;
    out["threshold"] = report.threshold_used;
    atomic_write_text(*out_path, out.dump(2) + "\n");
  }
  return report;
}

namespace {

std::vector<std::pair<SolverKind, OptimizerKind>> preset_cells(
    const ExperimentSpec& spec) {
  switch (spec.preset) {
    case ExperimentSpec::Preset::AlmVsQpm:
      return {{SolverKind::Alm, spec.base.optimizer},
              {SolverKind::Qpm, spec.base.optimizer}};
    case ExperimentSpec::Preset::OptimizerStudy:
      return {{SolverKind::Qpm, OptimizerKind::Lbfgs},
              {SolverKind::Qpm, OptimizerKind::Adam},
              {SolverKind::Qpm, OptimizerKind::Momentum}};
    case ExperimentSpec::Preset::Custom:
      return {{spec.base.kind, spec.base.optimizer}};
  }
  throw InvalidInputError("run_experiment: unknown preset");
}

TrialOutcome run_trial(const ExperimentSpec& spec, const TrialKey& key) {
  TrialOutcome outcome;
  outcome.key = key;
  try {
    const Dataset data =
        make_trial_dataset(spec.master_seed, key.size, key.trial,
                           spec.n_samples, spec.noise_std, spec.weight_lo,
                           spec.weight_hi);
    SolverConfig cfg = resolve_constraint(spec.base, data.d());
    cfg.kind = key.method;
    cfg.optimizer = key.optimizer;

    const SolveResult result = solve(data, cfg);
    outcome.trace = result.trace;
    outcome.termination = result.termination;
    outcome.metrics = evaluate_graphs(result.weights, *data.ground_truth,
                                      spec.metrics_threshold);
    for (const auto& record : result.trace) {
      if (record.inner_status == InnerStatus::NumericalFailure) {
        outcome.inner_failure = true;
        break;
      }
    }
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

struct CellStats {
  int size = 0;
  SolverKind method{};
  OptimizerKind optimizer{};
  int n_trials = 0;
  int n_failed = 0;
  int inner_failure_trials = 0;
  int feasible_trials = 0;
  std::vector<double> shd, sid, tpr;
};

void mean_se(const std::vector<double>& v, double& mean, double& se) {
  if (v.empty()) {
    mean = std::nan("");
    se = std::nan("");
    return;
  }
  double sum = 0.0;
  for (double x : v) sum += x;
  mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) {
    se = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  se = std::sqrt(ss / static_cast<double>(v.size() - 1)) /
       std::sqrt(static_cast<double>(v.size()));
}

std::string trace_filename(const TrialKey& key) {
  return std::string("trace_") + to_string(key.method) + "_" +
         to_string(key.optimizer) + "_d" + std::to_string(key.size) + "_t" +
         std::to_string(key.trial) + ".csv";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  for (int d : spec.sizes) {
    if (d > 20) {
      std::fprintf(stderr,
                   "warning: size d=%d is beyond the desk-scale presets; "
                   "expect long runtimes\n",
                   d);
    }
  }

  const auto cells = preset_cells(spec);
  std::vector<TrialKey> keys;
  for (const auto& [method, optimizer] : cells) {
    for (int size : spec.sizes) {
      for (int trial = 0; trial < spec.trials; ++trial) {
        keys.push_back({method, optimizer, size, trial});
      }
    }
  }

  ExperimentResult result;
  result.outcomes.resize(keys.size());

  int workers = spec.workers > 0
                    ? spec.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(keys.size())));

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= keys.size()) return;
      result.outcomes[i] = run_trial(spec, keys[i]);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir / "traces");

  std::string trials_csv =
      "trial,d,method,optimizer,shd,sid,tpr,edges_true,edges_est,threshold\n";
  std::string failures_csv = "trial,d,method,optimizer,error\n";
  bool any_failure_rows = false;
  std::vector<CellStats> stats;

  const auto cell_of = [&](const TrialKey& key) -> CellStats& {
    for (auto& s : stats) {
      if (s.size == key.size && s.method == key.method &&
          s.optimizer == key.optimizer) {
        return s;
      }
    }
    stats.push_back({key.size, key.method, key.optimizer});
    return stats.back();
  };

  for (const auto& outcome : result.outcomes) {
    const TrialKey& key = outcome.key;
    CellStats& cell = cell_of(key);
    ++cell.n_trials;

    if (outcome.error) {
      ++result.failed;
      ++cell.n_failed;
      std::string msg = *outcome.error;
      for (char& ch : msg) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      failures_csv += std::to_string(key.trial) + ',' +
                      std::to_string(key.size) + ',' + to_string(key.method) +
                      ',' + to_string(key.optimizer) + ',' + msg + '\n';
      any_failure_rows = true;
      continue;
    }

    ++result.completed;
    if (outcome.inner_failure) ++cell.inner_failure_trials;
    if (outcome.termination == Termination::FeasibleTol) ++cell.feasible_trials;

    const MetricsReport& m = outcome.metrics;
    cell.shd.push_back(m.shd);
    cell.tpr.push_back(m.tpr);
    if (m.sid_defined) cell.sid.push_back(m.sid);

    trials_csv += std::to_string(key.trial) + ',' + std::to_string(key.size) +
                  ',' + to_string(key.method) + ',' + to_string(key.optimizer) +
                  ',' + std::to_string(m.shd) + ',' +
                  (m.sid_defined ? std::to_string(m.sid) : std::string("nan")) +
                  ',' + format_double(m.tpr) + ',' +
                  std::to_string(m.true_edge_count) + ',' +
                  std::to_string(m.est_edge_count) + ',' +
                  format_double(m.threshold_used) + '\n';

    write_trace_csv(spec.out_dir / "traces" / trace_filename(key),
                    outcome.trace, spec.timings);
    if (spec.charts && key.trial == 0) {
      write_trace_chart(spec.out_dir / "traces" /
                            (trace_filename(key) + ".svg"),
                        outcome.trace);
    }
  }

  std::string aggregate_csv =
      "d,method,optimizer,n_trials,n_failed,inner_failure_trials,"
      "feasible_trials,shd_mean,shd_se,sid_mean,sid_se,tpr_mean,tpr_se\n";
  for (const auto& cell : stats) {
    double shd_mean, shd_se, sid_mean, sid_se, tpr_mean, tpr_se;
    mean_se(cell.shd, shd_mean, shd_se);
    mean_se(cell.sid, sid_mean, sid_se);
    mean_se(cell.tpr, tpr_mean, tpr_se);
    aggregate_csv += std::to_string(cell.size) + ',' + to_string(cell.method) +
                     ',' + to_string(cell.optimizer) + ',' +
                     std::to_string(cell.n_trials) + ',' +
                     std::to_string(cell.n_failed) + ',' +
                     std::to_string(cell.inner_failure_trials) + ',' +
                     std::to_string(cell.feasible_trials) + ',' +
                     format_double(shd_mean) + ',' + format_double(shd_se) +
                     ',' + format_double(sid_mean) + ',' +
                     format_double(sid_se) + ',' + format_double(tpr_mean) +
                     ',' + format_double(tpr_se) + '\n';
  }

  atomic_write_text(spec.out_dir / "trials.csv", trials_csv);
  atomic_write_text(spec.out_dir / "aggregate.csv", aggregate_csv);
  if (any_failure_rows) {
    atomic_write_text(spec.out_dir / "failures.csv", failures_csv);
  }
  return result;
}

void cmd_trace_plot(const std::filesystem::path& trace_csv,
                    const std::filesystem::path& out_svg) {
  write_trace_chart(out_svg, read_trace_csv(trace_csv));
}

}  // namespace dagopt
