#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dagopt/errors.hpp"
#include "dagopt/experiment.hpp"

namespace {

int run(int argc, char** argv) {
  using namespace dagopt;

  CLI::App app{"DAG structure learning by continuous constrained optimization"};
  app.require_subcommand(1);

  // --- simulate ---------------------------------------------------------
  SimulateSpec sim;
  std::string sim_out = "dataset";
  auto* simulate_cmd =
      app.add_subcommand("simulate", "generate a linear-SEM dataset");
  simulate_cmd->add_option("--d", sim.d, "number of variables");
  simulate_cmd->add_option("--avg-edges", sim.avg_edges,
                           "expected edge count (default: d)");
  simulate_cmd->add_option("--n", sim.n, "sample count");
  simulate_cmd->add_option("--noise-std", sim.noise_std, "noise stddev");
  simulate_cmd->add_option("--w-lo", sim.weight_lo, "min |weight|");
  simulate_cmd->add_option("--w-hi", sim.weight_hi, "max |weight|");
  simulate_cmd->add_option("--seed", sim.seed, "master seed");
  simulate_cmd->add_flag("--write-truth", sim.write_truth,
                         "also write <out>.truth.csv");
  simulate_cmd->add_option("--out", sim_out,
                           "output base path (writes <out>.csv, <out>.meta.json)");

  // --- fit ---------------------------------------------------------------
  std::string fit_dataset, fit_config, fit_out = "fit";
  bool fit_timings = false;
  auto* fit_cmd = app.add_subcommand("fit", "fit one dataset");
  fit_cmd->add_option("dataset", fit_dataset, "dataset base path or .csv")
      ->required();
  fit_cmd->add_option("--config", fit_config, "solver config file");
  fit_cmd->add_option("--out-dir", fit_out, "output directory");
  fit_cmd->add_flag("--timings", fit_timings, "record wall-clock in artifacts");

  // --- evaluate -----------------------------------------------------------
  std::string eval_est, eval_truth, eval_out;
  double eval_threshold = 0.3;
  auto* eval_cmd =
      app.add_subcommand("evaluate", "score an estimate against the truth");
  eval_cmd->add_option("estimate", eval_est, "estimated weights CSV")->required();
  eval_cmd->add_option("truth", eval_truth, "true graph CSV")->required();
  eval_cmd->add_option("--threshold", eval_threshold, "edge threshold omega");
  eval_cmd->add_option("--out", eval_out, "metrics report JSON path");

  // --- experiment ----------------------------------------------------------
  ExperimentSpec exp;
  std::string exp_preset = "alm_vs_qpm";
  std::string exp_method = "qpm", exp_optimizer = "lbfgs", exp_constraint = "exp";
  std::string exp_config;
  std::string exp_out = "experiment";
  auto* exp_cmd = app.add_subcommand("experiment", "run a preset study grid");
  exp_cmd->add_option("--preset", exp_preset,
                      "alm_vs_qpm | optimizer_study | custom");
  exp_cmd->add_option("--sizes", exp.sizes, "graph sizes");
  exp_cmd->add_option("--trials", exp.trials, "trials per cell");
  exp_cmd->add_option("--seed", exp.master_seed, "master seed");
  exp_cmd->add_option("--n", exp.n_samples, "samples per dataset");
  auto* method_opt =
      exp_cmd->add_option("--method", exp_method, "qpm | alm (custom preset)");
  auto* optimizer_opt = exp_cmd->add_option("--optimizer", exp_optimizer,
                                            "lbfgs | adam | momentum");
  auto* constraint_opt =
      exp_cmd->add_option("--constraint", exp_constraint, "exp | bin");
  double exp_lambda = 0.0;
  auto* lambda_opt =
      exp_cmd->add_option("--lambda", exp_lambda, "l1 penalty weight");
  exp_cmd->add_option("--threshold", exp.metrics_threshold,
                      "metrics threshold omega");
  exp_cmd->add_option("--config", exp_config, "base solver config file");
  exp_cmd->add_option("--out-dir", exp_out, "output directory");
  exp_cmd->add_option("--workers", exp.workers, "worker threads (0 = cores)");
  exp_cmd->add_flag("--charts", exp.charts, "render trace charts (SVG)");
  exp_cmd->add_flag("--timings", exp.timings, "record wall-clock in artifacts");
  exp_cmd->add_flag("--large", exp.allow_large, "allow sizes beyond 20");

  // --- trace-plot ----------------------------------------------------------
  std::string plot_in, plot_out;
  auto* plot_cmd = app.add_subcommand("trace-plot", "render a trace CSV as SVG");
  plot_cmd->add_option("trace", plot_in, "trace CSV")->required();
  plot_cmd->add_option("--out", plot_out, "output SVG (default <trace>.svg)");

  CLI11_PARSE(app, argc, argv);

  if (simulate_cmd->parsed()) {
    cmd_simulate(sim, sim_out);
    std::printf("wrote %s.csv and %s.meta.json\n", sim_out.c_str(),
                sim_out.c_str());
    return 0;
  }

  if (fit_cmd->parsed()) {
    std::optional<std::filesystem::path> config;
    if (!fit_config.empty()) config = fit_config;
    const SolveResult result = cmd_fit(fit_dataset, config, fit_out, fit_timings);
    std::printf("termination: %s  outer iterations: %zu  h_final: %g\n",
                to_string(result.termination), result.trace.size(),
                result.final_h());
    return 0;
  }

  if (eval_cmd->parsed()) {
    std::optional<std::filesystem::path> out;
    if (!eval_out.empty()) out = eval_out;
    const MetricsReport report =
        cmd_evaluate(eval_est, eval_truth, eval_threshold, out);
    std::printf("shd: %d  tpr: %g%s  sid: %s  edges: %d est / %d true\n",
                report.shd, report.tpr,
                report.tpr_defined ? "" : " (undefined: empty truth)",
                report.sid_defined ? std::to_string(report.sid).c_str()
                                   : "undefined (cyclic estimate)",
                report.est_edge_count, report.true_edge_count);
    return 0;
  }

  if (exp_cmd->parsed()) {
    if (exp_preset == "alm_vs_qpm") {
      exp.preset = ExperimentSpec::Preset::AlmVsQpm;
    } else if (exp_preset == "optimizer_study") {
      exp.preset = ExperimentSpec::Preset::OptimizerStudy;
    } else if (exp_preset == "custom") {
      exp.preset = ExperimentSpec::Preset::Custom;
    } else {
      throw ConfigError("preset",
                        "must be alm_vs_qpm, optimizer_study or custom");
    }
    SolverConfig base;
    if (!exp_config.empty()) base = read_solver_config(exp_config);
    if (lambda_opt->count()) base.lambda = exp_lambda;
    if (method_opt->count() || exp_config.empty()) {
      base.kind = parse_solver_kind(exp_method);
    }
    if (optimizer_opt->count() || exp_config.empty()) {
      base.optimizer = parse_optimizer_kind(exp_optimizer);
    }
    if (constraint_opt->count() || exp_config.empty()) {
      base.constraint = parse_constraint_name(exp_constraint);
    }
    exp.base = base;
    exp.out_dir = exp_out;

    const ExperimentResult result = run_experiment(exp);
    std::printf("experiment: %d trials completed, %d failed; artifacts in %s\n",
                result.completed, result.failed, exp_out.c_str());
    if (result.completed == 0) return 2;
    return 0;
  }

  if (plot_cmd->parsed()) {
    const std::string out = plot_out.empty() ? plot_in + ".svg" : plot_out;
    cmd_trace_plot(plot_in, out);
    std::printf("wrote %s\n", out.c_str());
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const dagopt::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const dagopt::InvalidInputError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 1;
  } catch (const dagopt::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const dagopt::NumericOverflowError& e) {
    std::fprintf(stderr, "numeric overflow: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
