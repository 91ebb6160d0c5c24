#pragma once

#include <functional>
#include <vector>

#include "dagopt/constraints.hpp"
#include "dagopt/objective.hpp"
#include "dagopt/optimizers.hpp"
#include "dagopt/types.hpp"

namespace dagopt {

enum class SolverKind { Alm, Qpm };
enum class OptimizerKind { Lbfgs, Adam, Momentum };
enum class Termination { FeasibleTol, RhoCap, MaxOuter };

const char* to_string(SolverKind kind);
const char* to_string(OptimizerKind kind);
const char* to_string(Termination reason);

// Inner-solve tolerance sequence tau_k.
struct TauSchedule {
  enum class Kind { Constant, Geometric };
  Kind kind = Kind::Constant;
  double tau0 = 1e-6;
  double decay = 0.5;   // geometric only
  double floor = 1e-8;  // geometric only

  double at(int k) const;
};

// Everything the outer loops need. Defaults reproduce the desk-scale
// studies: rho grows by beta = 10 from rho0 = 1 up to the 1e16 cap, inner
// solves run to a constant gradient tolerance of 1e-6, B starts at zero.
struct SolverConfig {
  SolverKind kind = SolverKind::Qpm;
  ConstraintKind constraint = ConstraintKind::exponential();
  double rho0 = 1.0;
  double beta = 10.0;
  // ALM only: hold rho when the violation shrank to gamma * previous, else
  // escalate. 0.1 keeps the ALM outer-iteration count within a couple of
  // QPM's on the benchmark suite; larger values let the dual steps stall
  // the schedule.
  double gamma = 0.1;
  double alpha0 = 0.0;  // ALM: initial multiplier estimate
  double eps_h = 1e-8;  // final feasibility tolerance
  double rho_max = 1e16;
  TauSchedule tau;
  double lambda = 0.0;  // l1 weight; > 0 switches to the split parameterization
  OptimizerKind optimizer = OptimizerKind::Lbfgs;
  int lbfgs_memory = 10;
  int inner_max_iters = 5000;
  double adam_step = 1e-3;
  double momentum_step = 1e-4;
  double momentum = 0.9;
  int max_outer = 100;
  double omega = 0.3;  // reporting threshold for the returned adjacency

  void validate() const;
};

// Snapshot of one outer iteration: the multiplier/penalty pair used for
// subproblem k, and the diagnostics of its solution B_k. The dual update is
// recoverable row-by-row: alpha[k+1] = alpha[k] + rho[k] * h[k].
struct IterationRecord {
  int k = 0;
  double rho = 0.0;
  double alpha = 0.0;  // 0 for QPM
  double h = 0.0;
  double f = 0.0;
  double l1 = 0.0;
  int inner_iters = 0;
  InnerStatus inner_status = InnerStatus::Converged;
  double grad_norm = 0.0;  // (projected) gradient norm at inner exit
  long cycles_005 = 0;     // simple cycles of B_k thresholded at 0.05
  bool cycles_capped = false;
  double seconds = 0.0;  // wall clock of the outer iteration
};

using Trace = std::vector<IterationRecord>;

struct SolveResult {
  WeightMatrix weights;
  Trace trace;
  Termination termination = Termination::MaxOuter;
  Adjacency thresholded;  // weights thresholded at cfg.omega

  double final_h() const { return trace.empty() ? 0.0 : trace.back().h; }
};

// Test hooks; on_inner_start sees the exact warm-start point of subproblem k.
struct SolveHooks {
  std::function<void(int k, const WeightMatrix& start)> on_inner_start;
};

// The final convergence test: the constraint value itself as feasibility
// indicator, h(B) <= eps_h.
bool final_convergence_test(const WeightMatrix& b, const ConstraintKind& kind,
                            double eps_h);

// Quadratic penalty method: minimize f(B) + (rho_k / 2) h(B)^2 to tolerance
// tau_k, warm-started at the previous solution; rho_{k+1} = beta * rho_k;
// stop when h passes the final convergence test or rho escalates past
// rho_max. Inner failures are recorded and the loop continues from the best
// iterate found.
SolveResult solve_qpm(const Dataset& data, const SolverConfig& cfg,
                      const SolveHooks& hooks = {});

// Augmented Lagrangian method: minimize f + alpha_k h + (rho_k / 2) h^2,
// then alpha_{k+1} = alpha_k + rho_k h(B_{k+1}), and rho escalates when the
// violation failed to shrink by the factor gamma. Same termination rules
// as QPM.
SolveResult solve_alm(const Dataset& data, const SolverConfig& cfg,
                      const SolveHooks& hooks = {});

// Dispatch on cfg.kind.
SolveResult solve(const Dataset& data, const SolverConfig& cfg,
                  const SolveHooks& hooks = {});

}  // namespace dagopt
