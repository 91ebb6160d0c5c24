#include "dagopt/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "dagopt/errors.hpp"
#include "dagopt/graphs.hpp"

namespace dagopt {

const char* to_string(SolverKind kind) {
  return kind == SolverKind::Alm ? "alm" : "qpm";
}

const char* to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::Lbfgs: return "lbfgs";
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::Momentum: return "momentum";
  }
  return "unknown";
}

const char* to_string(Termination reason) {
  switch (reason) {
    case Termination::FeasibleTol: return "feasible_tol";
    case Termination::RhoCap: return "rho_cap";
    case Termination::MaxOuter: return "max_outer";
  }
  return "unknown";
}

double TauSchedule::at(int k) const {
  if (kind == Kind::Constant) return tau0;
  return std::max(tau0 * std::pow(decay, k), floor);
}

void SolverConfig::validate() const {
  if (!(rho0 > 0.0)) throw InvalidInputError("SolverConfig: rho0 must be > 0");
  if (!(beta > 1.0)) throw InvalidInputError("SolverConfig: beta must be > 1");
  if (kind == SolverKind::Alm && !(gamma > 0.0 && gamma < 1.0)) {
    throw InvalidInputError("SolverConfig: gamma must be in (0, 1)");
  }
  if (!(eps_h > 0.0)) throw InvalidInputError("SolverConfig: eps_h must be > 0");
  if (!(rho_max > 0.0)) {
    throw InvalidInputError("SolverConfig: rho_max must be > 0");
  }
  if (tau.tau0 < 0.0 || (tau.kind == TauSchedule::Kind::Geometric &&
                         (tau.decay <= 0.0 || tau.floor < 0.0))) {
    throw InvalidInputError("SolverConfig: tau schedule must be nonnegative");
  }
  if (lambda < 0.0) throw InvalidInputError("SolverConfig: lambda must be >= 0");
  if (lbfgs_memory < 1) {
    throw InvalidInputError("SolverConfig: lbfgs_memory must be >= 1");
  }
  if (inner_max_iters < 1) {
    throw InvalidInputError("SolverConfig: inner_max_iters must be >= 1");
  }
  if (!(adam_step > 0.0) || !(momentum_step > 0.0)) {
    throw InvalidInputError("SolverConfig: optimizer steps must be > 0");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    throw InvalidInputError("SolverConfig: momentum must be in [0, 1)");
  }
  if (max_outer < 0) {
    throw InvalidInputError("SolverConfig: max_outer must be >= 0");
  }
  if (omega < 0.0) throw InvalidInputError("SolverConfig: omega must be >= 0");
}

bool final_convergence_test(const WeightMatrix& b, const ConstraintKind& kind,
                            double eps_h) {
  if (!(eps_h > 0.0)) {
    throw InvalidInputError("final_convergence_test: eps_h must be > 0");
  }
  return h_value(b, kind) <= eps_h;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector flatten(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unflatten(const Vector& x, Eigen::Index d) {
  return Eigen::Map<const Matrix>(x.data(), d, d);
}

// Subproblem over vec(B), or over [vec(P); vec(Q)] >= 0 when lambda > 0.
// Constraint overflow surfaces as +inf so the line searches back away.
InnerProblem make_inner_problem(const Dataset& data, const ConstraintKind& kind,
                                double rho, double alpha, double lambda) {
  const Eigen::Index d = data.d();
  InnerProblem problem;
  if (lambda == 0.0) {
    problem.dimension = d * d;
    problem.value_and_grad = [&data, kind, rho, alpha, d](const Vector& x,
                                                          Vector& grad) {
      try {
        const ValueGrad vg =
            penalized_value_grad(data, unflatten(x, d), kind, rho, alpha);
        grad = flatten(vg.grad);
        return vg.value;
      } catch (const NumericOverflowError&) {
        grad.setZero();
        return kInf;
      }
    };
  } else {
    problem.dimension = 2 * d * d;
    problem.lower_bounds = Vector::Zero(2 * d * d);
    problem.value_and_grad = [&data, kind, rho, alpha, lambda, d](
                                 const Vector& x, Vector& grad) {
      try {
        const SplitMatrix s{unflatten(x.head(d * d), d),
                            unflatten(x.tail(d * d), d)};
        const SplitValueGrad vg =
            penalized_split_value_grad(data, s, kind, rho, alpha, lambda);
        grad.head(d * d) = flatten(vg.grad_pos);
        grad.tail(d * d) = flatten(vg.grad_neg);
        return vg.value;
      } catch (const NumericOverflowError&) {
        grad.setZero();
        return kInf;
      }
    };
  }
  return problem;
}

InnerResult run_inner(const SolverConfig& cfg, const InnerProblem& problem,
                      const Vector& x0, double tau) {
  // The paper's tau_k sequence is merely nonnegative; the minimizers insist
  // on a positive tolerance, so a zero maps to the smallest normal double.
  tau = std::max(tau, std::numeric_limits<double>::min());
  switch (cfg.optimizer) {
    case OptimizerKind::Lbfgs: {
      LbfgsOptions options;
      options.memory = cfg.lbfgs_memory;
      return minimize_lbfgs(problem, x0, tau, cfg.inner_max_iters, options);
    }
    case OptimizerKind::Adam:
      return minimize_adam(problem, x0, tau, cfg.inner_max_iters,
                           cfg.adam_step);
    case OptimizerKind::Momentum:
      return minimize_momentum(problem, x0, tau, cfg.inner_max_iters,
                               cfg.momentum_step, cfg.momentum);
  }
  throw InvalidInputError("solve: unknown optimizer kind");
}

SolveResult run_outer(const Dataset& data, const SolverConfig& cfg,
                      const SolveHooks& hooks, bool alm) {
  cfg.validate();
  const Eigen::Index d = data.d();
  const bool split_param = cfg.lambda > 0.0;

  WeightMatrix b = WeightMatrix::Zero(d, d);
  double alpha = alm ? cfg.alpha0 : 0.0;
  double rho = cfg.rho0;
  double h_prev = h_value(b, cfg.constraint);

  SolveResult result;
  result.termination = Termination::MaxOuter;
  result.trace.reserve(static_cast<std::size_t>(std::max(cfg.max_outer, 0)));

  for (int k = 0; k < cfg.max_outer; ++k) {
    const auto t_start = std::chrono::steady_clock::now();
    if (hooks.on_inner_start) hooks.on_inner_start(k, b);

    const InnerProblem problem = make_inner_problem(
        data, cfg.constraint, rho, alpha, cfg.lambda);
    Vector x0;
    if (split_param) {
      const SplitMatrix s = split(b);
      x0.resize(2 * d * d);
      x0.head(d * d) = flatten(s.pos);
      x0.tail(d * d) = flatten(s.neg);
    } else {
      x0 = flatten(b);
    }
    const InnerResult inner = run_inner(cfg, problem, x0, cfg.tau.at(k));

    WeightMatrix b_next;
    if (split_param) {
      b_next = merge(SplitMatrix{unflatten(inner.solution.head(d * d), d),
                                 unflatten(inner.solution.tail(d * d), d)});
    } else {
      b_next = unflatten(inner.solution, d);
    }

    double h_k = kInf;
    try {
      h_k = h_value(b_next, cfg.constraint);
    } catch (const NumericOverflowError&) {
    }
    const double f_k = least_squares(data, b_next);
    if (!std::isfinite(h_k) || !std::isfinite(f_k)) {
      break;  // keep the last finite iterate
    }
    b = b_next;

    IterationRecord record;
    record.k = k;
    record.rho = rho;
    record.alpha = alpha;
    record.h = h_k;
    record.f = f_k;
    record.l1 = b.cwiseAbs().sum();
    record.inner_iters = inner.iterations;
    record.inner_status = inner.status;
    record.grad_norm = inner.grad_norm;
    const CycleCount cycles = count_simple_cycles(threshold(b, 0.05));
    record.cycles_005 = cycles.count;
    record.cycles_capped = cycles.capped;
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    result.trace.push_back(record);

    if (h_k <= cfg.eps_h) {
      result.termination = Termination::FeasibleTol;
      break;
    }

    bool escalate = true;
    if (alm) {
      alpha = alpha + rho * h_k;
      escalate = std::abs(h_k) > cfg.gamma * std::abs(h_prev);
    }
    if (escalate) rho *= cfg.beta;
    h_prev = h_k;

    if (rho > cfg.rho_max) {
      result.termination = Termination::RhoCap;
      break;
    }
  }

  result.weights = b;
  result.thresholded = threshold(b, cfg.omega);
  return result;
}

}  // namespace

SolveResult solve_qpm(const Dataset& data, const SolverConfig& cfg,
                      const SolveHooks& hooks) {
  if (cfg.kind != SolverKind::Qpm) {
    throw InvalidInputError("solve_qpm: cfg.kind must be QPM");
  }
  return run_outer(data, cfg, hooks, /*alm=*/false);
}

SolveResult solve_alm(const Dataset& data, const SolverConfig& cfg,
                      const SolveHooks& hooks) {
  if (cfg.kind != SolverKind::Alm) {
    throw InvalidInputError("solve_alm: cfg.kind must be ALM");
  }
  return run_outer(data, cfg, hooks, /*alm=*/true);
}

SolveResult solve(const Dataset& data, const SolverConfig& cfg,
                  const SolveHooks& hooks) {
  return cfg.kind == SolverKind::Alm ? solve_alm(data, cfg, hooks)
                                     : solve_qpm(data, cfg, hooks);
}

}  // namespace dagopt
