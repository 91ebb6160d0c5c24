#pragma once

#include <functional>
#include <optional>

#include "dagopt/types.hpp"

namespace dagopt {

// One smooth subproblem over flat vectors. The callback writes the gradient
// into `grad` and returns the value; it must be deterministic. A non-finite
// return signals that the point is out of the representable range (the line
// searches back off, the fixed-step methods stop). `lower_bounds`, when
// present, box-constrains every coordinate from below.
struct InnerProblem {
  Eigen::Index dimension = 0;
  std::function<double(const Vector& x, Vector& grad)> value_and_grad;
  std::optional<Vector> lower_bounds;
};

enum class InnerStatus { Converged, MaxIters, NumericalFailure };

const char* to_string(InnerStatus status);

struct InnerResult {
  Vector solution;
  double value = 0.0;
  double grad_norm = 0.0;  // 2-norm of the (projected) gradient at solution
  int iterations = 0;
  InnerStatus status = InnerStatus::MaxIters;
};

// Accepted line-search step, for asserting the Wolfe conditions on traced
// runs. dir_deriv0/dir_deriv1 are g.d at the old and new point.
struct LineSearchRecord {
  double f0 = 0.0;
  double f1 = 0.0;
  double dir_deriv0 = 0.0;
  double dir_deriv1 = 0.0;
  double step = 0.0;
  bool bounded = false;  // projected segment search, curvature not enforced
};

struct LbfgsOptions {
  int memory = 10;
  double c1 = 1e-4;  // sufficient decrease
  double c2 = 0.9;   // curvature
  int max_line_search = 60;
  std::function<void(const LineSearchRecord&)> observer;  // optional
};

// Limited-memory BFGS with a Wolfe line search; bound constraints are
// handled by gradient projection with a backtracking search along the
// projected path. Accepted values are monotone nonincreasing. Returns the
// starting point untouched when it already meets the tolerance.
InnerResult minimize_lbfgs(const InnerProblem& problem, const Vector& x0,
                           double tau, int max_iters,
                           const LbfgsOptions& options = {});

// Deterministic full-batch Adam (step 1e-3, beta1 0.9, beta2 0.999 by
// default). Converges slowly near the solution; the outer loops rely on its
// MaxIters status being benign.
InnerResult minimize_adam(const InnerProblem& problem, const Vector& x0,
                          double tau, int max_iters, double step = 1e-3);

// Gradient descent with (heavy-ball) momentum. Diverges on badly
// conditioned subproblems; the NumericalFailure status carries the best
// iterate seen so that callers can report results right before termination.
InnerResult minimize_momentum(const InnerProblem& problem, const Vector& x0,
                              double tau, int max_iters, double step = 1e-4,
                              double momentum = 0.9);

}  // namespace dagopt
