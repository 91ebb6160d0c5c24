#include "dagopt/optimizers.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "dagopt/errors.hpp"

namespace dagopt {

const char* to_string(InnerStatus status) {
  switch (status) {
    case InnerStatus::Converged: return "converged";
    case InnerStatus::MaxIters: return "max_iters";
    case InnerStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_args(const InnerProblem& problem, const Vector& x0, double tau) {
  if (!problem.value_and_grad || problem.dimension <= 0) {
    throw InvalidInputError("minimize: problem callback/dimension not set");
  }
  if (x0.size() != problem.dimension) {
    throw InvalidInputError("minimize: x0 dimension mismatch");
  }
  if (!(tau > 0.0)) {
    throw InvalidInputError("minimize: tolerance must be > 0");
  }
  if (problem.lower_bounds && problem.lower_bounds->size() != problem.dimension) {
    throw InvalidInputError("minimize: lower_bounds dimension mismatch");
  }
}

Vector clamp(const InnerProblem& problem, Vector x) {
  if (problem.lower_bounds) x = x.cwiseMax(*problem.lower_bounds);
  return x;
}

// Gradient with the components pointing into an active lower bound zeroed;
// its norm is the stationarity measure for the box-constrained case.
Vector projected_gradient(const InnerProblem& problem, const Vector& x,
                          const Vector& g) {
  if (!problem.lower_bounds) return g;
  Vector pg = g;
  const Vector& lb = *problem.lower_bounds;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] <= lb[i] && g[i] > 0.0) pg[i] = 0.0;
  }
  return pg;
}

struct LineSearchOutcome {
  bool ok = false;
  double step = 0.0;
  double f = kInf;
  Vector x;
  Vector g;
};

// Strong Wolfe search: bracketing phase with doubling, then sectioning with
// quadratic interpolation. Non-finite trial values are treated as
// overshoots and shrink the bracket.
LineSearchOutcome wolfe_search(const InnerProblem& problem, const Vector& x,
                               double f0, const Vector& g0, const Vector& dir,
                               double step_init, const LbfgsOptions& options) {
  LineSearchOutcome out;
  const double dphi0 = g0.dot(dir);
  if (!(dphi0 < 0.0)) return out;

  Vector xt(x.size()), gt(x.size());
  const auto phi = [&](double a) {
    xt = x + a * dir;
    return problem.value_and_grad(xt, gt);
  };
  const auto accept = [&](double a, double fa, double dphia) {
    out.ok = true;
    out.step = a;
    out.f = fa;
    out.x = xt;
    out.g = gt;
    if (options.observer) {
      options.observer({f0, fa, dphi0, dphia, a, false});
    }
  };

  int evals = 0;
  const auto zoom = [&](double lo, double f_lo, double dphi_lo, double hi,
                        double f_hi) {
    while (evals < options.max_line_search) {
      double a;
      if (std::isfinite(f_hi)) {
        // Minimizer of the quadratic through (lo, f_lo, dphi_lo), (hi, f_hi).
        const double span = hi - lo;
        const double denom = 2.0 * (f_hi - f_lo - dphi_lo * span);
        a = (std::abs(denom) > 1e-300)
                ? lo - dphi_lo * span * span / denom
                : lo + 0.5 * span;
        const double lo_guard = std::min(lo, hi) + 0.1 * std::abs(span);
        const double hi_guard = std::max(lo, hi) - 0.1 * std::abs(span);
        a = std::min(std::max(a, lo_guard), hi_guard);
      } else {
        a = lo + 0.5 * (hi - lo);
      }
      if (std::abs(hi - lo) <= 1e-16 * std::max(1.0, std::abs(lo))) return;

      const double fa = phi(a);
      ++evals;
      if (!std::isfinite(fa) || fa > f0 + options.c1 * a * dphi0 ||
          fa >= f_lo) {
        hi = a;
        f_hi = fa;
        continue;
      }
      const double dphia = gt.dot(dir);
      if (std::abs(dphia) <= -options.c2 * dphi0) {
        accept(a, fa, dphia);
        return;
      }
      if (dphia * (hi - lo) >= 0.0) {
        hi = lo;
        f_hi = f_lo;
      }
      lo = a;
      f_lo = fa;
      dphi_lo = dphia;
    }
  };

  double a_prev = 0.0, f_prev = f0, dphi_prev = dphi0;
  double a = step_init;
  while (evals < options.max_line_search) {
    const double fa = phi(a);
    ++evals;
    if (!std::isfinite(fa) || fa > f0 + options.c1 * a * dphi0 ||
        (a_prev > 0.0 && fa >= f_prev)) {
      zoom(a_prev, f_prev, dphi_prev, a, fa);
      return out;
    }
    const double dphia = gt.dot(dir);
    if (std::abs(dphia) <= -options.c2 * dphi0) {
      accept(a, fa, dphia);
      return out;
    }
    if (dphia >= 0.0) {
      zoom(a, fa, dphia, a_prev, f_prev);
      return out;
    }
    a_prev = a;
    f_prev = fa;
    dphi_prev = dphia;
    a *= 2.0;
    if (a > 1e20) break;
  }
  return out;
}

// Backtracking along the projected path x(a) = max(x + a dir, lb) with the
// sufficient-decrease test on the actual displacement.
LineSearchOutcome projected_search(const InnerProblem& problem, const Vector& x,
                                   double f0, const Vector& g0,
                                   const Vector& dir,
                                   const LbfgsOptions& options) {
  LineSearchOutcome out;
  Vector xt(x.size()), gt(x.size());
  double a = 1.0;
  for (int i = 0; i < options.max_line_search; ++i, a *= 0.5) {
    xt = clamp(problem, x + a * dir);
    const Vector delta = xt - x;
    const double dec = g0.dot(delta);
    if (delta.lpNorm<Eigen::Infinity>() == 0.0 || dec >= 0.0) continue;
    const double fa = problem.value_and_grad(xt, gt);
    if (!std::isfinite(fa) || fa > f0 + options.c1 * dec) continue;
    out.ok = true;
    out.step = a;
    out.f = fa;
    out.x = xt;
    out.g = gt;
    if (options.observer) {
      options.observer({f0, fa, dec, gt.dot(delta), a, true});
    }
    return out;
  }
  return out;
}

}  // namespace

InnerResult minimize_lbfgs(const InnerProblem& problem, const Vector& x0,
                           double tau, int max_iters,
                           const LbfgsOptions& options) {
  check_args(problem, x0, tau);
  const bool bounded = problem.lower_bounds.has_value();

  InnerResult result;
  Vector x = clamp(problem, x0);
  Vector g(problem.dimension);
  double f = problem.value_and_grad(x, g);

  result.solution = x;
  result.value = f;
  if (!std::isfinite(f)) {
    result.status = InnerStatus::NumericalFailure;
    result.grad_norm = kInf;
    return result;
  }
  result.grad_norm = projected_gradient(problem, x, g).norm();
  if (result.grad_norm <= tau) {
    result.status = InnerStatus::Converged;
    return result;
  }

  std::vector<Vector> s_hist, y_hist;
  std::vector<double> rho_hist;
  Vector q(problem.dimension);
  std::vector<double> alphas;

  for (int iter = 1; iter <= max_iters; ++iter) {
    // Two-loop recursion, H0 = (s.y / y.y) I.
    q = g;
    alphas.assign(s_hist.size(), 0.0);
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alphas[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alphas[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const Vector& y = y_hist.back();
      q *= s_hist.back().dot(y) / y.dot(y);
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alphas[i] - beta) * s_hist[i];
    }
    Vector dir = -q;

    if (g.dot(dir) >= 0.0) {
      // History produced an ascent direction; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = bounded ? -projected_gradient(problem, x, g) : -g;
    }

    const double step_init =
        s_hist.empty() ? 1.0 / std::max(1.0, dir.norm()) : 1.0;
    const LineSearchOutcome ls =
        bounded ? projected_search(problem, x, f, g, dir, options)
                : wolfe_search(problem, x, f, g, dir, step_init, options);
    if (!ls.ok) {
      result.status = InnerStatus::NumericalFailure;
      result.iterations = iter - 1;
      return result;  // best iterate: accepted values are monotone
    }

    const Vector s = ls.x - x;
    const Vector y = ls.g - g;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.memory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
    }

    x = ls.x;
    f = ls.f;
    g = ls.g;
    result.solution = x;
    result.value = f;
    result.iterations = iter;
    result.grad_norm = projected_gradient(problem, x, g).norm();
    if (result.grad_norm <= tau) {
      result.status = InnerStatus::Converged;
      return result;
    }
  }
  result.status = InnerStatus::MaxIters;
  return result;
}

namespace {

// Shared scaffold for the two fixed-step methods: tracks the best finite
// iterate and stops on non-finite values.
template <typename Update>
InnerResult fixed_step_loop(const InnerProblem& problem, const Vector& x0,
                            double tau, int max_iters, Update update) {
  check_args(problem, x0, tau);

  InnerResult result;
  Vector x = clamp(problem, x0);
  Vector g(problem.dimension);
  double f = problem.value_and_grad(x, g);

  result.solution = x;
  result.value = f;
  if (!std::isfinite(f)) {
    result.status = InnerStatus::NumericalFailure;
    result.grad_norm = kInf;
    return result;
  }
  double pg_norm = projected_gradient(problem, x, g).norm();
  result.grad_norm = pg_norm;
  if (pg_norm <= tau) {
    result.status = InnerStatus::Converged;
    return result;
  }

  Vector best_x = x;
  double best_f = f, best_pg = pg_norm;
  int best_iter = 0;

  for (int t = 1; t <= max_iters; ++t) {
    update(t, x, g);
    x = clamp(problem, x);
    f = problem.value_and_grad(x, g);
    if (!std::isfinite(f)) {
      result.solution = best_x;
      result.value = best_f;
      result.grad_norm = best_pg;
      result.iterations = t;
      result.status = InnerStatus::NumericalFailure;
      return result;
    }
    pg_norm = projected_gradient(problem, x, g).norm();
    if (f < best_f) {
      best_f = f;
      best_x = x;
      best_pg = pg_norm;
      best_iter = t;
    }
    if (pg_norm <= tau) {
      result.solution = x;
      result.value = f;
      result.grad_norm = pg_norm;
      result.iterations = t;
      result.status = InnerStatus::Converged;
      return result;
    }
  }
  result.solution = best_x;
  result.value = best_f;
  result.grad_norm = best_pg;
  result.iterations = max_iters;
  result.status = InnerStatus::MaxIters;
  (void)best_iter;
  return result;
}

}  // namespace

InnerResult minimize_adam(const InnerProblem& problem, const Vector& x0,
                          double tau, int max_iters, double step) {
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  Vector m = Vector::Zero(problem.dimension);
  Vector v = Vector::Zero(problem.dimension);
  return fixed_step_loop(
      problem, x0, tau, max_iters, [&](int t, Vector& x, const Vector& g) {
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
        const double bias1 = 1.0 - std::pow(beta1, t);
        const double bias2 = 1.0 - std::pow(beta2, t);
        x -= step * (m / bias1).cwiseQuotient(
                        ((v / bias2).cwiseSqrt().array() + eps).matrix());
      });
}

InnerResult minimize_momentum(const InnerProblem& problem, const Vector& x0,
                              double tau, int max_iters, double step,
                              double momentum) {
  Vector velocity = Vector::Zero(problem.dimension);
  return fixed_step_loop(problem, x0, tau, max_iters,
                         [&](int, Vector& x, const Vector& g) {
                           velocity = momentum * velocity - step * g;
                           x += velocity;
                         });
}

}  // namespace dagopt
