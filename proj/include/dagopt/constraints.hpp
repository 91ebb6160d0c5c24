#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "dagopt/errors.hpp"
#include "dagopt/matrix_exp.hpp"
#include "dagopt/types.hpp"

namespace dagopt {

// Which differentiable acyclicity characterization to use.
//
//   Exp:    h(B) = Tr(exp(B o B)) - d
//   Bin(c): h(B) = Tr((I + c * B o B)^d) - d,  c > 0
//
// Both vanish exactly on matrices whose nonzero pattern is acyclic, and both
// have vanishing gradient exactly where they vanish.
struct ConstraintKind {
  enum class Tag { Exp, Bin };

  Tag tag = Tag::Exp;
  double c = 1.0;  // scaling of the Bin form, ignored for Exp

  static ConstraintKind exponential() { return {Tag::Exp, 1.0}; }

  static ConstraintKind binomial(double c) {
    if (!(c > 0.0)) {
      throw InvalidInputError("ConstraintKind: Bin scaling c must be > 0");
    }
    return {Tag::Bin, c};
  }

  // Default scaling c = 1/d keeps the entries of (I + c B o B)^d bounded
  // for moderate weights.
  static ConstraintKind binomial_default(Eigen::Index d) {
    return binomial(1.0 / static_cast<double>(d));
  }
};

// Outcome of probing a point against the h = 0 <=> grad h = 0 property.
// The booleans are exactly the threshold comparisons on the stored values.
struct RegularityReport {
  double h_value = 0.0;
  double grad_frobenius_norm = 0.0;
  bool is_feasible_at_tol = false;
  bool gradient_vanishes_at_tol = false;
  double tol_h = 0.0;
  double tol_grad = 0.0;
};

namespace detail {

inline void check_kind(const ConstraintKind& kind, const char* who) {
  if (kind.tag == ConstraintKind::Tag::Bin && !(kind.c > 0.0)) {
    throw InvalidInputError(std::string(who) +
                            ": Bin constraint requires c > 0");
  }
}

// A^p by binary exponentiation, p >= 0.
template <typename MatrixType>
MatrixType matrix_power(MatrixType base, long p) {
  MatrixType result = MatrixType::Identity(base.rows(), base.cols());
  while (p > 0) {
    if (p & 1) result = result * base;
    p >>= 1;
    if (p > 0) base = base * base;
  }
  return result;
}

// Elementwise square with the overflow guard: entries of B o B above 20
// would push Tr(exp(B o B)) toward the double-precision limit once several
// such entries combine, so surface the problem instead of propagating inf.
template <typename Derived>
typename Derived::PlainObject squared_entries_checked(
    const Eigen::MatrixBase<Derived>& b) {
  if (!b.derived().allFinite()) {
    throw InvalidInputError("constraint: weight matrix has non-finite entries");
  }
  typename Derived::PlainObject m = b.derived().cwiseProduct(b.derived());
  const double max_entry = m.maxCoeff();
  if (max_entry > 20.0) {
    throw NumericOverflowError(
        "constraint: max entry of B o B is " + std::to_string(max_entry) +
        " (> 20), evaluation would overflow");
  }
  return m;
}

}  // namespace detail

// Scalar acyclicity measure h(B). Nonnegative for every finite B (each
// power-series / binomial term contributes a nonnegative amount to the
// trace); zero exactly when the nonzero pattern of B is acyclic.
template <typename Derived>
double h_value(const Eigen::MatrixBase<Derived>& b, const ConstraintKind& kind) {
  if (b.rows() != b.cols()) {
    throw InvalidInputError("h_value: weight matrix must be square");
  }
  detail::check_kind(kind, "h_value");
  const auto d = b.rows();
  const typename Derived::PlainObject m = detail::squared_entries_checked(b);

  double trace = 0.0;
  if (kind.tag == ConstraintKind::Tag::Exp) {
    trace = matrix_exp(m).trace();
  } else {
    using MatrixType = typename Derived::PlainObject;
    const MatrixType base = MatrixType::Identity(d, d) + kind.c * m;
    const MatrixType power = detail::matrix_power(base, static_cast<long>(d));
    if (!power.allFinite()) {
      throw NumericOverflowError("h_value: (I + c B o B)^d overflowed");
    }
    trace = power.trace();
  }
  return trace - static_cast<double>(d);
}

// Analytic gradient of h_value with respect to B:
//
//   Exp:    grad = exp(B o B)^T o (2 B)
//   Bin(c): grad = ((I + c B o B)^(d-1))^T o (2 d c B)
template <typename Derived>
typename Derived::PlainObject h_grad(const Eigen::MatrixBase<Derived>& b,
                                     const ConstraintKind& kind) {
  if (b.rows() != b.cols()) {
    throw InvalidInputError("h_grad: weight matrix must be square");
  }
  detail::check_kind(kind, "h_grad");
  const auto d = b.rows();
  using MatrixType = typename Derived::PlainObject;
  const MatrixType m = detail::squared_entries_checked(b);

  if (kind.tag == ConstraintKind::Tag::Exp) {
    return matrix_exp(m).transpose().cwiseProduct(2.0 * b.derived());
  }
  const MatrixType base = MatrixType::Identity(d, d) + kind.c * m;
  const MatrixType power =
      detail::matrix_power(base, static_cast<long>(d) - 1);
  if (!power.allFinite()) {
    throw NumericOverflowError("h_grad: (I + c B o B)^(d-1) overflowed");
  }
  const double scale = 2.0 * static_cast<double>(d) * kind.c;
  return power.transpose().cwiseProduct(scale * b.derived());
}

// Evaluates h and ||grad h||_F at B and compares both against tolerances.
//
// Every feasible point of the acyclicity constraint has a vanishing
// gradient, so the constraint Jacobian (a 1 x d^2 row) is rank deficient
// there: no feasible point satisfies the LICQ. This probe makes that
// observation checkable on concrete matrices.
inline RegularityReport regularity_probe(const WeightMatrix& b,
                                         const ConstraintKind& kind,
                                         double tol_h, double tol_grad) {
  if (!(tol_h > 0.0) || !(tol_grad > 0.0)) {
    throw InvalidInputError("regularity_probe: tolerances must be > 0");
  }
  RegularityReport report;
  report.tol_h = tol_h;
  report.tol_grad = tol_grad;
  report.h_value = h_value(b, kind);
  report.grad_frobenius_norm = h_grad(b, kind).norm();
  report.is_feasible_at_tol = report.h_value <= tol_h;
  report.gradient_vanishes_at_tol = report.grad_frobenius_norm <= tol_grad;
  return report;
}

}  // namespace dagopt
