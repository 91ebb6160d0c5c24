#pragma once

#include <cstdint>
#include <optional>

#include "dagopt/constraints.hpp"
#include "dagopt/types.hpp"

namespace dagopt {

// An n x d design matrix with its provenance. Immutable after construction;
// safe to share across threads. The Gram matrix X^T X is precomputed so the
// score and its gradient cost O(d^3) per evaluation instead of O(n d^2).
struct Dataset {
  Matrix x;  // n x d
  std::optional<Adjacency> ground_truth;
  std::optional<WeightMatrix> true_weights;
  std::uint64_t seed = 0;
  double noise_std = 1.0;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index d() const { return x.cols(); }
  const Matrix& gram() const { return gram_; }
  double x_sq_norm() const { return x_sq_norm_; }

  static Dataset from_matrix(Matrix x,
                             std::optional<Adjacency> ground_truth = {},
                             std::optional<WeightMatrix> true_weights = {},
                             std::uint64_t seed = 0, double noise_std = 1.0);

 private:
  Matrix gram_;          // X^T X
  double x_sq_norm_ = 0; // tr(X^T X) = ||X||_F^2
};

// Nonnegative split of a weight matrix: B = pos - neg with pos, neg >= 0.
// The l1 surrogate sum(pos + neg) upper-bounds ||B||_1, with equality iff
// pos and neg have disjoint supports. Keeps the l1 term smooth for the
// box-constrained inner solvers.
struct SplitMatrix {
  Matrix pos;
  Matrix neg;
};

struct ValueGrad {
  double value = 0.0;
  Matrix grad;
};

struct SplitValueGrad {
  double value = 0.0;
  Matrix grad_pos;
  Matrix grad_neg;
};

// Least squares score f(B) = (1 / 2n) ||X - XB||_F^2.
double least_squares(const Dataset& data, const WeightMatrix& b);

// Analytic gradient (1/n) X^T X (B - I) of the score.
Matrix least_squares_grad(const Dataset& data, const WeightMatrix& b);

// Composite value f(B) + alpha h(B) + (rho / 2) h(B)^2 and its gradient
// with respect to B. With rho = alpha = 0 this is exactly least_squares and
// its gradient; the penalty terms are skipped, not added as zeros.
ValueGrad penalized_value_grad(const Dataset& data, const WeightMatrix& b,
                               const ConstraintKind& kind, double rho,
                               double alpha);

// Same composite on the split parameterization, plus lambda * sum(pos + neg),
// with gradients with respect to pos and neg. This is the smooth objective
// the l1-penalized inner subproblems minimize under pos, neg >= 0.
SplitValueGrad penalized_split_value_grad(const Dataset& data,
                                          const SplitMatrix& s,
                                          const ConstraintKind& kind,
                                          double rho, double alpha,
                                          double lambda);

// Canonical split: positives into pos, magnitudes of negatives into neg.
SplitMatrix split(const WeightMatrix& b);

WeightMatrix merge(const SplitMatrix& s);

double l1_surrogate(const SplitMatrix& s);

}  // namespace dagopt
