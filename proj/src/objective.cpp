#include "dagopt/objective.hpp"

#include "dagopt/errors.hpp"
#include "dagopt/graphs.hpp"

namespace dagopt {

Dataset Dataset::from_matrix(Matrix x, std::optional<Adjacency> ground_truth,
                             std::optional<WeightMatrix> true_weights,
                             std::uint64_t seed, double noise_std) {
  if (x.rows() < 1 || x.cols() < 2) {
    throw InvalidInputError("Dataset: need n >= 1 samples and d >= 2 variables");
  }
  if (!x.allFinite()) {
    throw InvalidInputError("Dataset: design matrix has non-finite entries");
  }
  if (!(noise_std > 0.0)) {
    throw InvalidInputError("Dataset: noise_std must be > 0");
  }
  if (ground_truth) {
    if (ground_truth->rows() != x.cols() || ground_truth->cols() != x.cols()) {
      throw InvalidInputError("Dataset: ground truth dimension mismatch");
    }
    if (!is_dag(*ground_truth)) {
      throw InvalidInputError("Dataset: ground truth must be acyclic");
    }
  }
  Dataset data;
  data.x = std::move(x);
  data.ground_truth = std::move(ground_truth);
  data.true_weights = std::move(true_weights);
  data.seed = seed;
  data.noise_std = noise_std;
  data.gram_.noalias() = data.x.transpose() * data.x;
  data.x_sq_norm_ = data.gram_.trace();
  return data;
}

namespace {

void check_dims(const Dataset& data, const WeightMatrix& b, const char* who) {
  if (b.rows() != b.cols() || b.rows() != data.d()) {
    throw InvalidInputError(std::string(who) +
                            ": weight matrix must be d x d with d matching "
                            "the dataset");
  }
}

}  // namespace

double least_squares(const Dataset& data, const WeightMatrix& b) {
  check_dims(data, b, "least_squares");
  // ||X - XB||_F^2 = tr(X^T X) - 2 tr(X^T X B) + tr(B^T X^T X B)
  const Matrix gb = data.gram() * b;
  const double quad = data.x_sq_norm() - 2.0 * gb.trace() +
                      b.cwiseProduct(gb).sum();
  return quad / (2.0 * static_cast<double>(data.n()));
}

Matrix least_squares_grad(const Dataset& data, const WeightMatrix& b) {
  check_dims(data, b, "least_squares_grad");
  return (data.gram() * (b - Matrix::Identity(data.d(), data.d()))) /
         static_cast<double>(data.n());
}

ValueGrad penalized_value_grad(const Dataset& data, const WeightMatrix& b,
                               const ConstraintKind& kind, double rho,
                               double alpha) {
  if (rho < 0.0) {
    throw InvalidInputError("penalized_value_grad: rho must be >= 0");
  }
  ValueGrad result;
  result.value = least_squares(data, b);
  result.grad = least_squares_grad(data, b);
  if (rho == 0.0 && alpha == 0.0) return result;

  const double h = h_value(b, kind);
  result.value += alpha * h + 0.5 * rho * h * h;
  result.grad += (alpha + rho * h) * h_grad(b, kind);
  return result;
}

SplitValueGrad penalized_split_value_grad(const Dataset& data,
                                          const SplitMatrix& s,
                                          const ConstraintKind& kind,
                                          double rho, double alpha,
                                          double lambda) {
  if (lambda < 0.0) {
    throw InvalidInputError("penalized_split_value_grad: lambda must be >= 0");
  }
  const WeightMatrix b = merge(s);
  const ValueGrad smooth = penalized_value_grad(data, b, kind, rho, alpha);
  SplitValueGrad result;
  result.value = smooth.value + lambda * l1_surrogate(s);
  result.grad_pos = smooth.grad.array() + lambda;
  result.grad_neg = (-smooth.grad).array() + lambda;
  return result;
}

SplitMatrix split(const WeightMatrix& b) {
  SplitMatrix s;
  s.pos = b.cwiseMax(0.0);
  s.neg = (-b).cwiseMax(0.0);
  return s;
}

WeightMatrix merge(const SplitMatrix& s) {
  if (s.pos.rows() != s.neg.rows() || s.pos.cols() != s.neg.cols()) {
    throw InvalidInputError("merge: pos/neg dimension mismatch");
  }
  return s.pos - s.neg;
}

double l1_surrogate(const SplitMatrix& s) {
  return s.pos.sum() + s.neg.sum();
}

}  // namespace dagopt
