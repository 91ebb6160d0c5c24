#include <doctest.h>

#include "dagopt/errors.hpp"
#include "dagopt/objective.hpp"
#include "oracles.hpp"

using dagopt::ConstraintKind;
using dagopt::Dataset;
using dagopt::Matrix;
using dagopt::SplitMatrix;
using dagopt::WeightMatrix;

namespace {

Dataset toy_dataset() {
  Matrix x(2, 2);
  x << 1, 2, 3, 4;
  return Dataset::from_matrix(x);
}

}  // namespace

TEST_CASE("least squares on the worked example") {
  const Dataset data = toy_dataset();
  const WeightMatrix zero = WeightMatrix::Zero(2, 2);
  CHECK(dagopt::least_squares(data, zero) == doctest::Approx(7.5).epsilon(1e-15));

  // Gradient at B = 0 is -(1/n) X^T X; checked against finite differences
  // rather than a hand constant.
  const Matrix analytic = dagopt::least_squares_grad(data, zero);
  CHECK(analytic(0, 0) == doctest::Approx(-5.0).epsilon(1e-14));
  CHECK(analytic(0, 1) == doctest::Approx(-7.0).epsilon(1e-14));
  CHECK(analytic(1, 0) == doctest::Approx(-7.0).epsilon(1e-14));
  CHECK(analytic(1, 1) == doctest::Approx(-10.0).epsilon(1e-14));
  const Matrix fd = oracle::finite_difference_grad(
      [&](const Matrix& b) { return dagopt::least_squares(data, b); }, zero);
  CHECK(oracle::rel_error(analytic, fd) <= 1e-8);
}

TEST_CASE("perfect reconstruction and zero data score zero") {
  const Dataset data = toy_dataset();
  CHECK(dagopt::least_squares(data, Matrix::Identity(2, 2)) == 0.0);
  CHECK(dagopt::least_squares_grad(data, Matrix::Identity(2, 2)).norm() == 0.0);

  const Dataset zeros = Dataset::from_matrix(Matrix::Zero(3, 2));
  CHECK(dagopt::least_squares(zeros, oracle::random_matrix(2, 2, -1, 1, 5)) ==
        0.0);
}

TEST_CASE("score is an exact quadratic along any line") {
  const Dataset data =
      Dataset::from_matrix(oracle::random_matrix(20, 4, -2, 2, 42));
  const Matrix b0 = oracle::random_matrix(4, 4, -1, 1, 43);
  const Matrix dir = oracle::random_matrix(4, 4, -1, 1, 44);
  const auto f = [&](double t) {
    return dagopt::least_squares(data, b0 + t * dir);
  };
  // Third difference of a quadratic vanishes.
  const double third = f(3) - 3 * f(2) + 3 * f(1) - f(0);
  CHECK(std::abs(third) <= 1e-9 * std::max(1.0, std::abs(f(0))));
}

TEST_CASE("gradients match finite differences on random data") {
  const Dataset data =
      Dataset::from_matrix(oracle::random_matrix(30, 5, -1.5, 1.5, 46));
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix b = oracle::random_matrix(5, 5, -1.5, 1.5, 50 + trial);
    const Matrix fd = oracle::finite_difference_grad(
        [&](const Matrix& m) { return dagopt::least_squares(data, m); }, b);
    CHECK(oracle::rel_error(dagopt::least_squares_grad(data, b), fd) <= 1e-6);
  }
}

TEST_CASE("penalized value reduces exactly to least squares at rho=alpha=0") {
  const Dataset data =
      Dataset::from_matrix(oracle::random_matrix(10, 3, -1, 1, 60));
  const Matrix b = oracle::random_matrix(3, 3, -1, 1, 61);
  const auto vg =
      dagopt::penalized_value_grad(data, b, ConstraintKind::exponential(), 0, 0);
  CHECK(vg.value == dagopt::least_squares(data, b));
  CHECK((vg.grad - dagopt::least_squares_grad(data, b)).norm() == 0.0);
}

TEST_CASE("penalty contributes h + (rho/2) h^2 on zero data") {
  // X = 0 suppresses f, so only the constraint terms remain.
  const Dataset data = Dataset::from_matrix(Matrix::Zero(4, 2));
  WeightMatrix w = WeightMatrix::Zero(2, 2);
  w(0, 1) = 1.0;
  w(1, 0) = 1.0;
  const double h = dagopt::h_value(w, ConstraintKind::exponential());
  const auto vg = dagopt::penalized_value_grad(
      data, w, ConstraintKind::exponential(), 2.0, 1.0);
  CHECK(vg.value == doctest::Approx(h + h * h).epsilon(1e-12));
  // h = 2 cosh(1) - 2, so h + h^2 = 2.26590757...
  CHECK(vg.value == doctest::Approx(2.2659075733688407).epsilon(1e-10));
}

TEST_CASE("penalty vanishes on a DAG") {
  const Dataset data =
      Dataset::from_matrix(oracle::random_matrix(10, 3, -1, 1, 62));
  WeightMatrix w = WeightMatrix::Zero(3, 3);
  w(0, 1) = 0.8;
  w(1, 2) = -1.1;
  const auto plain = dagopt::penalized_value_grad(
      data, w, ConstraintKind::exponential(), 0, 0);
  const auto penalized = dagopt::penalized_value_grad(
      data, w, ConstraintKind::exponential(), 10.0, 3.0);
  CHECK(penalized.value == doctest::Approx(plain.value).epsilon(1e-12));
  CHECK((penalized.grad - plain.grad).norm() <= 1e-12);
}

TEST_CASE("composite gradient matches finite differences") {
  const Dataset data =
      Dataset::from_matrix(oracle::random_matrix(25, 4, -1.5, 1.5, 63));
  for (const auto& kind :
       {ConstraintKind::exponential(), ConstraintKind::binomial_default(4)}) {
    const Matrix b = oracle::random_matrix(4, 4, -1.5, 1.5, 64);
    const auto vg = dagopt::penalized_value_grad(data, b, kind, 3.0, 0.7);
    const Matrix fd = oracle::finite_difference_grad(
        [&](const Matrix& m) {
          return dagopt::penalized_value_grad(data, m, kind, 3.0, 0.7).value;
        },
        b);
    CHECK(oracle::rel_error(vg.grad, fd) <= 1e-6);
  }
}

TEST_CASE("split and merge") {
  Matrix b(2, 2);
  b << 0, 2, -1, 0;
  const SplitMatrix s = dagopt::split(b);
  CHECK(s.pos(0, 1) == 2.0);
  CHECK(s.pos(1, 0) == 0.0);
  CHECK(s.neg(1, 0) == 1.0);
  CHECK(s.neg(0, 1) == 0.0);
  CHECK((dagopt::merge(s) - b).norm() == 0.0);

  const SplitMatrix zero = dagopt::split(Matrix::Zero(3, 3));
  CHECK(zero.pos.norm() == 0.0);
  CHECK(zero.neg.norm() == 0.0);

  for (int trial = 0; trial < 100; ++trial) {
    const Matrix m = oracle::random_matrix(3, 3, -2, 2, 700 + trial);
    CHECK((dagopt::merge(dagopt::split(m)) - m).norm() == 0.0);
  }
}

TEST_CASE("l1 surrogate upper-bounds the merged l1 norm") {
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = oracle::random_matrix(3, 3, -2, 2, 800 + trial);
    SplitMatrix s = dagopt::split(m);
    CHECK(dagopt::l1_surrogate(s) ==
          doctest::Approx(m.cwiseAbs().sum()).epsilon(1e-14));
    // Inflate both sides; the surrogate grows, the merge does not change.
    s.pos.array() += 0.5;
    s.neg.array() += 0.5;
    CHECK(dagopt::l1_surrogate(s) >
          dagopt::merge(s).cwiseAbs().sum() + 1e-12);
  }
}

TEST_CASE("split objective gradient matches finite differences") {
  const Dataset data =
      Dataset::from_matrix(oracle::random_matrix(15, 3, -1, 1, 90));
  const Matrix base = oracle::random_matrix(3, 3, -1, 1, 91);
  SplitMatrix s = dagopt::split(base);
  s.pos.array() += 0.3;  // interior point so finite differences are two-sided
  s.neg.array() += 0.2;
  const auto kind = ConstraintKind::exponential();
  const auto vg =
      dagopt::penalized_split_value_grad(data, s, kind, 2.0, 0.5, 0.1);

  const Matrix fd_pos = oracle::finite_difference_grad(
      [&](const Matrix& p) {
        return dagopt::penalized_split_value_grad(data, {p, s.neg}, kind, 2.0,
                                                  0.5, 0.1)
            .value;
      },
      s.pos);
  const Matrix fd_neg = oracle::finite_difference_grad(
      [&](const Matrix& q) {
        return dagopt::penalized_split_value_grad(data, {s.pos, q}, kind, 2.0,
                                                  0.5, 0.1)
            .value;
      },
      s.neg);
  CHECK(oracle::rel_error(vg.grad_pos, fd_pos) <= 1e-6);
  CHECK(oracle::rel_error(vg.grad_neg, fd_neg) <= 1e-6);
}

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(Dataset::from_matrix(Matrix::Zero(3, 1)),
                  dagopt::InvalidInputError);
  Matrix bad(1, 2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Dataset::from_matrix(bad), dagopt::InvalidInputError);

  dagopt::Adjacency cyclic(2, 2);
  cyclic << 0, 1, 1, 0;
  CHECK_THROWS_AS(Dataset::from_matrix(Matrix::Zero(2, 2), cyclic),
                  dagopt::InvalidInputError);

  const Dataset data = toy_dataset();
  CHECK_THROWS_AS((void)dagopt::least_squares(data, Matrix::Zero(3, 3)),
                  dagopt::InvalidInputError);
}
