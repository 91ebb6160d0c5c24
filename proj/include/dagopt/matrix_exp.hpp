#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "dagopt/errors.hpp"

namespace dagopt {

namespace detail {

// Degree-13 Pade numerator coefficients for exp (Higham 2005).
inline constexpr double kPade13[] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

// ||A||_1 / 2^s must fall below this for the degree-13 approximant to be
// backward stable.
inline constexpr double kPade13Theta = 5.371920351148152;

}  // namespace detail

// exp(M) by scaling-and-squaring with the degree-13 Pade approximant.
//
// Throws InvalidInputError on non-finite input and NumericOverflowError when
// the result cannot be represented in double precision (exp(M) entries are
// bounded by exp(||M||_1), which overflows past ~709).
template <typename Derived>
typename Derived::PlainObject matrix_exp(const Eigen::MatrixBase<Derived>& m) {
  using MatrixType = typename Derived::PlainObject;

  const MatrixType a = m.derived();
  if (a.rows() != a.cols()) {
    throw InvalidInputError("matrix_exp: matrix must be square");
  }
  if (!a.allFinite()) {
    throw InvalidInputError("matrix_exp: input has non-finite entries");
  }

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 > 708.0) {
    throw NumericOverflowError(
        "matrix_exp: 1-norm " + std::to_string(norm1) +
        " exceeds the double-precision range of exp");
  }

  int squarings = 0;
  if (norm1 > detail::kPade13Theta) {
    squarings = static_cast<int>(
        std::ceil(std::log2(norm1 / detail::kPade13Theta)));
  }
  const MatrixType as = a / std::exp2(squarings);

  const auto& b = detail::kPade13;
  const Eigen::Index n = a.rows();
  const MatrixType ident = MatrixType::Identity(n, n);
  const MatrixType a2 = as * as;
  const MatrixType a4 = a2 * a2;
  const MatrixType a6 = a4 * a2;

  MatrixType u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                       b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  MatrixType v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                 b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;

  // exp(as) ~ (V - U)^{-1} (V + U)
  MatrixType result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) {
    result = result * result;
  }

  if (!result.allFinite()) {
    throw NumericOverflowError(
        "matrix_exp: overflow while squaring (input 1-norm " +
        std::to_string(norm1) + ")");
  }
  return result;
}

}  // namespace dagopt
