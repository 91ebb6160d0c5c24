#pragma once

#include <Eigen/Dense>

namespace dagopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Weighted adjacency matrix of a linear SEM: entry (i, j) is the
// coefficient of the edge i -> j. The diagonal is unconstrained; acyclicity
// is a derived property checked through the constraint functions.
using WeightMatrix = Eigen::MatrixXd;

// 0/1 adjacency matrix, same edge orientation as WeightMatrix.
using Adjacency = Eigen::MatrixXi;

template <class T>
using CRef = const Eigen::Ref<const T>&;

inline bool is_square(const Matrix& m) { return m.rows() == m.cols(); }

}  // namespace dagopt
