#include "oracles.hpp"

#include <deque>
#include <stdexcept>

#include "dagopt/graphs.hpp"
#include "dagopt/simulate.hpp"

namespace oracle {

using dagopt::Adjacency;
using dagopt::Matrix;
using dagopt::WeightMatrix;

Matrix series_matrix_exp(const Matrix& m, int terms) {
  using LongMatrix =
      Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const LongMatrix a = m.cast<long double>();
  LongMatrix term = LongMatrix::Identity(m.rows(), m.cols());
  LongMatrix sum = term;
  for (int k = 1; k <= terms; ++k) {
    term = term * a / static_cast<long double>(k);
    sum += term;
  }
  return sum.cast<double>();
}

Matrix finite_difference_grad(const std::function<double(const Matrix&)>& f,
                              const Matrix& b, double step) {
  Matrix grad(b.rows(), b.cols());
  Matrix probe = b;
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      probe(i, j) = b(i, j) + step;
      const double up = f(probe);
      probe(i, j) = b(i, j) - step;
      const double down = f(probe);
      probe(i, j) = b(i, j);
      grad(i, j) = (up - down) / (2.0 * step);
    }
  }
  return grad;
}

double rel_error(const Matrix& a, const Matrix& ref, double floor) {
  return (a - ref).norm() / std::max(ref.norm(), floor);
}

namespace {

void cycle_dfs(const std::vector<std::vector<int>>& out, int v, int s,
               std::vector<bool>& visited, long& count) {
  for (int w : out[v]) {
    if (w < s) continue;
    if (w == s) {
      ++count;
    } else if (!visited[w]) {
      visited[w] = true;
      cycle_dfs(out, w, s, visited, count);
      visited[w] = false;
    }
  }
}

}  // namespace

long brute_force_cycle_count(const Adjacency& adj) {
  const int n = static_cast<int>(adj.rows());
  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (adj(i, j) != 0) out[i].push_back(j);
    }
  }
  long count = 0;
  std::vector<bool> visited(n, false);
  for (int s = 0; s < n; ++s) {
    visited.assign(n, false);
    visited[s] = true;
    cycle_dfs(out, s, s, visited, count);
  }
  return count;
}

int brute_force_shd(const Adjacency& est, const Adjacency& truth) {
  // Pair states: 0 none, 1 i->j, 2 j->i, 3 both. Moves: add one direction,
  // delete one direction, reverse a single existing edge.
  static const std::vector<std::vector<int>> moves = {
      /*0*/ {1, 2},
      /*1*/ {0, 3, 2},
      /*2*/ {0, 3, 1},
      /*3*/ {1, 2},
  };
  const auto distance = [&](int from, int to) {
    std::vector<int> dist(4, -1);
    dist[from] = 0;
    std::deque<int> queue{from};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : moves[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    return dist[to];
  };

  const int n = static_cast<int>(est.rows());
  int total = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int a = est(i, j) | (est(j, i) << 1);
      const int b = truth(i, j) | (truth(j, i) << 1);
      total += distance(a, b);
    }
  }
  return total;
}

int interventional_sid(const Adjacency& est, const WeightMatrix& w,
                       double noise_var) {
  const Eigen::Index d = w.rows();
  const Matrix identity = Matrix::Identity(d, d);
  const Matrix total = (identity - w).inverse();  // total(i, j): effect i->j
  const Matrix inv = (identity - w.transpose()).inverse();
  const Matrix sigma = inv * (noise_var * identity) * inv.transpose();

  int wrong = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    std::vector<Eigen::Index> parents;
    for (Eigen::Index p = 0; p < d; ++p) {
      if (est(p, i) != 0) parents.push_back(p);
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j == i) continue;
      const double true_effect = total(i, j);

      double est_effect = 0.0;
      if (est(j, i) == 0) {
        // Population regression of X_j on X_i and the claimed parents.
        std::vector<Eigen::Index> s{i};
        s.insert(s.end(), parents.begin(), parents.end());
        const auto k = static_cast<Eigen::Index>(s.size());
        Matrix sub(k, k);
        dagopt::Vector rhs(k);
        for (Eigen::Index a = 0; a < k; ++a) {
          rhs[a] = sigma(s[a], j);
          for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = sigma(s[a], s[b]);
        }
        est_effect = sub.fullPivLu().solve(rhs)[0];
      }
      if (std::abs(est_effect - true_effect) >
          1e-7 * std::max(1.0, std::abs(true_effect))) {
        ++wrong;
      }
    }
  }
  return wrong;
}

std::vector<Adjacency> enumerate_dags(int d) {
  if (d < 1 || d > 4) {
    throw std::invalid_argument("enumerate_dags: supported for d in [1, 4]");
  }
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i != j) slots.emplace_back(i, j);
    }
  }
  std::vector<Adjacency> dags;
  const long limit = 1L << slots.size();
  for (long mask = 0; mask < limit; ++mask) {
    Adjacency adj = Adjacency::Zero(d, d);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      if (mask & (1L << s)) adj(slots[s].first, slots[s].second) = 1;
    }
    if (dagopt::is_dag(adj)) dags.push_back(adj);
  }
  return dags;
}

WeightMatrix random_dag_weights(int d, std::uint64_t seed) {
  const dagopt::BinaryDag g = dagopt::sample_er_dag(d, std::min<long>(d, d * (d - 1) / 2), seed);
  return dagopt::sample_weights(g, 0.5, 2.0, seed);
}

WeightMatrix random_cyclic_weights(int d, std::uint64_t seed) {
  WeightMatrix w = random_dag_weights(d, seed);
  // Close a 2-cycle over the first edge (or plant one in an empty graph).
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (w(i, j) != 0.0) {
        w(j, i) = 1.0;
        return w;
      }
    }
  }
  w(0, 1) = 1.0;
  w(1, 0) = -1.0;
  return w;
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, double lo,
                     double hi, std::uint64_t seed) {
  dagopt::Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

}  // namespace oracle
