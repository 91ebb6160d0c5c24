#include "dagopt/simulate.hpp"

#include <cmath>
#include <numbers>

#include "dagopt/errors.hpp"
#include "dagopt/graphs.hpp"

namespace dagopt {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) {
  std::uint64_t state = master;
  std::uint64_t mixed = splitmix64(state);
  state = mixed ^ (0x9E3779B97F4A7C15ull * (stream_id + 1));
  return splitmix64(state);
}

double Rng::normal() {
  // u1 in (0, 1] so the log is finite.
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  if (n == 0) throw InvalidInputError("Rng::uniform_int: n must be > 0");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= limit);
  return draw % n;
}

BinaryDag sample_er_dag(int d, int avg_edges, std::uint64_t seed) {
  if (d < 2) throw InvalidInputError("sample_er_dag: d must be >= 2");
  const long max_edges = static_cast<long>(d) * (d - 1) / 2;
  if (avg_edges < 0 || avg_edges > max_edges) {
    throw InvalidInputError(
        "sample_er_dag: avg_edges must be in [0, d(d-1)/2]");
  }

  Rng rng(derive_seed(seed, kGraphStream));

  // Fisher-Yates for the topological order.
  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  for (int i = d - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_int(i + 1));
    std::swap(order[i], order[j]);
  }

  const double p =
      static_cast<double>(2.0 * avg_edges) / (static_cast<double>(d) * (d - 1));
  BinaryDag g;
  g.dim = d;
  g.order = order;
  g.adjacency = Adjacency::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      if (rng.uniform01() < p) g.adjacency(order[a], order[b]) = 1;
    }
  }
  return g;
}

WeightMatrix sample_weights(const BinaryDag& g, double lo, double hi,
                            std::uint64_t seed) {
  if (!(0.0 < lo && lo < hi)) {
    throw InvalidInputError("sample_weights: need 0 < lo < hi");
  }
  Rng rng(derive_seed(seed, kWeightStream));
  WeightMatrix w = WeightMatrix::Zero(g.dim, g.dim);
  for (Eigen::Index i = 0; i < g.dim; ++i) {
    for (Eigen::Index j = 0; j < g.dim; ++j) {
      if (g.adjacency(i, j) != 0) {
        const double magnitude = rng.uniform(lo, hi);
        w(i, j) = rng.coin() ? magnitude : -magnitude;
      }
    }
  }
  return w;
}

Dataset sample_linear_sem(const WeightMatrix& w, int n, double noise_std,
                          std::uint64_t seed) {
  if (n < 1) throw InvalidInputError("sample_linear_sem: n must be >= 1");
  if (!(noise_std > 0.0)) {
    throw InvalidInputError("sample_linear_sem: noise_std must be > 0");
  }
  if (!is_square(w) || !w.allFinite()) {
    throw InvalidInputError("sample_linear_sem: weights must be square/finite");
  }
  const Adjacency pattern = threshold(w, 0.0);
  const auto order = topological_order(pattern);
  if (!order) {
    throw InvalidInputError("sample_linear_sem: weight matrix must be acyclic");
  }

  Rng rng(derive_seed(seed, kNoiseStream));
  const Eigen::Index d = w.rows();
  Matrix x = Matrix::Zero(n, d);
  for (int node : *order) {
    // Parents are earlier in the order, so their columns are filled.
    Vector noise(n);
    for (int row = 0; row < n; ++row) noise[row] = noise_std * rng.normal();
    x.col(node) = x * w.col(node) + noise;
  }
  return Dataset::from_matrix(std::move(x), pattern, w, seed, noise_std);
}

}  // namespace dagopt
