#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dagopt/objective.hpp"
#include "dagopt/types.hpp"

namespace dagopt {

// splitmix64 of `state` (also advances it); the standard 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t& state);

// Stream splitting: every consumer of randomness derives its own seed as
// derive_seed(master, stream_id) and never shares a generator. The sampling
// routines use streams kGraphStream / kWeightStream / kNoiseStream; the
// experiment harness derives one master per (size, trial) cell first.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id);

inline constexpr std::uint64_t kGraphStream = 1;
inline constexpr std::uint64_t kWeightStream = 2;
inline constexpr std::uint64_t kNoiseStream = 3;

// Deterministic draws on top of mt19937_64. The uniform and normal
// transforms are written out (bit shift to [0,1), Box-Muller) rather than
// taken from <random> distributions, whose outputs differ across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; consumes exactly two draws.
  double normal();

  // Uniform integer in [0, n), by rejection.
  std::uint64_t uniform_int(std::uint64_t n);

  bool coin() { return (next_u64() & 1u) != 0; }

 private:
  std::mt19937_64 engine_;
};

// A DAG with its witnessing topological order: edges only go from earlier
// to later positions in `order`.
struct BinaryDag {
  Eigen::Index dim = 0;
  Adjacency adjacency;
  std::vector<int> order;
};

// Erdos-Renyi DAG: draw a uniform order, then keep each of the d(d-1)/2
// order-respecting edges with probability p = 2 * avg_edges / (d (d-1)),
// which makes the expected edge count avg_edges.
BinaryDag sample_er_dag(int d, int avg_edges, std::uint64_t seed);

// Independent weights for every edge of g, uniform on [-hi, -lo] u [lo, hi]
// (fair sign). Non-edges are exactly zero. Requires 0 < lo < hi.
WeightMatrix sample_weights(const BinaryDag& g, double lo, double hi,
                            std::uint64_t seed);

// Linear-SEM sample: in topological order, X_i = sum_j W(j, i) X_j +
// noise_std * Z with Z standard normal, rows independent. W must be acyclic.
// The returned Dataset carries the nonzero pattern of W as ground truth.
Dataset sample_linear_sem(const WeightMatrix& w, int n, double noise_std,
                          std::uint64_t seed);

}  // namespace dagopt
