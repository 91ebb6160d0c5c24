#pragma once

#include <optional>
#include <vector>

#include "dagopt/types.hpp"

namespace dagopt {

// Count of simple directed cycles; `capped` is set when enumeration stopped
// at the cap and `count` saturates there.
struct CycleCount {
  long count = 0;
  bool capped = false;
};

// True-positive rate over directed edges. `defined` is false only in the
// degenerate case of an empty true graph with a nonempty estimate; an empty
// estimate against an empty truth scores 1.
struct Tpr {
  double value = 0.0;
  bool defined = true;
};

struct MetricsReport {
  int shd = 0;
  int sid = 0;
  double tpr = 0.0;
  bool tpr_defined = true;
  bool sid_defined = true;  // false when the estimate is cyclic
  int true_edge_count = 0;
  int est_edge_count = 0;
  double threshold_used = 0.0;
};

// Binary adjacency with entry (i, j) = 1 iff |B(i, j)| > omega. The
// inequality is strict: an entry equal to omega is dropped.
Adjacency threshold(const WeightMatrix& b, double omega);

// Topological order of a binary adjacency, or nullopt if it has a cycle.
std::optional<std::vector<int>> topological_order(const Adjacency& adj);

bool is_dag(const Adjacency& adj);

// Simple directed cycles by Johnson-style enumeration with blocked sets.
// Fine for the graph sizes of the experiments (d <= 20 at moderate
// density); the cap guards the dense blowup.
CycleCount count_simple_cycles(const Adjacency& adj, long cap = 100000);

// Structural Hamming distance: edge additions + deletions + reversals
// needed to turn `est` into `truth`. A reversal counts as one edit.
// (Conventions differ in the literature; this is the reversal-is-one-edit
// variant.)
int shd(const Adjacency& est, const Adjacency& truth);

Tpr tpr(const Adjacency& est, const Adjacency& truth);

// Structural intervention distance: number of ordered pairs (i, j) whose
// interventional quantity, inferred from `est` by parent adjustment, is
// wrong with respect to `truth`. Validity of the adjustment set pa_est(i)
// is decided graphically: the forbidden-descendant condition plus
// d-separation of i and j given pa_est(i) in the graph with the causal
// first edges removed, with d-separation resolved by path blocking on the
// moralized ancestral subgraph. Both inputs must be DAGs.
int sid(const Adjacency& est, const Adjacency& truth);

// Thresholds `est_weights` at omega and scores it against `truth`.
// SID is skipped (sid_defined = false) when thresholding leaves a cycle.
MetricsReport evaluate_graphs(const WeightMatrix& est_weights,
                              const Adjacency& truth, double omega);

}  // namespace dagopt
