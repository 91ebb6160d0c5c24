#include "dagopt/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>

#include "dagopt/errors.hpp"

namespace dagopt {

namespace {

void require_square_binary(const Adjacency& adj, const char* who) {
  if (adj.rows() != adj.cols()) {
    throw InvalidInputError(std::string(who) + ": adjacency must be square");
  }
  for (Eigen::Index i = 0; i < adj.rows(); ++i) {
    for (Eigen::Index j = 0; j < adj.cols(); ++j) {
      if (adj(i, j) != 0 && adj(i, j) != 1) {
        throw InvalidInputError(std::string(who) + ": adjacency must be 0/1");
      }
    }
  }
}

std::vector<std::vector<int>> out_neighbors(const Adjacency& adj) {
  const int n = static_cast<int>(adj.rows());
  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (adj(i, j) != 0) out[i].push_back(j);
    }
  }
  return out;
}

// reach(i, j) = 1 iff there is a directed path i -> ... -> j (length >= 0,
// so the diagonal is 1).
Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> reachability(
    const Adjacency& adj) {
  const int n = static_cast<int>(adj.rows());
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> reach(n, n);
  reach.setConstant(false);
  const auto out = out_neighbors(adj);
  for (int s = 0; s < n; ++s) {
    std::deque<int> queue{s};
    reach(s, s) = true;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : out[u]) {
        if (!reach(s, v)) {
          reach(s, v) = true;
          queue.push_back(v);
        }
      }
    }
  }
  return reach;
}

// Lauritzen-style d-separation: i and j are d-separated by Z iff they are
// disconnected in the moralization of the subgraph induced by the ancestors
// of {i, j} union Z, after removing Z.
bool d_separated(int i, int j, const std::vector<int>& z, const Adjacency& g) {
  const int n = static_cast<int>(g.rows());

  // Ancestral closure of {i, j} union Z.
  std::vector<bool> in_set(n, false);
  std::deque<int> queue{i, j};
  in_set[i] = in_set[j] = true;
  for (int v : z) {
    if (!in_set[v]) {
      in_set[v] = true;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int p = 0; p < n; ++p) {
      if (g(p, v) != 0 && !in_set[p]) {
        in_set[p] = true;
        queue.push_back(p);
      }
    }
  }

  // Moral graph on the closure: undirect every edge, marry parents.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> moral(n, n);
  moral.setConstant(false);
  for (int a = 0; a < n; ++a) {
    if (!in_set[a]) continue;
    for (int b = 0; b < n; ++b) {
      if (!in_set[b] || g(a, b) == 0) continue;
      moral(a, b) = moral(b, a) = true;
      for (int c = 0; c < n; ++c) {  // co-parents of b
        if (c != a && in_set[c] && g(c, b) != 0) {
          moral(a, c) = moral(c, a) = true;
        }
      }
    }
  }

  // Path search from i to j avoiding Z.
  std::vector<bool> blocked(n, false);
  for (int v : z) blocked[v] = true;
  std::vector<bool> seen(n, false);
  std::deque<int> bfs{i};
  seen[i] = true;
  while (!bfs.empty()) {
    const int u = bfs.front();
    bfs.pop_front();
    if (u == j) return false;
    for (int v = 0; v < n; ++v) {
      if (moral(u, v) && !seen[v] && !blocked[v]) {
        seen[v] = true;
        bfs.push_back(v);
      }
    }
  }
  return true;
}

}  // namespace

Adjacency threshold(const WeightMatrix& b, double omega) {
  if (omega < 0.0) {
    throw InvalidInputError("threshold: omega must be >= 0");
  }
  Adjacency adj(b.rows(), b.cols());
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      adj(i, j) = std::abs(b(i, j)) > omega ? 1 : 0;
    }
  }
  return adj;
}

std::optional<std::vector<int>> topological_order(const Adjacency& adj) {
  require_square_binary(adj, "topological_order");
  const int n = static_cast<int>(adj.rows());
  std::vector<int> indegree(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (adj(i, j) != 0) ++indegree[j];
    }
  }
  std::deque<int> ready;
  for (int v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int u = ready.front();
    ready.pop_front();
    order.push_back(u);
    for (int v = 0; v < n; ++v) {
      if (adj(u, v) != 0 && --indegree[v] == 0) ready.push_back(v);
    }
  }
  if (static_cast<int>(order.size()) != n) return std::nullopt;
  return order;
}

bool is_dag(const Adjacency& adj) { return topological_order(adj).has_value(); }

CycleCount count_simple_cycles(const Adjacency& adj, long cap) {
  require_square_binary(adj, "count_simple_cycles");
  const int n = static_cast<int>(adj.rows());
  const auto out = out_neighbors(adj);

  CycleCount result;
  std::vector<bool> blocked(n, false);
  std::vector<std::vector<int>> block_list(n);
  std::vector<int> stack;

  // Johnson's circuit enumeration rooted at s, restricted to vertices >= s,
  // so each cycle is counted once at its smallest vertex.
  std::function<bool(int, int)> circuit = [&](int v, int s) -> bool {
    bool found = false;
    blocked[v] = true;
    stack.push_back(v);
    for (int w : out[v]) {
      if (w < s || result.capped) continue;
      if (w == s) {
        if (++result.count >= cap) {
          result.capped = true;
          result.count = cap;
        }
        found = true;
      } else if (!blocked[w]) {
        if (circuit(w, s)) found = true;
      }
    }
    if (found) {
      // Unblock v and everything transitively waiting on it.
      std::deque<int> queue{v};
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        if (!blocked[u]) continue;
        blocked[u] = false;
        for (int w : block_list[u]) queue.push_back(w);
        block_list[u].clear();
      }
    } else {
      for (int w : out[v]) {
        if (w < s) continue;
        auto& lst = block_list[w];
        if (std::find(lst.begin(), lst.end(), v) == lst.end()) {
          lst.push_back(v);
        }
      }
    }
    stack.pop_back();
    return found;
  };

  for (int s = 0; s < n && !result.capped; ++s) {
    std::fill(blocked.begin(), blocked.end(), false);
    for (auto& lst : block_list) lst.clear();
    circuit(s, s);
  }
  return result;
}

int shd(const Adjacency& est, const Adjacency& truth) {
  require_square_binary(est, "shd");
  require_square_binary(truth, "shd");
  if (est.rows() != truth.rows()) {
    throw InvalidInputError("shd: dimension mismatch");
  }
  const int n = static_cast<int>(est.rows());
  int edits = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // Pair state: bit 0 = i->j, bit 1 = j->i.
      const int a = est(i, j) | (est(j, i) << 1);
      const int b = truth(i, j) | (truth(j, i) << 1);
      if (a == b) continue;
      const bool reversal = (a == 1 && b == 2) || (a == 2 && b == 1);
      edits += reversal ? 1 : ((a ^ b) == 3 ? 2 : 1);
    }
  }
  return edits;
}

Tpr tpr(const Adjacency& est, const Adjacency& truth) {
  require_square_binary(est, "tpr");
  require_square_binary(truth, "tpr");
  if (est.rows() != truth.rows()) {
    throw InvalidInputError("tpr: dimension mismatch");
  }
  const int true_edges = truth.sum();
  if (true_edges == 0) {
    if (est.sum() == 0) return {1.0, true};
    return {0.0, false};
  }
  int hit = 0;
  for (Eigen::Index i = 0; i < est.rows(); ++i) {
    for (Eigen::Index j = 0; j < est.cols(); ++j) {
      if (truth(i, j) != 0 && est(i, j) != 0) ++hit;
    }
  }
  return {static_cast<double>(hit) / static_cast<double>(true_edges), true};
}

int sid(const Adjacency& est, const Adjacency& truth) {
  require_square_binary(est, "sid");
  require_square_binary(truth, "sid");
  if (est.rows() != truth.rows()) {
    throw InvalidInputError("sid: dimension mismatch");
  }
  if (!is_dag(truth)) throw InvalidInputError("sid: true graph must be a DAG");
  if (!is_dag(est)) throw InvalidInputError("sid: estimated graph must be a DAG");

  const int n = static_cast<int>(truth.rows());
  const auto reach = reachability(truth);

  int wrong = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> parents;
    for (int p = 0; p < n; ++p) {
      if (est(p, i) != 0) parents.push_back(p);
    }
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;

      if (est(j, i) != 0) {
        // The estimate claims j causes i, i.e. no effect of i on j; that is
        // right exactly when j is not a descendant of i in the truth.
        if (reach(i, j)) ++wrong;
        continue;
      }

      // Nodes (other than i) on a proper causal path from i to j.
      std::vector<bool> causal(n, false);
      for (int w = 0; w < n; ++w) {
        if (w != i && reach(i, w) && reach(w, j)) causal[w] = true;
      }

      // Adjustment fails if the parent set touches a descendant of a
      // causal node.
      bool forbidden = false;
      for (int z : parents) {
        for (int w = 0; w < n && !forbidden; ++w) {
          if (causal[w] && reach(w, z)) forbidden = true;
        }
        if (forbidden) break;
      }
      if (forbidden) {
        ++wrong;
        continue;
      }

      // Remove the first edge of every causal path; the remaining paths
      // from i to j are exactly the non-causal ones, and the parent set
      // must block them all.
      Adjacency pruned = truth;
      for (int w = 0; w < n; ++w) {
        if (causal[w] && pruned(i, w) != 0) pruned(i, w) = 0;
      }
      if (!d_separated(i, j, parents, pruned)) ++wrong;
    }
  }
  return wrong;
}

MetricsReport evaluate_graphs(const WeightMatrix& est_weights,
                              const Adjacency& truth, double omega) {
  const Adjacency est = threshold(est_weights, omega);
  MetricsReport report;
  report.threshold_used = omega;
  report.shd = shd(est, truth);
  const Tpr rate = tpr(est, truth);
  report.tpr = rate.value;
  report.tpr_defined = rate.defined;
  report.true_edge_count = truth.sum();
  report.est_edge_count = est.sum();
  if (is_dag(est)) {
    report.sid = sid(est, truth);
    report.sid_defined = true;
  } else {
    report.sid = 0;
    report.sid_defined = false;
  }
  return report;
}

}  // namespace dagopt
