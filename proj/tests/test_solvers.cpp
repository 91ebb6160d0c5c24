#include <doctest.h>

#include <cmath>

#include "dagopt/errors.hpp"
#include "dagopt/graphs.hpp"
#include "dagopt/simulate.hpp"
#include "dagopt/solvers.hpp"
#include "oracles.hpp"

using dagopt::ConstraintKind;
using dagopt::Dataset;
using dagopt::Matrix;
using dagopt::SolveResult;
using dagopt::SolverConfig;
using dagopt::SolverKind;
using dagopt::Termination;
using dagopt::WeightMatrix;

namespace {

// d = 2 dataset with a single true edge 1 -> 2 of weight 1.5.
Dataset edge_dataset(std::uint64_t seed = 7, int n = 1000) {
  WeightMatrix w = WeightMatrix::Zero(2, 2);
  w(0, 1) = 1.5;
  return dagopt::sample_linear_sem(w, n, 1.0, seed);
}

SolverConfig qpm_config() {
  SolverConfig cfg;
  cfg.kind = SolverKind::Qpm;
  return cfg;
}

SolverConfig alm_config() {
  SolverConfig cfg;
  cfg.kind = SolverKind::Alm;
  return cfg;
}

}  // namespace

TEST_CASE("final convergence test") {
  WeightMatrix tri = WeightMatrix::Zero(3, 3);
  tri(0, 1) = 4.0;  // magnitude is irrelevant for feasibility
  CHECK(dagopt::final_convergence_test(tri, ConstraintKind::exponential(), 1e-12));
  CHECK(dagopt::final_convergence_test(WeightMatrix::Zero(2, 2),
                                       ConstraintKind::exponential(), 1e-10));

  WeightMatrix cyc = WeightMatrix::Zero(2, 2);
  cyc(0, 1) = cyc(1, 0) = 1.0;
  CHECK_FALSE(
      dagopt::final_convergence_test(cyc, ConstraintKind::exponential(), 1e-8));
  CHECK_THROWS_AS(
      dagopt::final_convergence_test(cyc, ConstraintKind::exponential(), 0.0),
      dagopt::InvalidInputError);
}

TEST_CASE("qpm recovers the single edge") {
  const Dataset data = edge_dataset();
  const SolveResult result = dagopt::solve_qpm(data, qpm_config());

  CHECK(result.termination == Termination::FeasibleTol);
  CHECK(result.final_h() <= 1e-8);
  CHECK(result.thresholded(0, 1) == 1);
  CHECK(result.thresholded(1, 0) == 0);
  CHECK(result.thresholded.sum() == 1);
  CHECK(result.weights(0, 1) == doctest::Approx(1.5).epsilon(0.1));
}

TEST_CASE("alm on the same data agrees with qpm after thresholding") {
  const Dataset data = edge_dataset();
  const SolveResult qpm = dagopt::solve_qpm(data, qpm_config());
  const SolveResult alm = dagopt::solve_alm(data, alm_config());
  CHECK(alm.termination == Termination::FeasibleTol);
  CHECK((alm.thresholded - qpm.thresholded).cwiseAbs().sum() == 0);
}

TEST_CASE("empty true graph with l1 yields an empty estimate on most seeds") {
  int empty_count = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const Dataset data = dagopt::sample_linear_sem(
        WeightMatrix::Zero(3, 3), 1000, 1.0, 500 + trial);
    SolverConfig cfg = qpm_config();
    cfg.lambda = 0.1;
    const SolveResult result = dagopt::solve_qpm(data, cfg);
    if (dagopt::threshold(result.weights, 0.3).sum() == 0) ++empty_count;
  }
  CHECK(empty_count >= 10);
}

TEST_CASE("zero outer budget returns B0 with an empty trace") {
  const Dataset data = edge_dataset();
  SolverConfig cfg = qpm_config();
  cfg.max_outer = 0;
  const SolveResult result = dagopt::solve_qpm(data, cfg);
  CHECK(result.termination == Termination::MaxOuter);
  CHECK(result.trace.empty());
  CHECK(result.weights.norm() == 0.0);
  CHECK(result.thresholded.sum() == 0);
}

TEST_CASE("qpm trace: rho grows geometrically and records are ordered") {
  const Dataset data = edge_dataset();
  const SolveResult result = dagopt::solve_qpm(data, qpm_config());
  REQUIRE(result.trace.size() >= 2);
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    CHECK(result.trace[i].k == static_cast<int>(i));
    CHECK(result.trace[i].alpha == 0.0);
    if (i > 0) {
      CHECK(result.trace[i].rho ==
            doctest::Approx(10.0 * result.trace[i - 1].rho).epsilon(1e-15));
    }
  }
}

TEST_CASE("alm trace: dual updates are exact and rho never decreases") {
  const Dataset data = edge_dataset();
  const SolveResult result = dagopt::solve_alm(data, alm_config());
  REQUIRE(result.trace.size() >= 2);
  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    const auto& prev = result.trace[i - 1];
    const auto& cur = result.trace[i];
    CHECK(std::abs(cur.alpha - (prev.alpha + prev.rho * prev.h)) <= 1e-12);
    CHECK(cur.rho >= prev.rho);
  }
}

TEST_CASE("alm with gamma near 1 escalates rho every iteration") {
  const Dataset data = edge_dataset();
  SolverConfig cfg = alm_config();
  cfg.gamma = 0.999999;
  const SolveResult alm = dagopt::solve_alm(data, cfg);
  const SolveResult qpm = dagopt::solve_qpm(data, qpm_config());
  const std::size_t shared = std::min(alm.trace.size(), qpm.trace.size());
  REQUIRE(shared >= 2);
  for (std::size_t i = 0; i < shared; ++i) {
    CHECK(alm.trace[i].rho == qpm.trace[i].rho);
  }
}

TEST_CASE("alm keeps alpha at zero when B0 already fits a DAG exactly") {
  // All-zero data: B = 0 is stationary for f and h(0) = 0.
  const Dataset data = Dataset::from_matrix(Matrix::Zero(5, 3));
  const SolveResult result = dagopt::solve_alm(data, alm_config());
  CHECK(result.termination == Termination::FeasibleTol);
  REQUIRE(result.trace.size() == 1);
  CHECK(result.trace[0].alpha == 0.0);
  CHECK(result.trace[0].h == 0.0);
  CHECK(result.weights.norm() == 0.0);
}

TEST_CASE("warm starts pass the previous iterate exactly") {
  const Dataset data = edge_dataset();
  std::vector<WeightMatrix> starts;
  dagopt::SolveHooks hooks;
  hooks.on_inner_start = [&](int, const WeightMatrix& b) {
    starts.push_back(b);
  };

  SolverConfig cfg = qpm_config();
  cfg.max_outer = 4;
  cfg.eps_h = 1e-300;  // keep iterating
  const SolveResult result = dagopt::solve_qpm(data, cfg, hooks);
  REQUIRE(starts.size() == result.trace.size());
  CHECK(starts[0].norm() == 0.0);
  // Start of subproblem k equals the adopted solution of subproblem k-1;
  // reconstruct it by rerunning with a budget one shorter.
  SolverConfig shorter = cfg;
  shorter.max_outer = 3;
  const SolveResult prefix = dagopt::solve_qpm(data, shorter);
  CHECK((starts[3] - prefix.weights).norm() == 0.0);
}

TEST_CASE("qpm stops at the rho cap when feasibility is unreachable") {
  const Dataset data = edge_dataset();
  SolverConfig cfg = qpm_config();
  cfg.eps_h = 1e-300;  // unattainable
  cfg.rho_max = 1e6;
  const SolveResult result = dagopt::solve_qpm(data, cfg);
  CHECK(result.termination == Termination::RhoCap);
  CHECK(result.trace.back().rho <= 1e6);
  CHECK(result.trace.back().rho > 1e5);
}

TEST_CASE("solve dispatches on kind and validates") {
  const Dataset data = edge_dataset();
  CHECK_THROWS_AS(dagopt::solve_qpm(data, alm_config()),
                  dagopt::InvalidInputError);
  CHECK_THROWS_AS(dagopt::solve_alm(data, qpm_config()),
                  dagopt::InvalidInputError);

  SolverConfig bad = qpm_config();
  bad.beta = 1.0;
  CHECK_THROWS_AS(dagopt::solve(data, bad), dagopt::InvalidInputError);

  SolverConfig bad_gamma = alm_config();
  bad_gamma.gamma = 1.5;
  CHECK_THROWS_AS(dagopt::solve(data, bad_gamma), dagopt::InvalidInputError);
}

TEST_CASE("momentum failures are recorded in the trace, not swallowed") {
  // d = 3 chain data; momentum's fixed step cannot track the penalty
  // curvature once rho is large.
  WeightMatrix w = WeightMatrix::Zero(3, 3);
  w(0, 1) = 1.5;
  w(1, 2) = -1.2;
  const Dataset data = dagopt::sample_linear_sem(w, 500, 1.0, 11);
  SolverConfig cfg = qpm_config();
  cfg.optimizer = dagopt::OptimizerKind::Momentum;
  cfg.inner_max_iters = 2000;
  const SolveResult result = dagopt::solve_qpm(data, cfg);
  REQUIRE(!result.trace.empty());
  CHECK(result.weights.allFinite());
  bool saw_failure = false;
  for (const auto& record : result.trace) {
    if (record.inner_status == dagopt::InnerStatus::NumericalFailure) {
      saw_failure = true;
    }
  }
  CHECK(saw_failure);
}

TEST_CASE("l1 split path stays consistent with the plain path at lambda=0+") {
  const Dataset data = edge_dataset(13, 400);
  SolverConfig plain = qpm_config();
  SolverConfig split = qpm_config();
  split.lambda = 1e-9;  // engages the split parameterization
  const SolveResult a = dagopt::solve_qpm(data, plain);
  const SolveResult b = dagopt::solve_qpm(data, split);
  CHECK(a.termination == Termination::FeasibleTol);
  CHECK(b.termination == Termination::FeasibleTol);
  CHECK((a.thresholded - b.thresholded).cwiseAbs().sum() == 0);
}

TEST_CASE("tau schedules") {
  dagopt::TauSchedule constant;
  CHECK(constant.at(0) == constant.at(17));

  dagopt::TauSchedule geometric;
  geometric.kind = dagopt::TauSchedule::Kind::Geometric;
  geometric.tau0 = 1e-2;
  geometric.decay = 0.1;
  geometric.floor = 1e-6;
  CHECK(geometric.at(0) == 1e-2);
  CHECK(geometric.at(2) == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(geometric.at(10) == 1e-6);
}
