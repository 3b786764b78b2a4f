#include <gtest/gtest.h>

#include <random>

#include "gamecond/linprog.hpp"
#include "oracles.hpp"

using namespace gamecond;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void expect_certified(const LpResult& r) {
  EXPECT_LE(r.primal_residual, 1e-9);
  EXPECT_LE(r.dual_residual, 1e-9);
  EXPECT_LE(r.duality_gap, 1e-8 * (1.0 + std::abs(r.optimum)));
}

}  // namespace

TEST(LpSolve, MinCoordinateOverSimplex) {
  Polyhedron p(2);
  p.add_unit_sum(0, 2).add_nonnegative(0).add_nonnegative(1);
  const auto r = lp_solve(VectorXd::Unit(2, 0), p);
  EXPECT_NEAR(r.optimum, 0.0, 1e-12);
  EXPECT_NEAR(r.solution(0), 0.0, 1e-12);
  EXPECT_NEAR(r.solution(1), 1.0, 1e-12);
  expect_certified(r);
}

TEST(LpSolve, MaxSumUnderBudget) {
  Polyhedron p(2);
  p.add_inequality(VectorXd::Ones(2), 1.0).add_nonnegative(0).add_nonnegative(1);
  const auto r = lp_solve(VectorXd::Ones(2), p, Sense::maximize);
  EXPECT_NEAR(r.optimum, 1.0, 1e-12);
  expect_certified(r);
}

TEST(LpSolve, Infeasible) {
  Polyhedron p(1);
  p.add_inequality(VectorXd::Ones(1), -1.0).add_nonnegative(0);
  try {
    lp_solve(VectorXd::Ones(1), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
  }
}

TEST(LpSolve, Unbounded) {
  Polyhedron p(2);
  p.add_nonnegative(0);
  try {
    lp_solve(VectorXd::Unit(2, 0), p, Sense::maximize);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unbounded);
  }
}

TEST(LpSolve, FreeVariablesAndNegativeRhs) {
  // min t s.t. t >= 3 - w, t >= w - 1, w free: optimum 1 at w = 2.
  Polyhedron p(2);
  p.add_inequality((VectorXd(2) << -1, -1).finished(), -3.0);
  p.add_inequality((VectorXd(2) << 1, -1).finished(), 1.0);
  const auto r = lp_solve(VectorXd::Unit(2, 1), p);
  EXPECT_NEAR(r.optimum, 1.0, 1e-12);
  EXPECT_NEAR(r.solution(0), 2.0, 1e-12);
  expect_certified(r);
}

TEST(LpSolve, DegenerateVertexTerminates) {
  // Many constraints through the same vertex; Bland's rule must not cycle.
  Polyhedron p(3);
  for (int k = 1; k <= 12; ++k) {
    p.add_inequality((VectorXd(3) << 1.0, k, k * k).finished(), 0.0);
  }
  for (int j = 0; j < 3; ++j) p.add_nonnegative(j);
  const auto r = lp_solve(-VectorXd::Ones(3), p);
  EXPECT_NEAR(r.optimum, 0.0, 1e-12);
  expect_certified(r);
}

TEST(LpSolve, EpigraphMatchesGridMinimax) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 50; ++t) {
    const MatrixXd a = oracle::random_matrix(rng, 2, 2);
    Polyhedron p(3);
    for (int i = 0; i < 2; ++i) p.add_inequality((VectorXd(3) << a.col(i), -1.0).finished(), 0.0);
    p.add_unit_sum(0, 2).add_nonnegative(0).add_nonnegative(1);
    const auto r = lp_solve(VectorXd::Unit(3, 2), p);
    expect_certified(r);
    EXPECT_NEAR(r.optimum, oracle::grid_minimax(a, 1000).value, 1e-3);
  }
}

TEST(LpSolve, RandomFeasibleProgramsAreCertified) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 300; ++t) {
    const int d = oracle::uniform_int(rng, 1, 8);
    const int ni = oracle::uniform_int(rng, 0, 10);
    const int ne = oracle::uniform_int(rng, 0, std::min(d, 3));
    // Constraints built around a known feasible point inside a box.
    const VectorXd w0 = VectorXd::NullaryExpr(d, [&] { return oracle::uniform(rng, -1, 1); });
    Polyhedron p(d);
    for (int k = 0; k < ne; ++k) {
      const VectorXd a = VectorXd::NullaryExpr(d, [&] { return oracle::uniform(rng, -1, 1); });
      p.add_equality(a, a.dot(w0));
    }
    for (int k = 0; k < ni; ++k) {
      const VectorXd a = VectorXd::NullaryExpr(d, [&] { return oracle::uniform(rng, -1, 1); });
      p.add_inequality(a, a.dot(w0) + oracle::uniform(rng, 0, 1));
    }
    for (int j = 0; j < d; ++j) {
      p.add_inequality(VectorXd::Unit(d, j), 2.0);
      p.add_inequality(-VectorXd::Unit(d, j), 2.0);
    }
    const VectorXd c = VectorXd::NullaryExpr(d, [&] { return oracle::uniform(rng, -1, 1); });
    const auto r = lp_solve(c, p, t % 2 ? Sense::maximize : Sense::minimize);
    expect_certified(r);
    if (t % 2) {
      EXPECT_GE(r.optimum, c.dot(w0) - 1e-9);
    } else {
      EXPECT_LE(r.optimum, c.dot(w0) + 1e-9);
    }
  }
}
