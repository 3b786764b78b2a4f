#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "gamecond/game.hpp"
#include "gamecond/linprog.hpp"
#include "gamecond/projection.hpp"

namespace gamecond {

/// Value of the game and the optimal-strategy polytopes
///   X* = {x in simplex : a_i.x <= value}   (Player 1)
///   Y* = {y in simplex : b_k.y <= y_level} (Player 2, y_level = -value)
/// The equilibrium set is the product X* x Y*.
struct GameSolution {
  double value = 0.0;
  /// Optimum of min_y max_k b_k.y, computed by its own LP; equals -value.
  double y_level = 0.0;
  Eigen::VectorXd x_optimal;
  Eigen::VectorXd y_optimal;
  Polyhedron x_star;
  Polyhedron y_star;
};

namespace detail {

/// min over the simplex of max_c (M' v)_c, with M columns as the scored vectors.
/// Variables (v, t); returns the LP result.
inline LpResult epigraph_lp(const Eigen::MatrixXd& scores) {
  const Eigen::Index dim = scores.rows();
  Polyhedron poly(dim + 1);
  for (Eigen::Index c = 0; c < scores.cols(); ++c) {
    Eigen::VectorXd row(dim + 1);
    row << scores.col(c), -1.0;
    poly.add_inequality(row, 0.0);
  }
  poly.add_unit_sum(0, dim);
  for (Eigen::Index j = 0; j < dim; ++j) poly.add_nonnegative(j);
  Eigen::VectorXd objective = Eigen::VectorXd::Zero(dim + 1);
  objective(dim) = 1.0;
  return lp_solve(objective, poly);
}

inline Polyhedron level_set(const Eigen::MatrixXd& scores, double level) {
  const Eigen::Index dim = scores.rows();
  Polyhedron poly(dim);
  poly.add_unit_sum(0, dim);
  for (Eigen::Index j = 0; j < dim; ++j) poly.add_nonnegative(j);
  for (Eigen::Index c = 0; c < scores.cols(); ++c) poly.add_inequality(scores.col(c), level);
  return poly;
}

}  // namespace detail

inline GameSolution game_value(const MatrixGame& game) {
  const Eigen::MatrixXd& a = game.payoff();
  // x side scores: columns a_i of A. y side scores: columns b_k of -A'.
  const Eigen::MatrixXd y_scores = -a.transpose();
  const LpResult x_lp = detail::epigraph_lp(a);
  const LpResult y_lp = detail::epigraph_lp(y_scores);
  GameSolution sol;
  sol.value = x_lp.optimum;
  sol.y_level = y_lp.optimum;
  sol.x_optimal = x_lp.solution.head(game.m());
  sol.y_optimal = y_lp.solution.head(game.n());
  sol.x_star = detail::level_set(a, sol.value);
  sol.y_star = detail::level_set(y_scores, sol.y_level);
  return sol;
}

/// Euclidean distance from w to the equilibrium set S = X* x Y*.
inline double nash_distance(const MatrixGame& game, const GameSolution& solution,
                            const StrategyProfile& w) {
  check_dimensions(game, w);
  const double dx = project_onto_polyhedron(w.x, solution.x_star).distance;
  const double dy = project_onto_polyhedron(w.y, solution.y_star).distance;
  return std::hypot(dx, dy);
}

inline double nash_distance(const MatrixGame& game, const StrategyProfile& w) {
  return nash_distance(game, game_value(game), w);
}

}  // namespace gamecond
