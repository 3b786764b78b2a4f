#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <compare>
#include <string>
#include <vector>

#include "gamecond/errors.hpp"
#include "gamecond/tolerances.hpp"

namespace gamecond {

/// Payoff matrix of a two-person zero-sum game. Player 1 picks a row mixture
/// x in the m-simplex and minimizes x'Ay; Player 2 picks a column mixture y
/// in the n-simplex and maximizes it.
///
/// Derived vectors: column(i) is the i-th column of A (length m) and
/// negated_row(k) is minus the k-th row of A (length n).
class MatrixGame {
 public:
  MatrixGame() = default;

  const Eigen::MatrixXd& payoff() const noexcept { return payoff_; }
  Eigen::Index rows() const noexcept { return payoff_.rows(); }
  Eigen::Index cols() const noexcept { return payoff_.cols(); }
  /// Number of Player-1 pure strategies.
  Eigen::Index m() const noexcept { return payoff_.rows(); }
  /// Number of Player-2 pure strategies.
  Eigen::Index n() const noexcept { return payoff_.cols(); }

  Eigen::VectorXd column(Eigen::Index i) const { return payoff_.col(i); }
  Eigen::VectorXd negated_row(Eigen::Index k) const { return -payoff_.row(k).transpose(); }

  /// max |A_ij|
  double max_abs() const noexcept { return max_abs_; }
  /// (1 + max |A_ij|), the scale applied to relative tolerances.
  double scale() const noexcept { return 1.0 + max_abs_; }

  friend MatrixGame make_game(const Eigen::MatrixXd& matrix);

 private:
  explicit MatrixGame(Eigen::MatrixXd payoff)
      : payoff_(std::move(payoff)), max_abs_(payoff_.cwiseAbs().maxCoeff()) {}

  Eigen::MatrixXd payoff_;
  double max_abs_ = 0.0;
};

inline MatrixGame make_game(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() == 0 || matrix.cols() == 0) {
    throw Error(ErrorKind::EmptyMatrix, "payoff matrix is empty");
  }
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (!std::isfinite(matrix(r, c))) {
        throw Error(ErrorKind::NonFiniteEntry,
                    "non-finite payoff entry at (" + std::to_string(r + 1) + "," +
                        std::to_string(c + 1) + ")");
      }
    }
  }
  return MatrixGame(matrix);
}

inline MatrixGame make_game(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw Error(ErrorKind::EmptyMatrix, "payoff matrix is empty");
  }
  const auto width = rows.front().size();
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw Error(ErrorKind::InvalidArgument,
                  "payoff matrix is not rectangular (row " + std::to_string(r + 1) + ")");
    }
    for (std::size_t c = 0; c < width; ++c) {
      matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return make_game(matrix);
}

/// A point w = (x, y) of the strategy product. Coordinates of w are ordered
/// x first (0..m-1) then y (m..m+n-1).
struct StrategyProfile {
  Eigen::VectorXd x;
  Eigen::VectorXd y;

  Eigen::VectorXd stacked() const {
    Eigen::VectorXd w(x.size() + y.size());
    w << x, y;
    return w;
  }

  static StrategyProfile split(const Eigen::VectorXd& w, Eigen::Index m) {
    return {w.head(m), w.tail(w.size() - m)};
  }

  static StrategyProfile barycenter(const MatrixGame& game) {
    return {Eigen::VectorXd::Constant(game.m(), 1.0 / static_cast<double>(game.m())),
            Eigen::VectorXd::Constant(game.n(), 1.0 / static_cast<double>(game.n()))};
  }
};

/// Largest violation of simplex membership for a single vector.
inline double simplex_residual(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  return std::max(std::abs(v.sum() - 1.0), std::max(0.0, -v.minCoeff()));
}

inline void check_dimensions(const MatrixGame& game, const StrategyProfile& w) {
  if (w.x.size() != game.m() || w.y.size() != game.n()) {
    throw Error(ErrorKind::DimensionMismatch,
                "strategy profile has dimensions (" + std::to_string(w.x.size()) + "," +
                    std::to_string(w.y.size()) + "), game is " + std::to_string(game.m()) +
                    "x" + std::to_string(game.n()));
  }
}

inline void check_feasible(const MatrixGame& game, const StrategyProfile& w,
                           const Tolerances& tol = {}) {
  check_dimensions(game, w);
  if (simplex_residual(w.x) > tol.feas || simplex_residual(w.y) > tol.feas) {
    throw Error(ErrorKind::InfeasibleProfile, "strategy profile is not in the simplex product");
  }
}

/// The triple (I, K, J) of active indices, all 0-based and sorted.
/// I: maximizing columns, K: maximizing rows, J: zero coordinates of w
/// (x coordinates 0..m-1, y coordinates m..m+n-1).
struct IndexConfiguration {
  std::vector<int> I;
  std::vector<int> K;
  std::vector<int> J;

  auto operator<=>(const IndexConfiguration&) const = default;
  bool operator==(const IndexConfiguration&) const = default;
};

/// max_i a_i.x, the x-block of the gap.
inline double x_gap_part(const MatrixGame& game, const Eigen::VectorXd& x) {
  return (game.payoff().transpose() * x).maxCoeff();
}

/// max_k b_k.y = -min_k (Ay)_k, the y-block of the gap.
inline double y_gap_part(const MatrixGame& game, const Eigen::VectorXd& y) {
  return -(game.payoff() * y).minCoeff();
}

/// Saddle-point gap F(x, y) = max_i a_i.x + max_k b_k.y.
inline double gap_value(const MatrixGame& game, const StrategyProfile& w) {
  check_dimensions(game, w);
  return x_gap_part(game, w.x) + y_gap_part(game, w.y);
}

inline bool is_equilibrium(const MatrixGame& game, const StrategyProfile& w, double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be nonnegative");
  return gap_value(game, w) <= eps;
}

/// Threshold below which a gap is treated as zero.
inline double equilibrium_threshold(const MatrixGame& game, const Tolerances& tol) {
  return tol.equil * game.scale();
}

namespace detail {

inline std::vector<int> near_max(const Eigen::VectorXd& scores, double tie) {
  const double best = scores.maxCoeff();
  std::vector<int> out;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (scores(i) >= best - tie) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace detail

inline IndexConfiguration index_sets(const MatrixGame& game, const StrategyProfile& w,
                                     const Tolerances& tol = {}) {
  check_dimensions(game, w);
  const double tie = tol.tie * game.scale();
  IndexConfiguration cfg;
  cfg.I = detail::near_max(game.payoff().transpose() * w.x, tie);
  cfg.K = detail::near_max(-(game.payoff() * w.y), tie);
  for (Eigen::Index j = 0; j < w.x.size(); ++j) {
    if (w.x(j) <= tol.zero) cfg.J.push_back(static_cast<int>(j));
  }
  for (Eigen::Index j = 0; j < w.y.size(); ++j) {
    if (w.y(j) <= tol.zero) cfg.J.push_back(static_cast<int>(game.m() + j));
  }
  return cfg;
}

/// True when every profile is an equilibrium. F is convex, so it suffices to
/// check the m*n vertices of the strategy product.
inline bool all_profiles_equilibria(const MatrixGame& game, const Tolerances& tol = {}) {
  // F(e_k, e_i) = max_c A(k, c) - min_r A(r, i)
  const Eigen::VectorXd row_max = game.payoff().rowwise().maxCoeff();
  const Eigen::RowVectorXd col_min = game.payoff().colwise().minCoeff();
  const double threshold = equilibrium_threshold(game, tol);
  for (Eigen::Index k = 0; k < game.m(); ++k) {
    for (Eigen::Index i = 0; i < game.n(); ++i) {
      if (row_max(k) - col_min(i) > threshold) return false;
    }
  }
  return true;
}

}  // namespace gamecond
