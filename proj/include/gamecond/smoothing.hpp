#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "gamecond/errors.hpp"
#include "gamecond/game.hpp"

namespace gamecond {

struct SolveOptions {
  std::size_t max_iterations = 1'000'000;
  /// Smoothing parameter of a stage is mu = smoothing_factor * target / D,
  /// D = ln m + ln n. The default makes the smoothing bias mu * D half the
  /// stage target. All parameters are relative to the gap, so solve(cA, c eps)
  /// reproduces the iterates of solve(A, eps) for c > 0.
  double smoothing_factor = 0.5;
  /// Each stage aims at stage_reduction * (gap at stage start).
  double stage_reduction = 0.5;
};

struct GapSample {
  std::size_t iteration = 0;
  double gap = 0.0;
};

struct SolveTrace {
  double epsilon = 0.0;
  std::size_t iterations = 0;
  double final_gap = 0.0;
  std::vector<GapSample> history;
  std::size_t restart_count = 0;
};

struct SolveResult {
  StrategyProfile profile;
  SolveTrace trace;
};

/// Thrown when the iteration cap is hit; carries the best iterate found.
class IterationLimitError : public Error {
 public:
  IterationLimitError(SolveResult best)
      : Error(ErrorKind::IterationLimitExceeded, "iteration limit exceeded"),
        best_(std::move(best)) {}
  const SolveResult& best() const noexcept { return best_; }

 private:
  SolveResult best_;
};

namespace detail {

/// exp(v - logsumexp(v)).
inline Eigen::VectorXd softmax(const Eigen::VectorXd& v) {
  const double top = v.maxCoeff();
  Eigen::VectorXd e = (v.array() - top).exp().matrix();
  return e / e.sum();
}

/// In-place normalization of log-weights so that exp(log_w) sums to one.
inline void normalize_log(Eigen::VectorXd& log_w) {
  const double top = log_w.maxCoeff();
  log_w.array() -= top + std::log((log_w.array() - top).exp().sum());
}

}  // namespace detail

/// Iterated smoothing for min_x max_y x'Ay.
///
/// Each stage smooths both players' best-response functions with entropy
/// (softmax responses) and runs an accelerated entropic mirror-descent method
/// on the smoothed gap; a stage ends once the exact gap falls below its target
/// and the next stage restarts from there with a smaller target. The exact gap
/// is evaluated at every iterate and is the only stopping criterion.
inline SolveResult solve(const MatrixGame& game, double epsilon, const SolveOptions& options = {}) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  const Eigen::MatrixXd& a = game.payoff();
  const Eigen::Index m = game.m();
  const Eigen::Index n = game.n();
  const double spread = std::log(static_cast<double>(m)) + std::log(static_cast<double>(n));
  const double norm = game.max_abs();

  SolveResult out;
  out.profile = StrategyProfile::barycenter(game);
  out.trace.epsilon = epsilon;
  double gap = gap_value(game, out.profile);
  out.trace.history.push_back({0, gap});
  out.trace.final_gap = gap;
  if (gap <= epsilon) return out;

  StrategyProfile best = out.profile;
  double best_gap = gap;
  std::size_t iter = 0;
  std::size_t next_record = 1;
  StrategyProfile start = out.profile;

  while (true) {
    const double target = options.stage_reduction * gap;
    const double mu = options.smoothing_factor * target / spread;
    const double lipschitz = norm * norm / mu;

    Eigen::VectorXd yx = start.x, yy = start.y;
    Eigen::VectorXd log_zx = start.x.array().max(1e-300).log().matrix();
    Eigen::VectorXd log_zy = start.y.array().max(1e-300).log().matrix();
    double theta = 1.0;
    bool stage_done = false;
    while (!stage_done) {
      if (iter >= options.max_iterations) {
        out.profile = best;
        out.trace.iterations = iter;
        out.trace.final_gap = best_gap;
        throw IterationLimitError(out);
      }
      ++iter;
      const Eigen::VectorXd zx = log_zx.array().exp().matrix();
      const Eigen::VectorXd zy = log_zy.array().exp().matrix();
      const Eigen::VectorXd ux = (1.0 - theta) * yx + theta * zx;
      const Eigen::VectorXd uy = (1.0 - theta) * yy + theta * zy;
      // Gradients of the smoothed max_y x'Ay and of -min_x x'Ay.
      const Eigen::VectorXd grad_x = a * detail::softmax(a.transpose() * ux / mu);
      const Eigen::VectorXd grad_y = -(a.transpose() * detail::softmax(-(a * uy) / mu));
      const double step = 1.0 / (theta * lipschitz);
      log_zx -= step * grad_x;
      log_zy -= step * grad_y;
      detail::normalize_log(log_zx);
      detail::normalize_log(log_zy);
      yx = (1.0 - theta) * yx + theta * log_zx.array().exp().matrix();
      yy = (1.0 - theta) * yy + theta * log_zy.array().exp().matrix();
      yx /= yx.sum();
      yy /= yy.sum();
      const double t2 = theta * theta;
      theta = (std::sqrt(t2 * t2 + 4.0 * t2) - t2) / 2.0;

      const StrategyProfile current{yx, yy};
      gap = gap_value(game, current);
      if (gap < best_gap) {
        best_gap = gap;
        best = current;
      }
      if (iter == next_record) {
        out.trace.history.push_back({iter, gap});
        next_record *= 2;
      }
      if (gap <= epsilon) {
        if (out.trace.history.back().iteration != iter) out.trace.history.push_back({iter, gap});
        out.profile = current;
        out.trace.iterations = iter;
        out.trace.final_gap = gap;
        return out;
      }
      if (gap <= target) {
        if (out.trace.history.back().iteration != iter) out.trace.history.push_back({iter, gap});
        ++out.trace.restart_count;
        start = current;
        stage_done = true;
      }
    }
  }
}

struct ProbeRow {
  double epsilon = 0.0;
  std::size_t iterations = 0;
  double final_gap = 0.0;
};

/// One cold-started solve per target, in ladder order.
inline std::vector<ProbeRow> complexity_probe(const MatrixGame& game,
                                              const std::vector<double>& eps_ladder,
                                              const SolveOptions& options = {}) {
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "ladder entries must be positive");
    if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "ladder must be strictly decreasing");
    }
  }
  std::vector<ProbeRow> rows;
  rows.reserve(eps_ladder.size());
  for (double eps : eps_ladder) {
    const SolveResult r = solve(game, eps, options);
    rows.push_back({eps, r.trace.iterations, r.trace.final_gap});
  }
  return rows;
}

}  // namespace gamecond
