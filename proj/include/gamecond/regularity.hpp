#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <exception>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "gamecond/equilibrium.hpp"
#include "gamecond/errors.hpp"
#include "gamecond/game.hpp"
#include "gamecond/linprog.hpp"
#include "gamecond/min_norm.hpp"
#include "gamecond/projection.hpp"
#include "gamecond/tolerances.hpp"

namespace gamecond {

// ---------------------------------------------------------------------------
// Subdifferential and normal cone generators
// ---------------------------------------------------------------------------

/// Stacked vectors (a_i, b_k) for i in I, k in K; their convex hull is the
/// subdifferential of the gap function at a point with those active sets.
inline std::vector<Eigen::VectorXd> subdifferential_generators(const MatrixGame& game,
                                                               const IndexConfiguration& cfg) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(cfg.I.size() * cfg.K.size());
  for (int i : cfg.I) {
    for (int k : cfg.K) {
      Eigen::VectorXd c(game.m() + game.n());
      c << game.column(i), game.negated_row(k);
      out.push_back(std::move(c));
    }
  }
  return out;
}

inline std::vector<Eigen::VectorXd> subdifferential_generators(const MatrixGame& game,
                                                               const StrategyProfile& w,
                                                               const Tolerances& tol = {}) {
  check_feasible(game, w, tol);
  return subdifferential_generators(game, index_sets(game, w, tol));
}

/// Normal cone of the simplex product at a point with zero coordinates J:
/// span{(1_m, 0)} + span{(0, 1_n)} - cone{e_j : j in J}. Points are left empty.
inline GeneratorSet normal_cone_generators(const MatrixGame& game, const std::vector<int>& zeros) {
  const Eigen::Index m = game.m();
  const Eigen::Index n = game.n();
  GeneratorSet g;
  g.d = m + n;
  Eigen::VectorXd ones_x = Eigen::VectorXd::Zero(m + n);
  ones_x.head(m).setOnes();
  Eigen::VectorXd ones_y = Eigen::VectorXd::Zero(m + n);
  ones_y.tail(n).setOnes();
  g.lines = {ones_x, ones_y};
  for (int j : zeros) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(m + n);
    r(j) = -1.0;
    g.rays.push_back(std::move(r));
  }
  return g;
}

inline GeneratorSet normal_cone_generators(const MatrixGame& game, const StrategyProfile& w,
                                           const Tolerances& tol = {}) {
  check_feasible(game, w, tol);
  return normal_cone_generators(game, index_sets(game, w, tol).J);
}

/// Generator set of  co{(a_i, b_k)} + N  for a configuration.
inline GeneratorSet configuration_generators(const MatrixGame& game, const IndexConfiguration& cfg) {
  GeneratorSet g = normal_cone_generators(game, cfg.J);
  g.points = subdifferential_generators(game, cfg);
  return g;
}

/// dist(0; dF + N) for the configuration.
inline double configuration_distance(const MatrixGame& game, const IndexConfiguration& cfg) {
  return min_norm_point(configuration_generators(game, cfg)).distance;
}

inline void require_non_equilibrium(const MatrixGame& game, const StrategyProfile& w,
                                    const Tolerances& tol) {
  if (gap_value(game, w) <= equilibrium_threshold(game, tol)) {
    throw Error(ErrorKind::PointIsEquilibrium, "strategy profile is an equilibrium");
  }
}

/// Exact bound of metric regularity of the sublevel mapping at (w, F(w)):
/// 1 / dist(0; dF(w) + N(w)). Requires w outside the equilibrium set.
inline double exact_regularity_bound(const MatrixGame& game, const StrategyProfile& w,
                                     const Tolerances& tol = {}) {
  check_feasible(game, w, tol);
  require_non_equilibrium(game, w, tol);
  return 1.0 / configuration_distance(game, index_sets(game, w, tol));
}

// ---------------------------------------------------------------------------
// Configuration enumeration
// ---------------------------------------------------------------------------

namespace detail {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// processed exactly once; results must be written to per-index slots.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline std::vector<int> mask_to_indices(std::uint64_t mask, int width) {
  std::vector<int> out;
  for (int b = 0; b < width; ++b) {
    if (mask & (std::uint64_t{1} << b)) out.push_back(b);
  }
  return out;
}

}  // namespace detail

/// One block of a configuration: on the x side, `active` are maximizing
/// columns I and `zeros` are zero coordinates of x; on the y side, `active`
/// is K and `zeros` are zero coordinates of y (local indices).
struct SideConfiguration {
  std::vector<int> active;
  std::vector<int> zeros;
  /// Largest common margin with which the pattern occurs.
  double slack = 0.0;
  /// Largest value of the block's gap part over the closure of the pattern.
  double top = 0.0;
  /// dist(0; co{scores} + span{1} - cone{e_j : j in zeros}) in the block.
  double distance = 0.0;
};

namespace detail {

/// Realizability LP of one block. Scores are the columns of `scores`
/// (dim x count). Variables (v, t, s). Returns the max slack and, in `point`,
/// the maximizer's v.
inline double block_slack(const Eigen::MatrixXd& scores, const std::vector<int>& active,
                          const std::vector<int>& zeros, Eigen::VectorXd* point = nullptr) {
  const Eigen::Index dim = scores.rows();
  const Eigen::Index nv = dim + 2;
  Polyhedron poly(nv);
  std::vector<bool> is_active(static_cast<std::size_t>(scores.cols()), false);
  for (int c : active) is_active[static_cast<std::size_t>(c)] = true;
  std::vector<bool> is_zero(static_cast<std::size_t>(dim), false);
  for (int j : zeros) is_zero[static_cast<std::size_t>(j)] = true;
  for (Eigen::Index c = 0; c < scores.cols(); ++c) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row.head(dim) = scores.col(c);
    row(dim) = -1.0;
    if (is_active[static_cast<std::size_t>(c)]) {
      poly.add_equality(row, 0.0);
    } else {
      row(dim + 1) = 1.0;
      poly.add_inequality(row, 0.0);
    }
  }
  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    if (is_zero[static_cast<std::size_t>(j)]) {
      row(j) = 1.0;
      poly.add_equality(row, 0.0);
    } else {
      row(j) = -1.0;
      row(dim + 1) = 1.0;
      poly.add_inequality(row, 0.0);
    }
  }
  poly.add_unit_sum(0, dim);
  Eigen::VectorXd cap = Eigen::VectorXd::Zero(nv);
  cap(dim + 1) = 1.0;
  poly.add_inequality(cap, 1.0);
  Eigen::VectorXd objective = Eigen::VectorXd::Zero(nv);
  objective(dim + 1) = 1.0;
  try {
    const LpResult lp = lp_solve(objective, poly, Sense::maximize);
    if (point) *point = lp.solution.head(dim);
    return lp.optimum;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Infeasible) return -1.0;
    throw;
  }
}

/// max t over the closure of the pattern (margins allowed to vanish).
inline double block_top(const Eigen::MatrixXd& scores, const std::vector<int>& active,
                        const std::vector<int>& zeros) {
  const Eigen::Index dim = scores.rows();
  const Eigen::Index nv = dim + 1;
  Polyhedron poly(nv);
  std::vector<bool> is_active(static_cast<std::size_t>(scores.cols()), false);
  for (int c : active) is_active[static_cast<std::size_t>(c)] = true;
  std::vector<bool> is_zero(static_cast<std::size_t>(dim), false);
  for (int j : zeros) is_zero[static_cast<std::size_t>(j)] = true;
  for (Eigen::Index c = 0; c < scores.cols(); ++c) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row.head(dim) = scores.col(c);
    row(dim) = -1.0;
    if (is_active[static_cast<std::size_t>(c)]) {
      poly.add_equality(row, 0.0);
    } else {
      poly.add_inequality(row, 0.0);
    }
  }
  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    if (is_zero[static_cast<std::size_t>(j)]) {
      row(j) = 1.0;
      poly.add_equality(row, 0.0);
    } else {
      poly.add_nonnegative(j);
    }
  }
  poly.add_unit_sum(0, dim);
  Eigen::VectorXd objective = Eigen::VectorXd::Zero(nv);
  objective(dim) = 1.0;
  return lp_solve(objective, poly, Sense::maximize).optimum;
}

inline double block_distance(const Eigen::MatrixXd& scores, const std::vector<int>& active,
                             const std::vector<int>& zeros) {
  const Eigen::Index dim = scores.rows();
  GeneratorSet g;
  g.d = dim;
  for (int c : active) g.points.push_back(scores.col(c));
  g.lines.push_back(Eigen::VectorXd::Ones(dim));
  for (int j : zeros) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(dim);
    r(j) = -1.0;
    g.rays.push_back(std::move(r));
  }
  return min_norm_point(g).distance;
}

/// All (active, zeros) patterns of one block realizable with slack > margin.
inline std::vector<SideConfiguration> enumerate_block(const Eigen::MatrixXd& scores, double margin,
                                                      unsigned threads, std::size_t* examined) {
  const int dim = static_cast<int>(scores.rows());
  const int count = static_cast<int>(scores.cols());
  const std::uint64_t active_masks = (std::uint64_t{1} << count) - 1;  // nonempty
  const std::uint64_t zero_masks = (std::uint64_t{1} << dim) - 1;      // not all zero
  const std::size_t total = static_cast<std::size_t>(active_masks * zero_masks);
  std::vector<std::optional<SideConfiguration>> slots(total);
  parallel_for(total, threads, [&](std::size_t idx) {
    const std::uint64_t active = idx / zero_masks + 1;
    const std::uint64_t zeros = idx % zero_masks;
    SideConfiguration cfg;
    cfg.active = mask_to_indices(active, count);
    cfg.zeros = mask_to_indices(zeros, dim);
    cfg.slack = block_slack(scores, cfg.active, cfg.zeros);
    if (cfg.slack <= margin) return;
    cfg.top = block_top(scores, cfg.active, cfg.zeros);
    cfg.distance = block_distance(scores, cfg.active, cfg.zeros);
    slots[idx] = std::move(cfg);
  });
  if (examined) *examined += total;
  std::vector<SideConfiguration> out;
  for (auto& s : slots) {
    if (s) out.push_back(std::move(*s));
  }
  return out;
}

inline Eigen::MatrixXd x_scores(const MatrixGame& game) { return game.payoff(); }
inline Eigen::MatrixXd y_scores(const MatrixGame& game) { return -game.payoff().transpose(); }

inline IndexConfiguration join(const MatrixGame& game, const SideConfiguration& xs,
                               const SideConfiguration& ys) {
  IndexConfiguration cfg;
  cfg.I = xs.active;
  cfg.K = ys.active;
  cfg.J = xs.zeros;
  for (int j : ys.zeros) cfg.J.push_back(static_cast<int>(game.m()) + j);
  return cfg;
}

}  // namespace detail

/// Result of the joint realizability LP of a configuration.
struct Realization {
  double slack = 0.0;
  StrategyProfile point;
};

/// Maximizes a common slack s subject to: the configuration's argmax and
/// zero patterns hold with margin s on both blocks, and F = t_x + t_y >= s.
inline Realization realize_configuration(const MatrixGame& game, const IndexConfiguration& cfg) {
  const Eigen::Index m = game.m();
  const Eigen::Index n = game.n();
  // Variables: x (m), y (n), t_x, t_y, s.
  const Eigen::Index nv = m + n + 3;
  const Eigen::Index tx = m + n;
  const Eigen::Index ty = m + n + 1;
  const Eigen::Index sv = m + n + 2;
  Polyhedron poly(nv);
  auto in = [](const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row.head(m) = game.column(i);
    row(tx) = -1.0;
    if (in(cfg.I, static_cast<int>(i))) {
      poly.add_equality(row, 0.0);
    } else {
      row(sv) = 1.0;
      poly.add_inequality(row, 0.0);
    }
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row.segment(m, n) = game.negated_row(k);
    row(ty) = -1.0;
    if (in(cfg.K, static_cast<int>(k))) {
      poly.add_equality(row, 0.0);
    } else {
      row(sv) = 1.0;
      poly.add_inequality(row, 0.0);
    }
  }
  for (Eigen::Index j = 0; j < m + n; ++j) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    if (in(cfg.J, static_cast<int>(j))) {
      row(j) = 1.0;
      poly.add_equality(row, 0.0);
    } else {
      row(j) = -1.0;
      row(sv) = 1.0;
      poly.add_inequality(row, 0.0);
    }
  }
  poly.add_unit_sum(0, m);
  poly.add_unit_sum(m, n);
  {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row(tx) = -1.0;
    row(ty) = -1.0;
    row(sv) = 1.0;
    poly.add_inequality(row, 0.0);
  }
  {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row(sv) = 1.0;
    poly.add_inequality(row, 1.0);
  }
  Eigen::VectorXd objective = Eigen::VectorXd::Zero(nv);
  objective(sv) = 1.0;
  Realization r;
  try {
    const LpResult lp = lp_solve(objective, poly, Sense::maximize);
    r.slack = lp.optimum;
    r.point = {lp.solution.head(m), lp.solution.segment(m, n)};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Infeasible) throw;
    r.slack = -1.0;
    r.point = StrategyProfile::barycenter(game);
  }
  return r;
}

struct ConditionOptions {
  Tolerances tol;
  unsigned threads = 1;
  /// Refuse games with m + n above this unless allow_large is set.
  Eigen::Index max_size = 14;
  bool allow_large = false;
};

/// A realizable configuration with its regularity distance.
struct ScoredConfiguration {
  IndexConfiguration config;
  double distance = 0.0;
  double slack = 0.0;
};

struct Enumeration {
  std::vector<ScoredConfiguration> configurations;
  /// Patterns whose realizability slack lies in (margin, 10 * margin].
  std::vector<IndexConfiguration> marginal;
  std::size_t block_candidates = 0;
};

/// Every configuration (I, K, J) realized with positive margin at some
/// profile with F > 0, with dist(0; dF + N) for each.
///
/// The generator set of a configuration is a Cartesian product of an x block
/// and a y block, and the realizability conditions couple the blocks only
/// through F = t_x + t_y > 0. Blocks are therefore enumerated separately and
/// combined; pairs close to the F > 0 boundary are decided by the joint LP.
inline Enumeration enumerate_scored_configurations(const MatrixGame& game,
                                                   const ConditionOptions& options = {}) {
  if (game.m() + game.n() > options.max_size && !options.allow_large) {
    throw Error(ErrorKind::TooLarge, "game has m + n = " + std::to_string(game.m() + game.n()) +
                                         " > " + std::to_string(options.max_size) +
                                         "; configuration enumeration refused");
  }
  if (game.m() + game.n() > 60) {
    throw Error(ErrorKind::TooLarge, "game too large for configuration enumeration");
  }
  Enumeration out;
  const double margin = options.tol.margin;
  const auto xs = detail::enumerate_block(detail::x_scores(game), margin, options.threads,
                                          &out.block_candidates);
  const auto ys = detail::enumerate_block(detail::y_scores(game), margin, options.threads,
                                          &out.block_candidates);
  const double borderline = 1e-6 * game.scale();
  for (const auto& x : xs) {
    for (const auto& y : ys) {
      const double top = x.top + y.top;
      if (top <= margin) continue;
      IndexConfiguration cfg = detail::join(game, x, y);
      double slack = std::min(x.slack, y.slack);
      if (top <= borderline) {
        slack = realize_configuration(game, cfg).slack;
        if (slack <= margin) continue;
      }
      if (slack <= 10.0 * margin || top <= 10.0 * margin) out.marginal.push_back(cfg);
      out.configurations.push_back(
          {std::move(cfg), std::hypot(x.distance, y.distance), slack});
    }
  }
  return out;
}

inline std::vector<IndexConfiguration> enumerate_configurations(const MatrixGame& game,
                                                                const ConditionOptions& options = {}) {
  auto scored = enumerate_scored_configurations(game, options);
  std::vector<IndexConfiguration> out;
  out.reserve(scored.configurations.size());
  for (auto& s : scored.configurations) out.push_back(std::move(s.config));
  std::sort(out.begin(), out.end());
  return out;
}

struct ConditionReport {
  double kappa = 0.0;
  IndexConfiguration argmax_config;
  double witness_distance = 0.0;
  std::size_t configs_examined = 0;
  std::size_t block_candidates = 0;
  std::optional<double> oracle_estimate;
  Tolerances tolerances;
  std::vector<IndexConfiguration> marginal;
  /// Profile realizing the argmax configuration (joint realizability LP).
  Realization realization;
};

namespace detail {

/// Tie-break among configurations with equal distance: more zero
/// coordinates first (the lowest-dimensional face), then lexicographic.
inline bool preferred(const ScoredConfiguration& a, const ScoredConfiguration& b) {
  const double da = a.distance * a.distance;
  const double db = b.distance * b.distance;
  const double band = 1e-12 * std::max(da, db);
  if (da < db - band) return true;
  if (db < da - band) return false;
  if (a.config.J.size() != b.config.J.size()) return a.config.J.size() > b.config.J.size();
  return a.config < b.config;
}

}  // namespace detail

/// Condition measure kappa(A): the largest 1 / dist(0; dF + N) over all
/// configurations realizable outside the equilibrium set.
inline ConditionReport condition_measure(const MatrixGame& game, const ConditionOptions& options = {}) {
  if (all_profiles_equilibria(game, options.tol)) {
    throw Error(ErrorKind::AllEquilibria, "all strategy profiles are equilibria");
  }
  Enumeration en = enumerate_scored_configurations(game, options);
  if (en.configurations.empty()) {
    throw Error(ErrorKind::AllEquilibria, "all strategy profiles are equilibria");
  }
  const ScoredConfiguration* best = &en.configurations.front();
  for (const auto& c : en.configurations) {
    if (detail::preferred(c, *best)) best = &c;
  }
  ConditionReport report;
  report.argmax_config = best->config;
  report.witness_distance = configuration_distance(game, best->config);
  report.kappa = 1.0 / report.witness_distance;
  report.configs_examined = en.configurations.size();
  report.block_candidates = en.block_candidates;
  report.tolerances = options.tol;
  report.marginal = std::move(en.marginal);
  report.realization = realize_configuration(game, best->config);
  return report;
}

// ---------------------------------------------------------------------------
// Sampling oracle built from the definition  sup dist(w; S) / F(w)
// ---------------------------------------------------------------------------

struct SamplingPlan {
  /// Simplex grid with spacing 1/N (N = round(1 / grid_step)) on both blocks;
  /// every grid pair is evaluated.
  std::optional<double> grid_step;
  /// Random profiles, drawn on random faces of both simplices.
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

namespace detail {

/// Deterministic uniform in [0, 1) from a 64-bit engine.
template <class Engine>
double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Point of the simplex drawn uniformly on a random face (each coordinate
/// kept with probability 1/2, whole simplex with probability 1/4).
template <class Engine>
Eigen::VectorXd random_face_point(Engine& rng, Eigen::Index dim) {
  std::vector<bool> keep(static_cast<std::size_t>(dim), true);
  if (uniform01(rng) >= 0.25) {
    bool any = false;
    for (Eigen::Index j = 0; j < dim; ++j) {
      keep[j] = uniform01(rng) < 0.5;
      any = any || keep[j];
    }
    if (!any) keep[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(dim))] = true;
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (keep[j]) v(j) = -std::log(1.0 - uniform01(rng));
  }
  return v / v.sum();
}

inline void simplex_grid(Eigen::Index dim, int steps, std::vector<Eigen::VectorXd>& out) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(dim);
  std::function<void(Eigen::Index, int)> rec = [&](Eigen::Index pos, int left) {
    if (pos == dim - 1) {
      counts(pos) = left;
      out.push_back(counts / static_cast<double>(steps));
      return;
    }
    for (int c = left; c >= 0; --c) {
      counts(pos) = c;
      rec(pos + 1, left - c);
    }
  };
  rec(0, steps);
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return static_cast<std::size_t>(std::llround(r));
}

}  // namespace detail

/// Lower estimate of kappa: the largest dist(w; S) / F(w) over sampled
/// profiles with F(w) above the equilibrium threshold.
inline double condition_measure_oracle(const MatrixGame& game, const SamplingPlan& plan,
                                       const Tolerances& tol = {}) {
  if (!plan.grid_step && plan.samples == 0) {
    throw Error(ErrorKind::InvalidArgument, "sampling plan has neither grid nor samples");
  }
  if (all_profiles_equilibria(game, tol)) {
    throw Error(ErrorKind::AllEquilibria, "all strategy profiles are equilibria");
  }
  const GameSolution sol = game_value(game);
  const double threshold = equilibrium_threshold(game, tol);
  double best = 0.0;

  if (plan.grid_step) {
    const double h = *plan.grid_step;
    if (!(h > 0.0) || h > 1.0) throw Error(ErrorKind::InvalidArgument, "grid step must be in (0, 1]");
    const int steps = static_cast<int>(std::llround(1.0 / h));
    if (std::abs(steps * h - 1.0) > 1e-9) {
      throw Error(ErrorKind::InvalidArgument, "grid step must divide 1");
    }
    const std::size_t nx = detail::binomial(static_cast<std::size_t>(steps + game.m() - 1),
                                            static_cast<std::size_t>(game.m() - 1));
    const std::size_t ny = detail::binomial(static_cast<std::size_t>(steps + game.n() - 1),
                                            static_cast<std::size_t>(game.n() - 1));
    if (nx > 2'000'000 || ny > 2'000'000 || static_cast<double>(nx) * static_cast<double>(ny) > 4e9) {
      throw Error(ErrorKind::TooLarge, "sampling grid too large; use a coarser step or samples");
    }
    std::vector<Eigen::VectorXd> gx, gy;
    detail::simplex_grid(game.m(), steps, gx);
    detail::simplex_grid(game.n(), steps, gy);
    std::vector<double> dx(gx.size()), fx(gx.size()), dy(gy.size()), fy(gy.size());
    for (std::size_t i = 0; i < gx.size(); ++i) {
      dx[i] = project_onto_polyhedron(gx[i], sol.x_star).distance;
      fx[i] = x_gap_part(game, gx[i]);
    }
    for (std::size_t i = 0; i < gy.size(); ++i) {
      dy[i] = project_onto_polyhedron(gy[i], sol.y_star).distance;
      fy[i] = y_gap_part(game, gy[i]);
    }
    for (std::size_t i = 0; i < gx.size(); ++i) {
      for (std::size_t k = 0; k < gy.size(); ++k) {
        const double f = fx[i] + fy[k];
        if (f > threshold) best = std::max(best, std::hypot(dx[i], dy[k]) / f);
      }
    }
  }

  if (plan.samples > 0) {
    std::mt19937_64 rng(plan.seed);
    for (std::size_t s = 0; s < plan.samples; ++s) {
      StrategyProfile w{detail::random_face_point(rng, game.m()),
                        detail::random_face_point(rng, game.n())};
      const double f = gap_value(game, w);
      if (f > threshold) best = std::max(best, nash_distance(game, sol, w) / f);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Parametric problems
// ---------------------------------------------------------------------------

namespace detail {

inline void check_parameter(const MatrixGame& game, const StrategyProfile& w, double z,
                            const Tolerances& tol) {
  check_feasible(game, w, tol);
  require_non_equilibrium(game, w, tol);
  const double f = gap_value(game, w);
  if (!(z > 0.0) || !(z < f)) {
    throw Error(ErrorKind::ParameterOutOfRange, "parameter z must lie in (0, F(w))");
  }
}

}  // namespace detail

/// Feasible set of the local parametric problem at w:
/// c.w' <= z for the active stacks c = (a_i, b_k), both unit sums, and
/// w'_j >= 0 for the zero coordinates j of w.
inline Polyhedron parametric_feasible_set(const MatrixGame& game, const IndexConfiguration& cfg,
                                          double z) {
  const Eigen::Index m = game.m();
  const Eigen::Index n = game.n();
  Polyhedron poly(m + n);
  for (const auto& c : subdifferential_generators(game, cfg)) poly.add_inequality(c, z);
  poly.add_unit_sum(0, m);
  poly.add_unit_sum(m, n);
  for (int j : cfg.J) poly.add_nonnegative(j);
  return poly;
}

/// Optimal value of the local parametric problem, by direct projection.
inline double parametric_value_direct(const MatrixGame& game, const StrategyProfile& w, double z,
                                      const Tolerances& tol = {}) {
  detail::check_parameter(game, w, z, tol);
  const IndexConfiguration cfg = index_sets(game, w, tol);
  return project_onto_polyhedron(w.stacked(), parametric_feasible_set(game, cfg, z)).distance;
}

/// Optimal value of the local parametric problem, by the duality formula
/// (F(w) - z) / dist(0; co{c_l} + (ker E)^perp - cone{e_j}).
inline double parametric_value_closed_form(const MatrixGame& game, const StrategyProfile& w,
                                           double z, const Tolerances& tol = {}) {
  detail::check_parameter(game, w, z, tol);
  const IndexConfiguration cfg = index_sets(game, w, tol);
  return (gap_value(game, w) - z) / configuration_distance(game, cfg);
}

struct LevelSetProjection {
  double distance = 0.0;
  StrategyProfile point;
  /// F at the projected point; equals z when w lies above the level.
  double level = 0.0;
};

/// Distance from w to the sublevel set {w' in the simplex product : F(w') <= z}.
/// For F(w) > z the projection lands on the level set F = z.
inline LevelSetProjection level_set_distance(const MatrixGame& game, const StrategyProfile& w,
                                             double z, const Tolerances& tol = {}) {
  check_feasible(game, w, tol);
  if (!(z >= 0.0)) throw Error(ErrorKind::ParameterOutOfRange, "level must be nonnegative");
  const Eigen::Index m = game.m();
  const Eigen::Index n = game.n();
  IndexConfiguration all;
  for (int i = 0; i < n; ++i) all.I.push_back(i);
  for (int k = 0; k < m; ++k) all.K.push_back(k);
  for (int j = 0; j < m + n; ++j) all.J.push_back(j);
  const auto proj = project_onto_polyhedron(w.stacked(), parametric_feasible_set(game, all, z));
  LevelSetProjection out;
  out.distance = proj.distance;
  out.point = StrategyProfile::split(proj.point, m);
  out.level = gap_value(game, out.point);
  return out;
}

}  // namespace gamecond
