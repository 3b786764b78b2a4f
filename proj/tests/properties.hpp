#pragma once

// Randomized property suites shared by the unit tests and the acceptance runner.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "gamecond/regularity.hpp"
#include "oracles.hpp"

namespace props {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct SuiteResult {
  std::size_t cases = 0;
  std::size_t failures = 0;
  /// Largest violation seen (positive means a failure).
  double worst = -std::numeric_limits<double>::infinity();

  void record(double violation) {
    ++cases;
    worst = std::max(worst, violation);
    if (violation > 0.0) ++failures;
  }
  bool ok(std::size_t min_cases) const { return failures == 0 && cases >= min_cases; }
};

/// (v - u).(z - u) <= 1e-9 for every simplex vertex z, u = projection of v.
inline SuiteResult simplex_projection_vi(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(seed);
  SuiteResult out;
  while (out.cases < cases) {
    const int d = oracle::uniform_int(rng, 1, 12);
    const double spread = std::pow(10.0, oracle::uniform(rng, -2, 2));
    const VectorXd v = VectorXd::NullaryExpr(d, [&] { return oracle::uniform(rng, -spread, spread); });
    const VectorXd u = gamecond::project_onto_simplex(v);
    double worst = gamecond::simplex_residual(u) - 1e-12;
    for (int j = 0; j < d; ++j) {
      worst = std::max(worst, (v - u).dot(oracle::unit(d, j) - u) - 1e-9);
    }
    out.record(worst);
  }
  return out;
}

/// KKT residual of min_norm_point <= 1e-8, on random generator sets and on
/// configuration generator sets of random games.
inline SuiteResult min_norm_kkt(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(seed);
  SuiteResult out;
  while (out.cases < cases) {
    gamecond::GeneratorSet g;
    if (out.cases % 2 == 0) {
      g.d = oracle::uniform_int(rng, 1, 6);
      auto draw = [&] {
        return VectorXd(VectorXd::NullaryExpr(g.d, [&] { return oracle::uniform(rng, -2, 2); }));
      };
      const int np = oracle::uniform_int(rng, 1, 6);
      const int nl = oracle::uniform_int(rng, 0, 2);
      const int nr = oracle::uniform_int(rng, 0, 4);
      for (int k = 0; k < np; ++k) g.points.push_back(draw());
      for (int k = 0; k < nl; ++k) g.lines.push_back(draw());
      for (int k = 0; k < nr; ++k) g.rays.push_back(draw());
    } else {
      const int m = oracle::uniform_int(rng, 1, 5);
      const int n = oracle::uniform_int(rng, 1, 5);
      const auto game = gamecond::make_game(oracle::random_matrix(rng, m, n, out.cases % 4 == 1));
      const auto w = oracle::random_profile(rng, m, n);
      g = gamecond::configuration_generators(game, gamecond::index_sets(game, w));
    }
    const auto r = gamecond::min_norm_point(g);
    const double reproduce =
        (gamecond::combine(g, r.lambda, r.alpha, r.mu) - r.point).norm() - 1e-10 * (1 + r.distance);
    out.record(std::max(gamecond::min_norm_kkt_residual(g, r) - 1e-8, reproduce));
  }
  return out;
}

/// F(w') >= F(w) + g.(w' - w) - 1e-9 for generators g of the subdifferential at w.
inline SuiteResult subgradient_inequality(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(seed);
  SuiteResult out;
  while (out.cases < cases) {
    const int m = oracle::uniform_int(rng, 1, 6);
    const int n = oracle::uniform_int(rng, 1, 6);
    const auto game = gamecond::make_game(oracle::random_matrix(rng, m, n, out.cases % 3 == 0));
    const auto w = oracle::random_profile(rng, m, n);
    const double f = gamecond::gap_value(game, w);
    double worst = -1.0;
    for (const auto& g : gamecond::subdifferential_generators(game, w)) {
      for (int s = 0; s < 5; ++s) {
        const auto w2 = oracle::random_profile(rng, m, n);
        const double lhs = gamecond::gap_value(game, w2);
        worst = std::max(worst, f + g.dot(w2.stacked() - w.stacked()) - 1e-9 - lhs);
      }
    }
    out.record(worst);
  }
  return out;
}

/// nu.(w' - w) <= 1e-9 for every normal direction nu (lines both ways, rays)
/// and every vertex w' of the simplex product.
inline SuiteResult normal_cone_polarity(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(seed);
  SuiteResult out;
  while (out.cases < cases) {
    const int m = oracle::uniform_int(rng, 1, 6);
    const int n = oracle::uniform_int(rng, 1, 6);
    const auto game = gamecond::make_game(oracle::random_matrix(rng, m, n));
    const auto w = oracle::random_profile(rng, m, n);
    const auto cone = gamecond::normal_cone_generators(game, w);
    std::vector<VectorXd> dirs;
    for (const auto& l : cone.lines) {
      dirs.push_back(l);
      dirs.push_back(-l);
    }
    for (const auto& r : cone.rays) dirs.push_back(r);
    double worst = -1.0;
    for (int k = 0; k < m; ++k) {
      for (int i = 0; i < n; ++i) {
        VectorXd vertex(m + n);
        vertex << oracle::unit(m, k), oracle::unit(n, i);
        for (const auto& nu : dirs) worst = std::max(worst, nu.dot(vertex - w.stacked()) - 1e-9);
      }
    }
    out.record(worst);
  }
  return out;
}

/// kappa(PAQ) = kappa(A) to 1e-10 relative for random permutations P, Q.
inline SuiteResult permutation_invariance(std::uint64_t seed, std::size_t cases) {
  std::mt19937_64 rng(seed);
  SuiteResult out;
  while (out.cases < cases) {
    const int m = oracle::uniform_int(rng, 1, 4);
    const int n = oracle::uniform_int(rng, 1, 4);
    const MatrixXd a = oracle::random_matrix(rng, m, n, out.cases % 3 == 0);
    const auto game = gamecond::make_game(a);
    if (gamecond::all_profiles_equilibria(game)) continue;
    std::vector<int> rows(m), cols(n);
    std::iota(rows.begin(), rows.end(), 0);
    std::iota(cols.begin(), cols.end(), 0);
    std::shuffle(rows.begin(), rows.end(), rng);
    std::shuffle(cols.begin(), cols.end(), rng);
    MatrixXd b(m, n);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < n; ++c) b(r, c) = a(rows[r], cols[c]);
    }
    const double k1 = gamecond::condition_measure(game).kappa;
    const double k2 = gamecond::condition_measure(gamecond::make_game(b)).kappa;
    out.record(std::abs(k1 - k2) - 1e-10 * k1);
  }
  return out;
}

}  // namespace props
