#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "gamecond/min_norm.hpp"
#include "oracles.hpp"

using namespace gamecond;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

GeneratorSet pennies_set() {
  GeneratorSet g;
  g.d = 4;
  g.points = {vec({1, -1, 1, -1})};
  g.lines = {vec({1, 1, 0, 0}), vec({0, 0, 1, 1})};
  g.rays = {vec({0, -1, 0, 0}), vec({0, 0, 0, -1})};
  return g;
}

GeneratorSet random_set(std::mt19937_64& rng) {
  GeneratorSet g;
  g.d = oracle::uniform_int(rng, 1, 5);
  const int np = oracle::uniform_int(rng, 1, 5);
  const int nl = oracle::uniform_int(rng, 0, 2);
  const int nr = oracle::uniform_int(rng, 0, 4);
  auto draw = [&] {
    return VectorXd(VectorXd::NullaryExpr(g.d, [&] { return oracle::uniform(rng, -2, 2); }));
  };
  for (int k = 0; k < np; ++k) g.points.push_back(draw());
  for (int k = 0; k < nl; ++k) g.lines.push_back(draw());
  for (int k = 0; k < nr; ++k) g.rays.push_back(draw());
  return g;
}

}  // namespace

TEST(MinNorm, Singleton) {
  GeneratorSet g;
  g.d = 2;
  g.points = {vec({1, 0})};
  EXPECT_NEAR(min_norm_point(g).distance, 1.0, 1e-15);
}

TEST(MinNorm, SymmetricPair) {
  GeneratorSet g;
  g.d = 2;
  g.points = {vec({1, 0}), vec({-1, 0})};
  const auto r = min_norm_point(g);
  EXPECT_NEAR(r.distance, 0.0, 1e-15);
  EXPECT_NEAR(r.lambda(0), 0.5, 1e-12);
}

TEST(MinNorm, PenniesConfiguration) {
  const auto g = pennies_set();
  const auto r = min_norm_point(g);
  EXPECT_NEAR(r.distance, 2.0, 1e-12);
  EXPECT_NEAR(oracle::projected_gradient_min_norm(g), 2.0, 1e-9);
  EXPECT_NEAR(oracle::support_enumeration_min_norm(g), 2.0, 1e-12);
  EXPECT_LE(min_norm_kkt_residual(g, r), 1e-8);
  EXPECT_NEAR((combine(g, r.lambda, r.alpha, r.mu) - r.point).norm(), 0.0, 1e-10);
}

TEST(MinNorm, NoPoints) {
  GeneratorSet g;
  g.d = 2;
  g.lines = {vec({1, 0})};
  try {
    min_norm_point(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoPoints);
  }
}

TEST(MinNorm, MatchesSupportEnumeration) {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 500; ++t) {
    const auto g = random_set(rng);
    const auto r = min_norm_point(g);
    EXPECT_NEAR(r.distance, oracle::support_enumeration_min_norm(g), 1e-9 * (1 + r.distance));
    EXPECT_LE(min_norm_kkt_residual(g, r), 1e-8);
    EXPECT_NEAR((combine(g, r.lambda, r.alpha, r.mu) - r.point).norm(), 0.0, 1e-10);
    EXPECT_NEAR(r.point.norm(), r.distance, 1e-12);
    EXPECT_NEAR(r.lambda.sum(), 1.0, 1e-12);
    EXPECT_GE(r.lambda.minCoeff(), 0.0);
    if (!g.rays.empty()) {
      EXPECT_GE(r.mu.minCoeff(), 0.0);
    }
  }
}

TEST(MinNorm, InvariantUnderPermutationAndDuplicates) {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 300; ++t) {
    auto g = random_set(rng);
    const double base = min_norm_point(g).distance;
    auto h = g;
    std::shuffle(h.points.begin(), h.points.end(), rng);
    std::shuffle(h.rays.begin(), h.rays.end(), rng);
    std::shuffle(h.lines.begin(), h.lines.end(), rng);
    h.points.push_back(h.points.front());
    if (!h.rays.empty()) h.rays.push_back(h.rays.back());
    if (!h.lines.empty()) h.lines.push_back(2.0 * h.lines.front());
    EXPECT_NEAR(min_norm_point(h).distance, base, 1e-10 * std::max(1.0, base));
  }
}

TEST(MinNorm, SpanElimination) {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 300; ++t) {
    auto g = random_set(rng);
    if (g.lines.empty()) continue;
    const Eigen::MatrixXd q = detail::span_basis(g.lines, g.d);
    const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(g.d, g.d) - q * q.transpose();
    GeneratorSet reduced;
    reduced.d = g.d;
    for (const auto& p : g.points) reduced.points.push_back(proj * p);
    for (const auto& r : g.rays) reduced.rays.push_back(proj * r);
    const double base = min_norm_point(g).distance;
    EXPECT_NEAR(min_norm_point(reduced).distance, base, 1e-10 * std::max(1.0, base));
  }
}

TEST(MinNorm, AgreesWithProjectedGradient) {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 40; ++t) {
    const auto g = random_set(rng);
    const double r = min_norm_point(g).distance;
    EXPECT_NEAR(oracle::projected_gradient_min_norm(g), r, 1e-6 * (1 + r));
  }
}
