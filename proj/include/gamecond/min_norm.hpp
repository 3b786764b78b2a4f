#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gamecond/errors.hpp"

namespace gamecond {

/// co(points) + span(lines) + cone(rays) in R^d. A "minus cone" such as
/// -cone{e_j} is stored by negating the ray generators.
struct GeneratorSet {
  Eigen::Index d = 0;
  std::vector<Eigen::VectorXd> points;
  std::vector<Eigen::VectorXd> lines;
  std::vector<Eigen::VectorXd> rays;

  void validate() const {
    auto check = [this](const std::vector<Eigen::VectorXd>& gens) {
      for (const auto& g : gens) {
        if (g.size() != d) {
          throw Error(ErrorKind::DimensionMismatch, "generator has wrong dimension");
        }
        if (!g.allFinite()) throw Error(ErrorKind::InvalidArgument, "generator is not finite");
      }
    };
    check(points);
    check(lines);
    check(rays);
  }
};

struct MinNormResult {
  double distance = 0.0;
  /// The minimizer  sum lambda_i p_i + sum alpha_l l_l + sum mu_r r_r.
  Eigen::VectorXd point;
  Eigen::VectorXd lambda;  // convex weights on points
  Eigen::VectorXd alpha;   // free coefficients on lines
  Eigen::VectorXd mu;      // nonnegative weights on rays
  int iterations = 0;
};

/// Reassembles sum lambda p + sum alpha l + sum mu r.
inline Eigen::VectorXd combine(const GeneratorSet& g, const Eigen::VectorXd& lambda,
                               const Eigen::VectorXd& alpha, const Eigen::VectorXd& mu) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(g.d);
  for (std::size_t i = 0; i < g.points.size(); ++i) x += lambda(static_cast<Eigen::Index>(i)) * g.points[i];
  for (std::size_t i = 0; i < g.lines.size(); ++i) x += alpha(static_cast<Eigen::Index>(i)) * g.lines[i];
  for (std::size_t i = 0; i < g.rays.size(); ++i) x += mu(static_cast<Eigen::Index>(i)) * g.rays[i];
  return x;
}

/// Largest violation of the optimality conditions for the witness in `r`:
/// x orthogonal to lines, x.p_i >= x.(sum lambda p) for every point,
/// x.r >= 0 for every ray, and mu_r > 0 only where x.r = 0.
/// Inner products with points and rays are normalized by generator length.
inline double min_norm_kkt_residual(const GeneratorSet& g, const MinNormResult& r) {
  const Eigen::VectorXd& x = r.point;
  double worst = 0.0;
  for (const auto& l : g.lines) {
    const double len = l.norm();
    if (len > 0.0) worst = std::max(worst, std::abs(x.dot(l)) / len);
  }
  Eigen::VectorXd hull = Eigen::VectorXd::Zero(g.d);
  for (std::size_t i = 0; i < g.points.size(); ++i) hull += r.lambda(static_cast<Eigen::Index>(i)) * g.points[i];
  const double base = x.dot(hull);
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    const double len = std::max(1.0, (g.points[i] - hull).norm());
    worst = std::max(worst, (base - x.dot(g.points[i])) / len);
  }
  for (std::size_t i = 0; i < g.rays.size(); ++i) {
    const double len = g.rays[i].norm();
    if (len == 0.0) continue;
    const double s = x.dot(g.rays[i]) / len;
    worst = std::max(worst, -s);
    if (r.mu(static_cast<Eigen::Index>(i)) > 0.0) worst = std::max(worst, std::abs(s));
  }
  return worst;
}

namespace detail {

/// Orthonormal basis of span(lines), rank-revealing.
inline Eigen::MatrixXd span_basis(const std::vector<Eigen::VectorXd>& lines, Eigen::Index d) {
  if (lines.empty()) return Eigen::MatrixXd(d, 0);
  Eigen::MatrixXd l(d, static_cast<Eigen::Index>(lines.size()));
  for (std::size_t i = 0; i < lines.size(); ++i) l.col(static_cast<Eigen::Index>(i)) = lines[i];
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(l);
  qr.setThreshold(1e-12);
  const Eigen::Index rank = qr.rank();
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, rank);
  return q;
}

struct Atom {
  bool is_point;
  std::size_t index;
};

}  // namespace detail

/// Nearest point to the origin in co(points) + span(lines) + cone(rays).
///
/// The span part is removed by orthogonal projection onto its complement.
/// The remaining problem is solved by Wolfe's corral iteration with rays
/// allowed to join the corral as generators with unbounded nonnegative
/// weight (they do not count toward the convex-weight sum).
inline MinNormResult min_norm_point(const GeneratorSet& g) {
  if (g.points.empty()) throw Error(ErrorKind::NoPoints, "generator set has no points");
  g.validate();
  const Eigen::Index d = g.d;
  const Eigen::MatrixXd basis = detail::span_basis(g.lines, d);
  auto reduce = [&basis](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    if (basis.cols() == 0) return v;
    return v - basis * (basis.transpose() * v);
  };

  std::vector<Eigen::VectorXd> pts;
  pts.reserve(g.points.size());
  double scale = 0.0;
  for (const auto& p : g.points) {
    pts.push_back(reduce(p));
    scale = std::max(scale, pts.back().norm());
  }
  // Rays are kept at unit length; weights are rescaled on output.
  std::vector<Eigen::VectorXd> rays;
  std::vector<double> ray_len;
  for (const auto& r : g.rays) {
    Eigen::VectorXd rr = reduce(r);
    const double len = rr.norm();
    ray_len.push_back(len);
    rays.push_back(len > 1e-14 * std::max(1.0, r.norm()) ? Eigen::VectorXd(rr / len)
                                                       : Eigen::VectorXd::Zero(d));
  }
  scale = std::max(scale, 1.0);
  const double tol = 1e-14 * scale * scale;

  auto vec_of = [&](const detail::Atom& a) -> const Eigen::VectorXd& {
    return a.is_point ? pts[a.index] : rays[a.index];
  };

  // Start at the shortest point.
  std::size_t start = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].squaredNorm() < pts[start].squaredNorm()) start = i;
  }
  std::vector<detail::Atom> corral{{true, start}};
  std::vector<double> weight{1.0};
  Eigen::VectorXd x = pts[start];

  auto current = [&]() {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < corral.size(); ++i) s += weight[i] * vec_of(corral[i]);
    return s;
  };

  // Minimizer of |sum theta_a v_a| over the affine hull of corral points plus
  // the span of corral rays (point weights sum to one, no sign constraints).
  auto affine_minimizer = [&](std::vector<double>& theta) {
    std::size_t anchor = corral.size();
    for (std::size_t i = 0; i < corral.size(); ++i) {
      if (corral[i].is_point) {
        anchor = i;
        break;
      }
    }
    const Eigen::VectorXd& p0 = vec_of(corral[anchor]);
    Eigen::MatrixXd dirs(d, std::max<Eigen::Index>(0, static_cast<Eigen::Index>(corral.size()) - 1));
    Eigen::Index c = 0;
    for (std::size_t i = 0; i < corral.size(); ++i) {
      if (i == anchor) continue;
      dirs.col(c++) = corral[i].is_point ? Eigen::VectorXd(vec_of(corral[i]) - p0)
                                         : vec_of(corral[i]);
    }
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(dirs.cols());
    if (dirs.cols() > 0) {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(dirs);
      cod.setThreshold(1e-12);
      coef = cod.solve(-p0);
    }
    theta.assign(corral.size(), 0.0);
    double point_sum = 0.0;
    c = 0;
    for (std::size_t i = 0; i < corral.size(); ++i) {
      if (i == anchor) continue;
      theta[i] = coef(c++);
      if (corral[i].is_point) point_sum += theta[i];
    }
    theta[anchor] = 1.0 - point_sum;
  };

  const int max_major = 50 * static_cast<int>(pts.size() + rays.size()) + 100;
  int iterations = 0;
  for (; iterations < max_major; ++iterations) {
    // Most violated optimality condition.
    const double xx = x.squaredNorm();
    double best = -tol;
    detail::Atom enter{true, 0};
    bool found = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double gap = x.dot(pts[i]) - xx;
      if (gap < best) {
        best = gap;
        enter = {true, i};
        found = true;
      }
    }
    for (std::size_t i = 0; i < rays.size(); ++i) {
      if (ray_len[i] == 0.0) continue;
      const double gap = x.dot(rays[i]) * scale;
      if (gap < best) {
        best = gap;
        enter = {false, i};
        found = true;
      }
    }
    if (!found) break;
    const bool already = std::any_of(corral.begin(), corral.end(), [&](const detail::Atom& a) {
      return a.is_point == enter.is_point && a.index == enter.index;
    });
    if (already) break;
    corral.push_back(enter);
    weight.push_back(0.0);

    // Minor cycles.
    std::vector<double> theta;
    for (int minor = 0; minor < static_cast<int>(corral.size()) + 2; ++minor) {
      affine_minimizer(theta);
      const double wtol = 1e-13;
      bool interior = true;
      for (double t : theta) interior = interior && t > wtol;
      if (interior) {
        weight = theta;
        break;
      }
      double beta = 1.0;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        if (theta[i] <= wtol && weight[i] - theta[i] > 0.0) {
          beta = std::min(beta, weight[i] / (weight[i] - theta[i]));
        }
      }
      for (std::size_t i = 0; i < corral.size(); ++i) {
        weight[i] = (1.0 - beta) * weight[i] + beta * theta[i];
      }
      // Drop atoms at zero weight, keeping at least one point.
      std::vector<detail::Atom> kept;
      std::vector<double> kept_w;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        if (weight[i] > wtol) {
          kept.push_back(corral[i]);
          kept_w.push_back(weight[i]);
        }
      }
      const bool has_point = std::any_of(kept.begin(), kept.end(),
                                         [](const detail::Atom& a) { return a.is_point; });
      if (!has_point) {
        // Numerical corner: retain the heaviest point.
        std::size_t heaviest = corral.size();
        for (std::size_t i = 0; i < corral.size(); ++i) {
          if (corral[i].is_point && (heaviest == corral.size() || weight[i] > weight[heaviest])) {
            heaviest = i;
          }
        }
        kept.push_back(corral[heaviest]);
        kept_w.push_back(1.0);
      }
      corral = std::move(kept);
      weight = std::move(kept_w);
    }
    // Renormalize point weights to sum exactly to one.
    double point_sum = 0.0;
    for (std::size_t i = 0; i < corral.size(); ++i) {
      if (corral[i].is_point) point_sum += weight[i];
    }
    for (std::size_t i = 0; i < corral.size(); ++i) {
      if (corral[i].is_point) weight[i] /= point_sum;
    }
    const Eigen::VectorXd next = current();
    const double progress = xx - next.squaredNorm();
    if (progress <= 1e-15 * std::max(xx, tol)) {
      // Numerical stall; keep the better of the two iterates.
      if (progress > 0.0) x = next;
      break;
    }
    x = next;
  }

  MinNormResult result;
  result.iterations = iterations;
  result.lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.points.size()));
  result.mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.rays.size()));
  for (std::size_t i = 0; i < corral.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(corral[i].index);
    if (corral[i].is_point) {
      result.lambda(idx) = weight[i];
    } else {
      result.mu(idx) = weight[i] / ray_len[corral[i].index];
    }
  }
  // Recover span coefficients for the unreduced generators.
  result.alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.lines.size()));
  Eigen::VectorXd partial = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < g.points.size(); ++i) partial += result.lambda(static_cast<Eigen::Index>(i)) * g.points[i];
  for (std::size_t i = 0; i < g.rays.size(); ++i) partial += result.mu(static_cast<Eigen::Index>(i)) * g.rays[i];
  if (!g.lines.empty()) {
    Eigen::MatrixXd l(d, static_cast<Eigen::Index>(g.lines.size()));
    for (std::size_t i = 0; i < g.lines.size(); ++i) l.col(static_cast<Eigen::Index>(i)) = g.lines[i];
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(l);
    result.alpha = cod.solve(-partial);
  }
  result.point = combine(g, result.lambda, result.alpha, result.mu);
  result.distance = result.point.norm();
  return result;
}

}  // namespace gamecond
