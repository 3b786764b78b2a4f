#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "gamecond/errors.hpp"
#include "gamecond/linprog.hpp"

namespace gamecond {

/// Euclidean projection onto the probability simplex (sort and threshold).
inline Eigen::VectorXd project_onto_simplex(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw Error(ErrorKind::EmptyVector, "cannot project an empty vector");
  if (!v.allFinite()) throw Error(ErrorKind::InvalidArgument, "vector is not finite");
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  Eigen::VectorXd u = (v.array() - theta).cwiseMax(0.0).matrix();
  // Renormalize the support to remove rounding drift in the sum.
  const double total = u.sum();
  if (total > 0.0) u /= total;
  return u;
}

struct ProjectionResult {
  Eigen::VectorXd point;
  double distance = 0.0;
  /// Multipliers for the equality rows and inequality rows (>= 0), with
  /// v - point = eq_a' eq_mult + ineq_a' ineq_mult.
  Eigen::VectorXd eq_mult;
  Eigen::VectorXd ineq_mult;
  double kkt_residual = 0.0;
  int iterations = 0;
};

namespace detail {

/// Rows of a working set, each tagged as equality or inequality index.
struct WorkingRow {
  bool equality;
  Eigen::Index index;
};

inline Eigen::MatrixXd stack_rows(const Polyhedron& poly, const std::vector<WorkingRow>& set) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(set.size()), poly.dim());
  for (std::size_t r = 0; r < set.size(); ++r) {
    a.row(static_cast<Eigen::Index>(r)) =
        set[r].equality ? poly.eq_a().row(set[r].index) : poly.ineq_a().row(set[r].index);
  }
  return a;
}

inline Eigen::VectorXd stack_rhs(const Polyhedron& poly, const std::vector<WorkingRow>& set) {
  Eigen::VectorXd b(static_cast<Eigen::Index>(set.size()));
  for (std::size_t r = 0; r < set.size(); ++r) {
    b(static_cast<Eigen::Index>(r)) =
        set[r].equality ? poly.eq_b()(set[r].index) : poly.ineq_b()(set[r].index);
  }
  return b;
}

inline Eigen::Index row_rank(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
  qr.setThreshold(1e-10);
  return qr.rank();
}

}  // namespace detail

/// Euclidean projection of v onto a nonempty polyhedron: a primal active-set
/// method started from a vertex found by the simplex feasibility phase.
inline ProjectionResult project_onto_polyhedron(const Eigen::VectorXd& v, const Polyhedron& poly) {
  const Eigen::Index d = poly.dim();
  if (v.size() != d) throw Error(ErrorKind::DimensionMismatch, "point has wrong dimension");
  const Eigen::Index q = poly.num_equalities();
  const Eigen::Index p = poly.num_inequalities();
  const double scale = 1.0 + v.cwiseAbs().maxCoeff();
  const double feas_tol = 1e-12 * scale;

  ProjectionResult result;
  result.eq_mult = Eigen::VectorXd::Zero(q);
  result.ineq_mult = Eigen::VectorXd::Zero(p);

  if (poly.residual(v) <= feas_tol) {
    result.point = v;
    return result;
  }

  Eigen::VectorXd w;
  try {
    w = lp_solve(Eigen::VectorXd::Zero(d), poly).solution;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Infeasible) {
      throw Error(ErrorKind::InfeasiblePolyhedron, "cannot project onto an empty polyhedron");
    }
    throw;
  }

  std::vector<detail::WorkingRow> working;
  auto try_add = [&](detail::WorkingRow row) {
    working.push_back(row);
    if (detail::row_rank(detail::stack_rows(poly, working)) <
        static_cast<Eigen::Index>(working.size())) {
      working.pop_back();
      return false;
    }
    return true;
  };
  for (Eigen::Index r = 0; r < q; ++r) try_add({true, r});
  for (Eigen::Index r = 0; r < p; ++r) {
    if (std::abs(poly.ineq_a().row(r).dot(w) - poly.ineq_b()(r)) <= 1e-9 * scale) {
      try_add({false, r});
    }
  }

  const int max_iter = 100 * static_cast<int>(d + q + p) + 100;
  Eigen::VectorXd mult;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    const Eigen::MatrixXd a = detail::stack_rows(poly, working);
    const Eigen::VectorXd b = detail::stack_rhs(poly, working);
    Eigen::VectorXd target;
    if (a.rows() == 0) {
      target = v;
    } else {
      const Eigen::MatrixXd gram = a * a.transpose();
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
      target = v - a.transpose() * ldlt.solve(a * v - b);
    }
    const Eigen::VectorXd step = target - w;
    if (step.norm() <= 1e-13 * scale) {
      if (a.rows() > 0) {
        const Eigen::MatrixXd gram = a * a.transpose();
        mult = gram.ldlt().solve(a * (v - target));
      } else {
        mult.resize(0);
      }
      w = target;
      Eigen::Index drop = -1;
      double most_negative = -1e-12 * scale;
      for (std::size_t r = 0; r < working.size(); ++r) {
        const double lam = mult(static_cast<Eigen::Index>(r));
        if (!working[r].equality && lam < most_negative) {
          most_negative = lam;
          drop = static_cast<Eigen::Index>(r);
        }
      }
      if (drop < 0) break;
      working.erase(working.begin() + drop);
      continue;
    }
    double alpha = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index r = 0; r < p; ++r) {
      const bool in_set = std::any_of(working.begin(), working.end(), [r](const auto& row) {
        return !row.equality && row.index == r;
      });
      if (in_set) continue;
      const double rate = poly.ineq_a().row(r).dot(step);
      if (rate > 1e-14 * scale) {
        const double room = std::max(0.0, poly.ineq_b()(r) - poly.ineq_a().row(r).dot(w));
        const double t = room / rate;
        if (t < alpha) {
          alpha = t;
          blocking = r;
        }
      }
    }
    w += alpha * step;
    if (blocking >= 0) try_add({false, blocking});
  }

  result.point = w;
  result.distance = (v - w).norm();
  result.iterations = iter;
  for (std::size_t r = 0; r < working.size(); ++r) {
    const double lam = mult.size() > 0 ? mult(static_cast<Eigen::Index>(r)) : 0.0;
    if (working[r].equality) {
      result.eq_mult(working[r].index) = lam;
    } else {
      result.ineq_mult(working[r].index) = lam;
    }
  }
  Eigen::VectorXd stationarity = v - w;
  if (q > 0) stationarity -= poly.eq_a().transpose() * result.eq_mult;
  if (p > 0) stationarity -= poly.ineq_a().transpose() * result.ineq_mult;
  double kkt = stationarity.cwiseAbs().maxCoeff();
  if (p > 0) {
    kkt = std::max(kkt, -result.ineq_mult.minCoeff());
    // complementary slackness
    const Eigen::VectorXd slack = poly.ineq_b() - poly.ineq_a() * w;
    kkt = std::max(kkt, (result.ineq_mult.array() * slack.array()).abs().maxCoeff());
  }
  result.kkt_residual = std::max({kkt, poly.residual(w), 0.0});
  return result;
}

}  // namespace gamecond
