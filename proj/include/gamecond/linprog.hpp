#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gamecond/errors.hpp"

namespace gamecond {

/// H-description {w : eq_a w = eq_b, ineq_a w <= ineq_b} in dimension dim().
/// No implicit sign constraints: nonnegativity is written as -w_j <= 0.
class Polyhedron {
 public:
  explicit Polyhedron(Eigen::Index dim = 0)
      : eq_a_(0, dim), eq_b_(0), ineq_a_(0, dim), ineq_b_(0) {}

  Eigen::Index dim() const noexcept { return eq_a_.cols(); }
  Eigen::Index num_equalities() const noexcept { return eq_a_.rows(); }
  Eigen::Index num_inequalities() const noexcept { return ineq_a_.rows(); }

  const Eigen::MatrixXd& eq_a() const noexcept { return eq_a_; }
  const Eigen::VectorXd& eq_b() const noexcept { return eq_b_; }
  const Eigen::MatrixXd& ineq_a() const noexcept { return ineq_a_; }
  const Eigen::VectorXd& ineq_b() const noexcept { return ineq_b_; }

  Polyhedron& add_equality(const Eigen::VectorXd& a, double b) {
    append(eq_a_, eq_b_, a, b);
    return *this;
  }

  Polyhedron& add_inequality(const Eigen::VectorXd& a, double b) {
    append(ineq_a_, ineq_b_, a, b);
    return *this;
  }

  /// w_j >= 0 for the listed coordinates.
  Polyhedron& add_nonnegative(Eigen::Index j) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(dim());
    a(j) = -1.0;
    return add_inequality(a, 0.0);
  }

  /// sum of w over [offset, offset + len) equals 1.
  Polyhedron& add_unit_sum(Eigen::Index offset, Eigen::Index len) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(dim());
    a.segment(offset, len).setOnes();
    return add_equality(a, 1.0);
  }

  /// Largest constraint violation at w.
  double residual(const Eigen::VectorXd& w) const {
    double r = 0.0;
    if (num_equalities() > 0) r = (eq_a_ * w - eq_b_).cwiseAbs().maxCoeff();
    if (num_inequalities() > 0) r = std::max(r, (ineq_a_ * w - ineq_b_).maxCoeff());
    return std::max(r, 0.0);
  }

 private:
  void append(Eigen::MatrixXd& a_mat, Eigen::VectorXd& b_vec, const Eigen::VectorXd& a,
              double b) {
    if (a.size() != dim()) {
      throw Error(ErrorKind::DimensionMismatch, "constraint row has wrong dimension");
    }
    if (!a.allFinite() || !std::isfinite(b)) {
      throw Error(ErrorKind::InvalidArgument, "constraint row is not finite");
    }
    a_mat.conservativeResize(a_mat.rows() + 1, Eigen::NoChange);
    a_mat.row(a_mat.rows() - 1) = a.transpose();
    b_vec.conservativeResize(b_vec.size() + 1);
    b_vec(b_vec.size() - 1) = b;
  }

  Eigen::MatrixXd eq_a_;
  Eigen::VectorXd eq_b_;
  Eigen::MatrixXd ineq_a_;
  Eigen::VectorXd ineq_b_;
};

enum class Sense { minimize, maximize };

/// Optimal vertex plus a dual certificate. Duals refer to the minimization
/// form min s*c'w (s = -1 for maximize): s*c + eq_a' eq_dual + ineq_a' ineq_dual = 0
/// with ineq_dual >= 0.
struct LpResult {
  double optimum = 0.0;
  Eigen::VectorXd solution;
  Eigen::VectorXd eq_dual;
  Eigen::VectorXd ineq_dual;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
  int pivots = 0;
};

namespace detail {

/// Dense two-phase tableau simplex on  min c'z, M z = r, z >= 0, r >= 0.
/// Bland's rule for both entering and leaving choices.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& m_mat, const Eigen::VectorXd& r,
          std::vector<int> initial_basis)
      : rows_(m_mat.rows()),
        cols_(m_mat.cols()),
        t_(m_mat.rows() + 1, m_mat.cols() + 1),
        basis_(std::move(initial_basis)),
        initial_basis_(basis_) {
    t_.topLeftCorner(rows_, cols_) = m_mat;
    t_.topRightCorner(rows_, 1) = r;
    t_.row(rows_).setZero();
    scale_ = std::max(1.0, m_mat.cwiseAbs().maxCoeff());
    pivot_tol_ = 1e-11 * scale_;
  }

  /// Sets reduced costs for objective c (size cols_) given the current basis.
  void set_objective(const Eigen::VectorXd& c) {
    cost_ = c;
    t_.row(rows_).head(cols_) = c.transpose();
    t_(rows_, cols_) = 0.0;
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const double cb = c(basis_[r]);
      if (cb != 0.0) t_.row(rows_) -= cb * t_.row(r);
    }
  }

  enum class Outcome { optimal, unbounded, stalled };

  /// Columns >= allowed_cols never enter.
  Outcome run(Eigen::Index allowed_cols, int max_pivots) {
    const double cost_tol = 1e-11 * std::max(1.0, cost_.cwiseAbs().maxCoeff()) * scale_;
    while (pivots_ < max_pivots) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed_cols; ++j) {
        if (t_(rows_, j) < -cost_tol && !is_basic(j)) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return Outcome::optimal;
      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < rows_; ++r) {
        const double a = t_(r, enter);
        if (a > pivot_tol_) {
          const double ratio = std::max(0.0, t_(r, cols_)) / a;
          const double band = 1e-14 * std::max(1.0, ratio);
          if (leave < 0 || ratio < best_ratio - band ||
              (ratio <= best_ratio + band && basis_[r] < basis_[leave])) {
            best_ratio = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return Outcome::unbounded;
      pivot(leave, enter);
    }
    return Outcome::stalled;
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i <= rows_; ++i) {
      if (i != r) {
        const double f = t_(i, c);
        if (f != 0.0) t_.row(i) -= f * t_.row(r);
      }
    }
    t_(r, c) = 1.0;
    basis_[r] = static_cast<int>(c);
    ++pivots_;
  }

  /// Pivots basic columns >= first_artificial out of the basis where a
  /// structural replacement exists. Rows with no replacement are redundant.
  void expel(Eigen::Index first_artificial) {
    for (Eigen::Index r = 0; r < rows_; ++r) {
      if (basis_[r] < first_artificial) continue;
      for (Eigen::Index j = 0; j < first_artificial; ++j) {
        if (!is_basic(j) && std::abs(t_(r, j)) > 1e-9 * scale_) {
          pivot(r, j);
          break;
        }
      }
    }
  }

  bool is_basic(Eigen::Index j) const {
    return std::find(basis_.begin(), basis_.end(), static_cast<int>(j)) != basis_.end();
  }

  double objective_value() const { return -t_(rows_, cols_); }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(cols_);
    for (Eigen::Index r = 0; r < rows_; ++r) z(basis_[r]) = t_(r, cols_);
    return z;
  }

  /// Row duals y = c_B' B^-1 recovered from the reduced costs of the columns
  /// that formed the initial identity basis.
  Eigen::VectorXd duals() const {
    Eigen::VectorXd y(rows_);
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const int col = initial_basis_[r];
      y(r) = cost_(col) - t_(rows_, col);
    }
    return y;
  }

  int pivots() const noexcept { return pivots_; }

 private:
  Eigen::Index rows_;
  Eigen::Index cols_;
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
  std::vector<int> initial_basis_;
  Eigen::VectorXd cost_;
  double scale_ = 1.0;
  double pivot_tol_ = 1e-11;
  int pivots_ = 0;
};

}  // namespace detail

/// Dense simplex method for small linear programs over a Polyhedron with
/// free variables. Throws Error{Infeasible} or Error{Unbounded}.
inline LpResult lp_solve(const Eigen::VectorXd& objective, const Polyhedron& poly,
                         Sense sense = Sense::minimize) {
  const Eigen::Index d = poly.dim();
  if (objective.size() != d) {
    throw Error(ErrorKind::DimensionMismatch, "objective has wrong dimension");
  }
  const Eigen::Index q = poly.num_equalities();
  const Eigen::Index p = poly.num_inequalities();
  const Eigen::Index rows = q + p;
  const double sgn = sense == Sense::minimize ? 1.0 : -1.0;
  const Eigen::VectorXd c = sgn * objective;

  // Columns: w+ (d), w- (d), slacks (p), artificials (as needed).
  std::vector<double> row_sign(static_cast<std::size_t>(rows), 1.0);
  Eigen::Index num_art = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double rhs = r < q ? poly.eq_b()(r) : poly.ineq_b()(r - q);
    if (rhs < 0.0) row_sign[r] = -1.0;
    if (r < q || rhs < 0.0) ++num_art;
  }
  const Eigen::Index first_art = 2 * d + p;
  const Eigen::Index cols = first_art + num_art;
  Eigen::MatrixXd m_mat = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::VectorXd rhs(rows);
  std::vector<int> basis(static_cast<std::size_t>(rows));
  Eigen::Index art = first_art;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double s = row_sign[r];
    const bool is_eq = r < q;
    const Eigen::RowVectorXd a = is_eq ? Eigen::RowVectorXd(poly.eq_a().row(r))
                                       : Eigen::RowVectorXd(poly.ineq_a().row(r - q));
    m_mat.row(r).head(d) = s * a;
    m_mat.row(r).segment(d, d) = -s * a;
    rhs(r) = s * (is_eq ? poly.eq_b()(r) : poly.ineq_b()(r - q));
    if (!is_eq) m_mat(r, 2 * d + (r - q)) = s;
    if (is_eq || s < 0.0) {
      m_mat(r, art) = 1.0;
      basis[r] = static_cast<int>(art);
      ++art;
    } else {
      basis[r] = static_cast<int>(2 * d + (r - q));
    }
  }

  detail::Tableau tableau(m_mat, rhs, basis);
  const int max_pivots = 50 * static_cast<int>(rows + cols) + 1000;
  const double rhs_scale = 1.0 + (rows > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0);

  if (num_art > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
    phase1.tail(num_art).setOnes();
    tableau.set_objective(phase1);
    if (tableau.run(cols, max_pivots) == detail::Tableau::Outcome::stalled) {
      throw Error(ErrorKind::Infeasible, "simplex phase one did not terminate");
    }
    if (tableau.objective_value() > 1e-9 * rhs_scale) {
      throw Error(ErrorKind::Infeasible, "linear program is infeasible");
    }
    tableau.expel(first_art);
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(cols);
  phase2.head(d) = c;
  phase2.segment(d, d) = -c;
  tableau.set_objective(phase2);
  const auto outcome = tableau.run(first_art, max_pivots);
  if (outcome == detail::Tableau::Outcome::unbounded) {
    throw Error(ErrorKind::Unbounded, "linear program is unbounded");
  }
  if (outcome == detail::Tableau::Outcome::stalled) {
    throw Error(ErrorKind::Infeasible, "simplex phase two did not terminate");
  }

  const Eigen::VectorXd z = tableau.primal();
  LpResult result;
  result.solution = z.head(d) - z.segment(d, d);
  result.pivots = tableau.pivots();

  Eigen::VectorXd y = tableau.duals();
  for (Eigen::Index r = 0; r < rows; ++r) y(r) *= row_sign[r];
  // Standard form duals satisfy c = E'y_E + G'y_G, y_G <= 0.
  result.eq_dual = -y.head(q);
  result.ineq_dual = -y.tail(p);

  result.optimum = objective.dot(result.solution);
  result.primal_residual = poly.residual(result.solution);
  Eigen::VectorXd stationarity = c;
  if (q > 0) stationarity += poly.eq_a().transpose() * result.eq_dual;
  if (p > 0) stationarity += poly.ineq_a().transpose() * result.ineq_dual;
  double dual_res = d > 0 ? stationarity.cwiseAbs().maxCoeff() : 0.0;
  if (p > 0) dual_res = std::max(dual_res, -result.ineq_dual.minCoeff());
  result.dual_residual = std::max(0.0, dual_res);
  double dual_objective = 0.0;
  if (q > 0) dual_objective -= result.eq_dual.dot(poly.eq_b());
  if (p > 0) dual_objective -= result.ineq_dual.dot(poly.ineq_b());
  result.duality_gap = std::abs(c.dot(result.solution) - dual_objective);
  return result;
}

}  // namespace gamecond
