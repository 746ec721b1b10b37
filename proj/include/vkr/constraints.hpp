#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "vkr/errors.hpp"

namespace vkr {

enum class Bc { kFree, kZeroAverage, kClamped };

// Reduced view of a DOF vector: clamped and inactive DOFs removed, plus
// homogeneous linear rows (zero-average conditions) on the remaining ones.
struct ReducedSystem {
  std::vector<int> full_of_red;  // reduced index -> full index
  Eigen::MatrixXd rows;          // m x n_reduced constraint rows

  int n_reduced() const { return static_cast<int>(full_of_red.size()); }

  Eigen::VectorXd gather(const Eigen::VectorXd& full) const {
    Eigen::VectorXd r(n_reduced());
    for (int i = 0; i < n_reduced(); ++i) r[i] = full[full_of_red[i]];
    return r;
  }

  void scatter(const Eigen::VectorXd& red, Eigen::VectorXd* full) const {
    for (int i = 0; i < n_reduced(); ++i) (*full)[full_of_red[i]] = red[i];
  }
};

// Orthogonal projector onto ker(rows); identity when there are no rows.
class Projector {
 public:
  explicit Projector(const Eigen::MatrixXd& rows) : c_(rows) {
    if (c_.rows() > 0) {
      const Eigen::MatrixXd cct = c_ * c_.transpose();
      llt_.compute(cct);
      if (llt_.info() != Eigen::Success)
        throw SolveError("Projector: constraint rows are rank deficient");
    }
  }

  void apply(Eigen::VectorXd& v) const {
    if (c_.rows() == 0) return;
    v -= c_.transpose() * llt_.solve(c_ * v);
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& v) const {
    if (c_.rows() == 0) return Eigen::VectorXd::Zero(0);
    return c_ * v;
  }

 private:
  Eigen::MatrixXd c_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

// Factored bordered KKT system for min 1/2 x^T K x - f^T x with C x = 0.
// Throws SolveError when the constrained system is singular (insufficient
// constraints). Also serves as the initial inverse-Hessian operator of the
// quasi-Newton solvers.
class KktOperator {
 public:
  KktOperator(const Eigen::SparseMatrix<double>& k,
              const Eigen::MatrixXd& rows);
  ~KktOperator();
  KktOperator(KktOperator&&) noexcept;

  // x-part of the KKT solution with right-hand side (f, 0).
  Eigen::VectorXd solve(const Eigen::VectorXd& f) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_ = 0;
  int m_ = 0;
};

inline Eigen::VectorXd solve_constrained_spd(
    const Eigen::SparseMatrix<double>& k, const Eigen::MatrixXd& rows,
    const Eigen::VectorXd& f) {
  return KktOperator(k, rows).solve(f);
}

}  // namespace vkr
