#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <functional>
#include <vector>

#include "vkr/constraints.hpp"

namespace vkr {

struct NewtonOptions {
  double tol = 1e-9;  // converged when |Pg| <= tol * (1 + |f|)
  int max_iters = 200;
  double armijo_c = 1e-4;
  double step_shrink = 0.5;
  int max_linesearch = 60;
};

struct NewtonOutcome {
  Eigen::VectorXd x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> f_history;  // accepted values, monotone
};

// Damped Newton descent with monotone Armijo backtracking on the constraint
// manifold {C x = 0}. Indefinite or rank-deficient Hessians are handled by
// Levenberg damping of the diagonal; the line search copes with the
// measure-zero kinks of the relaxed density.
inline NewtonOutcome newton_minimize(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>& fg,
    const std::function<Eigen::SparseMatrix<double>(const Eigen::VectorXd&)>&
        hessian,
    const Eigen::MatrixXd& rows, Eigen::VectorXd x0,
    const NewtonOptions& opt = {}) {
  NewtonOutcome out;
  const Projector proj(rows);
  Eigen::VectorXd x = std::move(x0);
  proj.apply(x);
  Eigen::VectorXd g(x.size());
  double f = fg(x, &g);
  proj.apply(g);
  out.f_history.push_back(f);

  double mu = 0.0;
  for (int iter = 0; iter < opt.max_iters; ++iter) {
    out.iterations = iter;
    if (g.norm() <= opt.tol * (1.0 + std::abs(f))) {
      out.converged = true;
      break;
    }

    Eigen::SparseMatrix<double> h = hessian(x);
    double diag_scale = 0.0;
    for (int i = 0; i < h.rows(); ++i) diag_scale += std::abs(h.coeff(i, i));
    diag_scale = std::max(diag_scale / std::max<int>(1, h.rows()), 1e-12);

    Eigen::VectorXd d;
    double gd = 0.0;
    bool have_direction = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::SparseMatrix<double> hd = h;
      if (mu > 0.0) {
        Eigen::SparseMatrix<double> eye(h.rows(), h.cols());
        eye.setIdentity();
        hd = h + mu * diag_scale * eye;
      }
      try {
        const KktOperator kkt(hd, rows);
        d = kkt.solve(-g);
        proj.apply(d);
        gd = g.dot(d);
        if (gd < -1e-14 * g.norm() * d.norm()) {
          have_direction = true;
          break;
        }
      } catch (const SolveError&) {
        // singular; increase damping and retry
      }
      mu = (mu == 0.0) ? 1e-6 : mu * 10.0;
      if (mu > 1e12) break;
    }
    if (!have_direction) {
      d = -g;
      gd = -g.squaredNorm();
    }

    double step = 1.0;
    Eigen::VectorXd x_new, g_new(x.size());
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < opt.max_linesearch; ++ls) {
      x_new = x + step * d;
      f_new = fg(x_new, &g_new);
      if (std::isfinite(f_new) && f_new <= f + opt.armijo_c * step * gd) {
        accepted = true;
        break;
      }
      step *= opt.step_shrink;
    }
    if (!accepted) break;

    if (step == 1.0)
      mu *= 0.25;
    else if (step < 0.1)
      mu = (mu == 0.0) ? 1e-6 : mu * 4.0;
    if (mu < 1e-10) mu = 0.0;

    proj.apply(g_new);
    x = std::move(x_new);
    g = g_new;
    f = f_new;
    out.f_history.push_back(f);
  }

  if (!out.converged && g.norm() <= opt.tol * (1.0 + std::abs(f)))
    out.converged = true;
  out.x = std::move(x);
  out.f = f;
  out.grad_norm = g.norm();
  return out;
}

}  // namespace vkr
