#include "vkr/quadform.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace vkr {

namespace {

constexpr double kDegenerateTol = 1e-12;

void check_symmetric(const Eigen::MatrixXd& m, const char* what) {
  const double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale))
    throw Error(std::string(what) + ": representation is not symmetric");
}

}  // namespace

QuadForm2::QuadForm2(const Eigen::Matrix3d& rep) {
  check_symmetric(rep, "QuadForm2");
  rep_ = 0.5 * (rep + rep.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(rep_);
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(es.eigenvalues().minCoeff() > kDegenerateTol * lmax))
    throw Error("QuadForm2: representation is not positive definite");

  const Eigen::Matrix3d& r = rep_;
  // Q1: minimize over the 22-entry (Voigt index 1), keeping (kappa, sqrt2 tau).
  Eigen::Matrix2d a;
  a << r(0, 0), r(0, 2), r(2, 0), r(2, 2);
  Eigen::Vector2d b(r(0, 1), r(2, 1));
  const Eigen::Matrix2d schur = a - b * b.transpose() / r(1, 1);
  // Convert from (kappa, sqrt2 tau) to (kappa, tau) coordinates.
  q1m_ << schur(0, 0), M_SQRT2 * schur(0, 1), M_SQRT2 * schur(1, 0),
      2.0 * schur(1, 1);
  q1c_ = {-r(1, 0) / r(1, 1), -M_SQRT2 * r(1, 2) / r(1, 1)};

  // Q0: minimize over Voigt indices (1, 2), keeping the 11-entry.
  Eigen::Matrix2d cblk;
  cblk << r(1, 1), r(1, 2), r(2, 1), r(2, 2);
  Eigen::Vector2d b0(r(1, 0), r(2, 0));
  const Eigen::Vector2d y = -cblk.ldlt().solve(b0);
  e0_ = r(0, 0) + b0.dot(y);
  q0c_ = {y[1] / M_SQRT2, y[0]};  // z1 from the sqrt2 e12 axis, z2 = 22-entry
}

QuadForm2 QuadForm2::isotropic(const Material& m) {
  const double c = 2.0 * m.mu * m.lambda / (2.0 * m.mu + m.lambda);
  Eigen::Matrix3d r = 2.0 * m.mu * Eigen::Matrix3d::Identity();
  r(0, 0) += c;
  r(1, 1) += c;
  r(0, 1) += c;
  r(1, 0) += c;
  return QuadForm2(r);
}

double eval_q2(const QuadForm2& q, const SymMat2& a) { return q(a); }

QuadForm2 q2_isotropic(const Material& m) { return QuadForm2::isotropic(m); }

Eigen::Matrix3d det_rep() {
  Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
  b(0, 1) = b(1, 0) = 0.5;
  b(2, 2) = -0.5;
  return b;
}

QuadForm3::QuadForm3(const Rep& rep) {
  check_symmetric(rep, "QuadForm3");
  rep_ = 0.5 * (rep + rep.transpose());
  Eigen::SelfAdjointEigenSolver<Rep> es(rep_);
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  if (es.eigenvalues().minCoeff() < -1e-10 * (1.0 + lmax))
    throw Error("QuadForm3: representation is not positive semidefinite");
}

QuadForm3 QuadForm3::isotropic(const Material& m) {
  Rep r = 2.0 * m.mu * Rep::Identity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) += m.lambda;
  return QuadForm3(r);
}

double QuadForm3::operator()(const Eigen::Matrix3d& f) const {
  check_symmetric(f, "QuadForm3::operator()");
  Eigen::Matrix<double, 6, 1> v;
  v << f(0, 0), f(1, 1), f(2, 2), M_SQRT2 * f(1, 2), M_SQRT2 * f(0, 2),
      M_SQRT2 * f(0, 1);
  return v.dot(rep_ * v);
}

QuadForm2 q2_from_q3(const QuadForm3& q3) {
  const QuadForm3::Rep& r = q3.rep();
  // Fixed components (f11, f22, sqrt2 f12) = indices (0, 1, 5); free
  // components (f33, sqrt2 f23, sqrt2 f13) = indices (2, 3, 4).
  const std::array<int, 3> fix = {0, 1, 5};
  const std::array<int, 3> fre = {2, 3, 4};
  Eigen::Matrix3d a, c;
  Eigen::Matrix3d b;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      a(i, j) = r(fix[i], fix[j]);
      b(i, j) = r(fix[i], fre[j]);
      c(i, j) = r(fre[i], fre[j]);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(c);
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(es.eigenvalues().minCoeff() > kDegenerateTol * (1.0 + lmax)))
    throw ReductionError(
        "q2_from_q3: minimized-over block is singular, reduction failed");
  const Eigen::Matrix3d schur = a - b * c.llt().solve(b.transpose());
  // (f11, f22, sqrt2 f12) coincides with the SymMat2 Voigt ordering.
  return QuadForm2(schur);
}

Q1Result q1(const QuadForm2& q, double kappa, double tau) {
  const Eigen::Matrix2d& m = q.q1_matrix();
  const double value = kappa * (m(0, 0) * kappa + m(0, 1) * tau) +
                       tau * (m(1, 0) * kappa + m(1, 1) * tau);
  const auto& c = q.q1_argmin_coeffs();
  return {value, c[0] * kappa + c[1] * tau};
}

Q0Result q0(const QuadForm2& q, double mu_strain) {
  const auto& c = q.q0_argmin_coeffs();
  return {q.q0_coeff() * mu_strain * mu_strain,
          {c[0] * mu_strain, c[1] * mu_strain}};
}

RelaxConstants alpha_pm(const QuadForm2& q) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(q.rep());
  const Eigen::Matrix3d risqrt = es.operatorInverseSqrt();
  const Eigen::Matrix3d g = risqrt * det_rep() * risqrt;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eg(g);
  const double lmin = eg.eigenvalues().minCoeff();
  const double lmax = eg.eigenvalues().maxCoeff();
  // det is indefinite, so lmin < 0 < lmax and both constants are finite.
  return {1.0 / std::abs(lmin), 1.0 / lmax};
}

namespace {

struct GammaQuadratic {
  // Q2 restricted to M = (kappa, tau; tau, gamma) as a quadratic in gamma:
  // a0 + a1 gamma + a2 gamma^2.
  double a0, a1, a2;

  double eval(double g) const { return a0 + g * (a1 + a2 * g); }
};

GammaQuadratic gamma_quadratic(const QuadForm2& q, double kappa, double tau) {
  const Eigen::Matrix3d& r = q.rep();
  const double st = M_SQRT2 * tau;
  GammaQuadratic gq;
  gq.a0 = r(0, 0) * kappa * kappa + 2.0 * r(0, 2) * kappa * st +
          r(2, 2) * st * st;
  gq.a1 = 2.0 * (r(1, 0) * kappa + r(1, 2) * st);
  gq.a2 = r(1, 1);
  return gq;
}

}  // namespace

QbarResult qbar(const QuadForm2& q, const RelaxConstants& c, double kappa,
                double tau) {
  const GammaQuadratic gq = gamma_quadratic(q, kappa, tau);
  const auto objective = [&](double g) {
    const double d = kappa * g - tau * tau;
    return gq.eval(g) + (d > 0.0 ? c.alpha_plus * d : -c.alpha_minus * d);
  };

  if (kappa == 0.0) {
    // det = -tau^2 <= 0 for every gamma: a single quadratic piece.
    const double g = -gq.a1 / (2.0 * gq.a2);
    return {objective(g), g,
            tau == 0.0 ? QbarBranch::kZeroDet : QbarBranch::kNegDet};
  }

  const double g0 = tau * tau / kappa;  // determinant breakpoint
  // Piece with det >= 0 occupies gamma >= g0 when kappa > 0, else gamma <= g0.
  const double gp_unc = -(gq.a1 + c.alpha_plus * kappa) / (2.0 * gq.a2);
  const double gn_unc = -(gq.a1 - c.alpha_minus * kappa) / (2.0 * gq.a2);
  double gp, gn;
  if (kappa > 0.0) {
    gp = std::max(gp_unc, g0);
    gn = std::min(gn_unc, g0);
  } else {
    gp = std::min(gp_unc, g0);
    gn = std::max(gn_unc, g0);
  }
  const double fp = objective(gp);
  const double fn = objective(gn);
  const double g = (fp <= fn) ? gp : gn;
  const double f = std::min(fp, fn);
  QbarBranch branch;
  if (g == g0)
    branch = QbarBranch::kZeroDet;
  else
    branch = (fp <= fn) ? QbarBranch::kPosDet : QbarBranch::kNegDet;
  return {f, g, branch};
}

Grad2 qbar_grad(const QuadForm2& q, const RelaxConstants& c, double kappa,
                double tau) {
  const QbarResult res = qbar(q, c, kappa, tau);
  const Eigen::Vector3d v(kappa, res.gamma_star, M_SQRT2 * tau);
  const Eigen::Vector3d rv = q.rep() * v;
  const double dq_dk = 2.0 * rv[0];
  const double dq_dt = 2.0 * M_SQRT2 * rv[2];
  const double dq_dg = 2.0 * rv[1];
  switch (res.branch) {
    case QbarBranch::kPosDet:
      return {dq_dk + c.alpha_plus * res.gamma_star,
              dq_dt - 2.0 * c.alpha_plus * tau};
    case QbarBranch::kNegDet:
      return {dq_dk - c.alpha_minus * res.gamma_star,
              dq_dt + 2.0 * c.alpha_minus * tau};
    case QbarBranch::kZeroDet: {
      if (kappa == 0.0) return {dq_dk, dq_dt};  // only at kappa = tau = 0
      // Total derivative of Q2(kappa, tau^2/kappa; tau) along det = 0.
      const double g0k = -tau * tau / (kappa * kappa);
      const double g0t = 2.0 * tau / kappa;
      return {dq_dk + dq_dg * g0k, dq_dt + dq_dg * g0t};
    }
  }
  return {0.0, 0.0};
}

double young_modulus(const Material& m) {
  return m.mu * (2.0 * m.mu + 3.0 * m.lambda) / (m.mu + m.lambda);
}

double bending_stiffness(const Material& m) {
  return m.mu * (m.lambda + m.mu) / (3.0 * (2.0 * m.mu + m.lambda));
}

double q1_iso(const Material& m, double kappa, double tau) {
  return young_modulus(m) * kappa * kappa + 4.0 * m.mu * tau * tau;
}

double q0_iso(const Material& m, double kappa) {
  return young_modulus(m) * kappa * kappa;
}

double qbar_iso(const Material& m, double kappa, double tau) {
  const double d = bending_stiffness(m);
  if (std::abs(kappa) > std::abs(tau)) {
    const double s = kappa * kappa + tau * tau;
    return 12.0 * d * s * s / (kappa * kappa);
  }
  return 48.0 * d * tau * tau;
}

RelaxConstants alpha_pm_iso(const Material& m) {
  return {4.0 * m.mu, 4.0 * m.mu * (2.0 * m.mu + 3.0 * m.lambda) /
                          (2.0 * m.mu + m.lambda)};
}

}  // namespace vkr
