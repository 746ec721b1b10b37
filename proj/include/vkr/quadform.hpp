#pragma once

/** @file quadform.hpp
    @brief Quadratic energy densities on symmetric 2x2 matrices: Q2 and its
           partial minimizations Q1, Q0, the relaxation constants alpha+/-,
           and the relaxed (Sadowsky-type) density Qbar.

    All forms are represented in the orthonormal Voigt-like basis
    (e11, e22, sqrt(2) e12), so the Frobenius inner product of matrices is
    the Euclidean inner product of coefficient vectors.
*/

#include <Eigen/Dense>
#include <array>

#include "vkr/errors.hpp"

namespace vkr {

// Symmetric 2x2 matrix stored by its three independent entries.
struct SymMat2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a12; }
  double norm2() const { return a11 * a11 + 2.0 * a12 * a12 + a22 * a22; }

  Eigen::Vector3d voigt() const {
    return Eigen::Vector3d(a11, a22, M_SQRT2 * a12);
  }
  static SymMat2 from_voigt(const Eigen::Vector3d& v) {
    return SymMat2{v[0], v[2] / M_SQRT2, v[1]};
  }
};

// Isotropic Lame pair; mu > 0 and lambda >= 0 keep every derived form
// positive definite.
struct Material {
  double mu;
  double lambda;

  Material(double mu_, double lambda_) : mu(mu_), lambda(lambda_) {
    if (!(mu > 0.0)) throw Error("Material: mu must be positive");
    if (!(lambda >= 0.0)) throw Error("Material: lambda must be nonnegative");
  }
};

struct RelaxConstants {
  double alpha_plus;
  double alpha_minus;
};

// Positive definite quadratic form on SymMat2, stored as a symmetric 3x3
// matrix in the (e11, e22, sqrt(2) e12) basis. Reduced representations
// (the Q1 matrix, the Q0 coefficient, and the corresponding argmin maps)
// are precomputed at construction.
class QuadForm2 {
 public:
  explicit QuadForm2(const Eigen::Matrix3d& rep);

  static QuadForm2 isotropic(const Material& m);

  const Eigen::Matrix3d& rep() const { return rep_; }

  double operator()(const SymMat2& a) const {
    const Eigen::Vector3d v = a.voigt();
    return v.dot(rep_ * v);
  }

  // Q1(kappa, tau) = [kappa tau] q1_matrix() [kappa tau]^T
  const Eigen::Matrix2d& q1_matrix() const { return q1m_; }
  // gamma* = c[0] kappa + c[1] tau
  const std::array<double, 2>& q1_argmin_coeffs() const { return q1c_; }

  // Q0(m) = q0_coeff() m^2
  double q0_coeff() const { return e0_; }
  // z* = (c[0] m, c[1] m)
  const std::array<double, 2>& q0_argmin_coeffs() const { return q0c_; }

 private:
  Eigen::Matrix3d rep_;
  Eigen::Matrix2d q1m_;
  std::array<double, 2> q1c_;
  double e0_;
  std::array<double, 2> q0c_;
};

double eval_q2(const QuadForm2& q, const SymMat2& a);
QuadForm2 q2_isotropic(const Material& m);

// Representation of det in the Voigt basis: det A = v^T det_rep() v.
Eigen::Matrix3d det_rep();

// Quadratic form on symmetric 3x3 matrices, ordered basis
// (f11, f22, f33, sqrt2 f23, sqrt2 f13, sqrt2 f12). Positive semidefinite
// is accepted; q2_from_q3 additionally requires the minimized-over block
// to be positive definite.
class QuadForm3 {
 public:
  using Rep = Eigen::Matrix<double, 6, 6>;

  explicit QuadForm3(const Rep& rep);

  static QuadForm3 isotropic(const Material& m);

  const Rep& rep() const { return rep_; }

  // Evaluate on a symmetric 3x3 matrix.
  double operator()(const Eigen::Matrix3d& f) const;

 private:
  Rep rep_;
};

// Schur-complement reduction: Q2(A) = min over (a13, a23, a33) of Q3(F)
// with the upper-left 2x2 block of F fixed by A.
QuadForm2 q2_from_q3(const QuadForm3& q3);

struct Q1Result {
  double value;
  double gamma_star;
};
Q1Result q1(const QuadForm2& q, double kappa, double tau);

struct Q0Result {
  double value;
  std::array<double, 2> z_star;  // (z1, z2) = (12-entry, 22-entry)
};
Q0Result q0(const QuadForm2& q, double mu_strain);

// alpha+ = sup{a > 0 : Q2 + a det >= 0}, alpha- with -det, computed from
// the eigenvalues of R^{-1/2} B R^{-1/2} (R the Q2 rep, B the det rep).
RelaxConstants alpha_pm(const QuadForm2& q);

enum class QbarBranch {
  kPosDet,   // minimizer in the det > 0 region
  kNegDet,   // minimizer in the det < 0 region
  kZeroDet,  // minimizer at the determinant breakpoint gamma = tau^2/kappa
};

struct QbarResult {
  double value;
  double gamma_star;
  QbarBranch branch;
};

// Exact piecewise-quadratic minimization of
//   gamma -> Q2(M) + a+ (det M)^+ + a- (det M)^-,  M = (kappa, tau; tau, gamma).
QbarResult qbar(const QuadForm2& q, const RelaxConstants& c, double kappa,
                double tau);

struct Grad2 {
  double dkappa;
  double dtau;
};

// Gradient of Qbar in (kappa, tau); on the measure-zero branch-transition
// set the active-branch one-sided derivative is returned.
Grad2 qbar_grad(const QuadForm2& q, const RelaxConstants& c, double kappa,
                double tau);

// Closed forms for the isotropic material, used as oracles against the
// generic pipeline.
double young_modulus(const Material& m);
double bending_stiffness(const Material& m);
double q1_iso(const Material& m, double kappa, double tau);
double q0_iso(const Material& m, double kappa);
double qbar_iso(const Material& m, double kappa, double tau);
RelaxConstants alpha_pm_iso(const Material& m);

}  // namespace vkr
