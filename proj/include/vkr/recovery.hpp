#pragma once

/** @file recovery.hpp
    @brief Explicit recovery families for the three ribbon limits: the twist
           ansatz for the linearized model, the in-plane corrected ansatz for
           the von Karman model, and the developable-chart construction for
           the constrained model. Evaluating the scaled plate energies on
           these fields verifies the limsup half of the convergence
           statements.
*/

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "vkr/energy1d.hpp"
#include "vkr/field1d.hpp"
#include "vkr/plate.hpp"
#include "vkr/profile.hpp"
#include "vkr/quadform.hpp"

namespace vkr {

// Smooth 1D data of a recovery construction plus the argmin profiles derived
// from the density reductions: gamma from the Q1 argmin at (w'', theta'),
// and the Q0-argmin split z_a = zeta_a + x2 eta_a induced by the linearity
// of the argmin in the strain.
struct RecoveryInput {
  double ell = 1.0;
  QuadForm2 q;
  RelaxConstants alpha{1.0, 1.0};
  ProfilePtr w, theta, xi1, xi2;
  ProfilePtr gamma;
  ProfilePtr zeta1, zeta2, eta1, eta2;

  static RecoveryInput from_profiles(double ell, const QuadForm2& q,
                                     ProfilePtr w, ProfilePtr theta,
                                     ProfilePtr xi1 = nullptr,
                                     ProfilePtr xi2 = nullptr);
  static RecoveryInput from_field(const Field1D& f, const QuadForm2& q);
};

// Analytic plate ansatz on S: plain partial derivatives of w up to second
// order, and of the in-plane components up to first order.
class PlateAnsatz {
 public:
  virtual ~PlateAnsatz() = default;

  double eps() const { return eps_; }
  double ell() const { return ell_; }

  struct WDerivs {
    double w = 0, d1 = 0, d2 = 0, d11 = 0, d12 = 0, d22 = 0;
  };
  virtual WDerivs w_derivs(double x1, double x2) const = 0;

  struct YDerivs {
    double y1 = 0, y2 = 0, d1y1 = 0, d2y1 = 0, d1y2 = 0, d2y2 = 0;
  };
  virtual bool has_y() const { return false; }
  virtual YDerivs y_derivs(double, double) const { return {}; }

 protected:
  PlateAnsatz(double eps, double ell) : eps_(eps), ell_(ell) {}
  double eps_;
  double ell_;
};

using AnsatzPtr = std::shared_ptr<const PlateAnsatz>;

// w + eps x2 theta + (eps^2/2)(x2^2 gamma - <x2^2 gamma> - x1 <x2^2 gamma'>).
AnsatzPtr lvk_recovery(const RecoveryInput& in, double eps);

// Adds the Bernoulli-Navier in-plane field with its eps-order correctors.
AnsatzPtr vk_recovery(const RecoveryInput& in, double eps);

// Ruling chart of the constrained construction: the relaxed minimizer field
// M(x1) = (w'', theta'; theta', gamma*) with det M = 0 is written as
// lambda n(beta) (x) n(beta), and Phi rules the strip along the kernel
// direction b = (-sin beta, cos beta).
class DevelopableChart {
 public:
  DevelopableChart(ProfilePtr beta, ProfilePtr lambda, double ell,
                   double eps_max);

  double beta(double x, int deriv = 0) const { return beta_->eval(x, deriv); }
  double lambda(double x) const { return lambda_->eval(x, 0); }
  double alpha_angle(double x) const { return M_PI_2 + beta(x); }
  Eigen::Vector2d b_tilde(double x) const {
    return Eigen::Vector2d(-std::sin(beta(x)), std::cos(beta(x)));
  }

  Eigen::Vector2d phi(double xi1, double xi2) const;
  Eigen::Matrix2d grad_phi(double xi1, double xi2) const;
  // det grad Phi = cos beta(xi1) - xi2 beta'(xi1)
  double det_grad_phi(double xi1, double xi2) const;

  // Newton inversion of Phi; throws NewtonError with the offending point.
  Eigen::Vector2d invert(const Eigen::Vector2d& p, double tol = 1e-12,
                         int max_iters = 20) const;

  double eps_max() const { return eps_max_; }
  double ell() const { return ell_; }

 private:
  ProfilePtr beta_;
  ProfilePtr lambda_;
  double ell_;
  double eps_max_;
};

// Validates the determinant-free regime (rejecting data whose relaxed
// minimizer has det != 0 somewhere) and builds the chart.
DevelopableChart cvk_chart(const RecoveryInput& in);

class CvkAnsatz;  // defined below; exposes the raw chart function z

std::shared_ptr<const CvkAnsatz> cvk_recovery(const DevelopableChart& chart,
                                              const RecoveryInput& in,
                                              double eps);

class CvkAnsatz final : public PlateAnsatz {
 public:
  WDerivs w_derivs(double x1, double x2) const override;

  // The chart function z on S_eps before the average normalization;
  // z(x1, 0) = w(x1) identically.
  double z_uncorrected(double x1, double x2_physical) const;

 private:
  friend std::shared_ptr<const CvkAnsatz> cvk_recovery(
      const DevelopableChart&, const RecoveryInput&, double);
  CvkAnsatz(const DevelopableChart& chart, const RecoveryInput& in,
            double eps);

  DevelopableChart chart_;
  ProfilePtr w_, theta_;
  Eigen::Vector2d f_corr_ = Eigen::Vector2d::Zero();
  double c_corr_ = 0.0;
};

// Dense-quadrature energies of an analytic ansatz (cells x points tensor
// rule per direction; the default resolves every construction used here to
// well below the reporting tolerances).
double energy_ben_ansatz(const PlateAnsatz& a, const QuadForm2& q,
                         int cells_x = 64, int cells_y = 8, int pts = 8);
double energy_ext_ansatz(const PlateAnsatz& a, const QuadForm2& q,
                         int cells_x = 64, int cells_y = 8, int pts = 8);

// Zero-average residuals (int w, int d1 w, int d2 w) of the ansatz over S,
// by the same dense quadrature.
Eigen::Vector3d ansatz_average_residuals(const PlateAnsatz& a, int cells_x = 64,
                                         int cells_y = 8, int pts = 8);

// Samples the ansatz into the C1 element space and recenters the discrete
// averages, producing an admissible competitor for the plate minimizers.
ScaledPlateField sample_to_field(const PlateAnsatz& a,
                                 std::shared_ptr<const RectMesh> mesh);

// 1D limit energies of the recovery data by dense quadrature.
double limit_energy(ModelKind kind, const RecoveryInput& in, int cells = 256,
                    int pts = 10);

struct GammaReportRow {
  double eps;
  double j_eps;
  double j_limit;
  double rel_err;
};

struct GammaReportOptions {
  int cells_x = 64;
  int cells_y = 8;
  int pts = 8;
  double final_error_bound = 0.01;
  bool require_monotone = false;
};

// Energies of the recovery family along an eps list against the 1D limit;
// throws CheckError when the configured bound (or monotonicity, when
// requested) fails.
std::vector<GammaReportRow> gamma_report(ModelKind kind,
                                         const RecoveryInput& in,
                                         const std::vector<double>& eps_list,
                                         const GammaReportOptions& opt = {});

}  // namespace vkr
