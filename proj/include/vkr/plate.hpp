#pragma once

/** @file plate.hpp
    @brief Scaled von Karman energies on the unit strip S = I x (-1/2, 1/2):
           C1 (Bogner-Fox-Schmit) bending discretization for w, bilinear
           in-plane field y, the eps-weighted operators, and the constrained
           minimizers used on the liminf side of the convergence experiments.
*/

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "vkr/constraints.hpp"
#include "vkr/quadform.hpp"

namespace vkr {

struct RectMesh {
  double ell = 1.0;
  int nx = 2;
  int ny = 2;

  RectMesh(double ell_, int nx_, int ny_) : ell(ell_), nx(nx_), ny(ny_) {
    if (!(ell > 0.0) || nx < 2 || ny < 2)
      throw Error("RectMesh: need ell > 0 and nx, ny >= 2");
  }

  double hx() const { return ell / nx; }
  double hy() const { return 1.0 / ny; }
  int n_nodes() const { return (nx + 1) * (ny + 1); }
  int node_id(int i, int j) const { return j * (nx + 1) + i; }
  double x1(int i) const { return -0.5 * ell + i * hx(); }
  double x2(int j) const { return -0.5 + j * hy(); }
  // w has 4 DOFs per node (value, d1, d2, d12), y two bilinear components.
  int n_dofs() const { return 6 * n_nodes(); }
  int idx_w(int node, int comp) const { return 4 * node + comp; }
  int idx_y1(int node) const { return 4 * n_nodes() + node; }
  int idx_y2(int node) const { return 5 * n_nodes() + node; }
};

// Scaled differential operators at a point.
struct ScaledOps {
  SymMat2 strain_y;             // E^eps y
  Eigen::Vector2d grad_eps_w;   // (d1 w, d2 w / eps)
  SymMat2 hess_eps_w;           // (d11, d12/eps; ., d22/eps^2)
};

class ScaledPlateField {
 public:
  ScaledPlateField(std::shared_ptr<const RectMesh> mesh, double eps);

  const RectMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const RectMesh> mesh_ptr() const { return mesh_; }
  double eps() const { return eps_; }

  Eigen::VectorXd& dofs() { return dofs_; }
  const Eigen::VectorXd& dofs() const { return dofs_; }

  // Plain partial derivative d^(dx+dy) w / dx1^dx dx2^dy, orders 0..2.
  double w(double x1, double x2, int dx = 0, int dy = 0) const;
  // y component (comp 0 or 1), orders 0..1.
  double y(int comp, double x1, double x2, int dx = 0, int dy = 0) const;

  // Nodal sampling; fw returns (w, d1 w, d2 w, d12 w), fy returns (y1, y2).
  void set_w_nodal(
      const std::function<std::array<double, 4>(double, double)>& fw);
  void set_y_nodal(
      const std::function<std::array<double, 2>(double, double)>& fy);

 private:
  std::shared_ptr<const RectMesh> mesh_;
  double eps_;
  Eigen::VectorXd dofs_;
};

// Exact eps-weighted derivatives of the interpolants; throws outside S.
ScaledOps ops_at(const ScaledPlateField& f, double x1, double x2);

// Transversely invariant loads; the torque density enters the w equation as
// the antisymmetric-in-x2 load 12 m(x1) x2 / eps, matching the twist term of
// the recovery ansatz.
struct Load2D {
  std::function<double(double)> q_w;
  std::function<double(double)> m_theta;
  std::function<double(double)> q_y1;
  std::function<double(double)> q_y2;

  bool empty() const { return !q_w && !m_theta && !q_y1 && !q_y2; }
};

// Quadrature order (per direction) used by every plate energy; degree-13
// exactness covers every polynomial integrand that occurs, including the
// quartic membrane term with its degree-12 factors.
inline constexpr int kQuadX = 7;
inline constexpr int kQuadY = 7;

double energy_ben(const ScaledPlateField& f, const QuadForm2& q);
double energy_ext(const ScaledPlateField& f, const QuadForm2& q);
// weight * int_S (det Hess_eps w)^2.
double det_penalty(const ScaledPlateField& f, double weight);

// L2 norms of the eps-weighted second derivatives, reported as compactness
// diagnostics along eps-sweeps.
struct PlateDiagNorms {
  double d11 = 0.0;          // |d11 w|
  double d12_over_eps = 0.0; // |d12 w| / eps
  double d22_over_eps2 = 0.0;// |d22 w| / eps^2
};
PlateDiagNorms plate_diag_norms(const ScaledPlateField& f);

Eigen::VectorXd plate_load_vector(const RectMesh& mesh, double eps,
                                  const Load2D& loads);

enum class PlateModel { kLvk, kVk, kCvkPenalty };

struct Constraints2D {
  Bc w = Bc::kZeroAverage;
  Bc y = Bc::kZeroAverage;
};

// Reduced view for a plate model: w DOFs always, y DOFs for vK. The
// zero-average rows are int w = int grad w = 0 and, for y, int y = 0 plus
// the mean-rotation condition int (d1 y2 - d2 y1) = 0 which removes the
// strain-free rotation mode.
ReducedSystem build_reduced_system_2d(const RectMesh& mesh, PlateModel model,
                                      const Constraints2D& bc);

// Exact subtraction of the discrete zero-average residuals by affine fields
// (zero bending energy; for y also the rotation mode). Used to make sampled
// recovery fields admissible competitors of the constrained minimizers.
void recenter(ScaledPlateField* f, bool with_y);

struct PlateSolveOptions {
  double tol = 1e-8;
  int max_iters = 200;
  std::vector<double> penalty_weights = {1e2, 1e3, 1e4};
  const ScaledPlateField* start = nullptr;
  // When set (CvK), the final continuation stage is restarted from this
  // admissible field if it beats the continuation iterate, preserving the
  // minimizer-vs-competitor bracket.
  const ScaledPlateField* bracket_reference = nullptr;
};

struct PlateSolveResult {
  ScaledPlateField field;
  double energy = 0.0;            // elastic energy, penalty excluded
  double objective = 0.0;         // energy - load work
  double penalty_residual = 0.0;  // int (det Hess_eps w)^2, unweighted
  int iterations = 0;
  double grad_norm = 0.0;
  std::vector<double> history;
};

PlateSolveResult minimize_plate(PlateModel model,
                                std::shared_ptr<const RectMesh> mesh,
                                double eps, const QuadForm2& q,
                                const Load2D& loads, const Constraints2D& bc,
                                const PlateSolveOptions& opt = {});

// Elastic (+ penalty) energy of the model and its full-layout gradient;
// loads excluded. penalty_weight only enters the CvK-penalty model.
double plate_energy_and_gradient(PlateModel model, const ScaledPlateField& f,
                                 const QuadForm2& q, double penalty_weight,
                                 Eigen::VectorXd* grad);

// Reduced Hessian of the same functional.
Eigen::SparseMatrix<double> plate_hessian(PlateModel model,
                                          const ScaledPlateField& f,
                                          const QuadForm2& q,
                                          double penalty_weight,
                                          const ReducedSystem& sys);

}  // namespace vkr
