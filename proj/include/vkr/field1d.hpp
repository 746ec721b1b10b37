#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <vector>

#include "vkr/errors.hpp"
#include "vkr/profile.hpp"

namespace vkr {

// Mesh of the ribbon axis I = (-ell/2, ell/2).
struct IntervalMesh {
  double ell = 1.0;
  std::vector<double> nodes;  // strictly increasing, spanning [-ell/2, ell/2]

  static IntervalMesh uniform(double ell, int n_elems);

  int n_elems() const { return static_cast<int>(nodes.size()) - 1; }
  int n_nodes() const { return static_cast<int>(nodes.size()); }
  double h(int e) const { return nodes[e + 1] - nodes[e]; }
  int find_element(double x) const;
};

// Cubic Hermite shape values on the unit element, including the h-scaling of
// the slope degrees of freedom; out = d^deriv/dx^deriv of
// {H00, h H01, H10, h H11} evaluated at local coordinate s.
void hermite_shapes(double s, double h, int deriv, double out[4]);
// P1 shapes {1-s, s}, same convention.
void p1_shapes(double s, double h, int deriv, double out[2]);

// Discretized ribbon state: out-of-plane deflection w and in-plane deflection
// xi2 as C1 Hermite cubics, twist theta and axial displacement xi1 as P1.
//
// DOF layout with n = n_nodes: w value/slope pairs in [0, 2n), theta in
// [2n, 3n), xi1 in [3n, 4n), xi2 pairs in [4n, 6n).
class Field1D {
 public:
  explicit Field1D(std::shared_ptr<const IntervalMesh> mesh);

  const IntervalMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const IntervalMesh> mesh_ptr() const { return mesh_; }

  Eigen::VectorXd& dofs() { return dofs_; }
  const Eigen::VectorXd& dofs() const { return dofs_; }
  int n_dofs() const { return static_cast<int>(dofs_.size()); }

  int idx_w(int node, int comp) const { return 2 * node + comp; }
  int idx_theta(int node) const { return 2 * mesh_->n_nodes() + node; }
  int idx_xi1(int node) const { return 3 * mesh_->n_nodes() + node; }
  int idx_xi2(int node, int comp) const {
    return 4 * mesh_->n_nodes() + 2 * node + comp;
  }

  double w(double x, int deriv = 0) const;
  double theta(double x, int deriv = 0) const;
  double xi1(double x, int deriv = 0) const;
  double xi2(double x, int deriv = 0) const;

  // Nodal interpolation (values and, for Hermite fields, slopes).
  void set_w(const Profile& p);
  void set_theta(const Profile& p);
  void set_xi1(const Profile& p);
  void set_xi2(const Profile& p);

  // Piecewise-polynomial views, evaluable slightly outside I by extending the
  // boundary elements' polynomials.
  ProfilePtr profile_w() const;
  ProfilePtr profile_theta() const;
  ProfilePtr profile_xi1() const;
  ProfilePtr profile_xi2() const;

 private:
  double eval_hermite(int offset, double x, int deriv) const;
  double eval_p1(int offset, double x, int deriv) const;

  std::shared_ptr<const IntervalMesh> mesh_;
  Eigen::VectorXd dofs_;
};

}  // namespace vkr
