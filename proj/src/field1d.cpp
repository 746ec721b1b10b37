#include "vkr/field1d.hpp"

#include <algorithm>
#include <cmath>

namespace vkr {

IntervalMesh IntervalMesh::uniform(double ell, int n_elems) {
  if (!(ell > 0.0)) throw Error("IntervalMesh: ell must be positive");
  if (n_elems < 2) throw Error("IntervalMesh: need at least 2 elements");
  IntervalMesh m;
  m.ell = ell;
  m.nodes.resize(n_elems + 1);
  for (int i = 0; i <= n_elems; ++i)
    m.nodes[i] = -0.5 * ell + ell * static_cast<double>(i) / n_elems;
  m.nodes.front() = -0.5 * ell;
  m.nodes.back() = 0.5 * ell;
  return m;
}

int IntervalMesh::find_element(double x) const {
  // Out-of-interval points are attached to the boundary elements so that
  // piecewise polynomials extend naturally.
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  int e = static_cast<int>(it - nodes.begin()) - 1;
  return std::clamp(e, 0, n_elems() - 1);
}

void hermite_shapes(double s, double h, int deriv, double out[4]) {
  double v[4];
  switch (deriv) {
    case 0:
      v[0] = 1.0 + s * s * (-3.0 + 2.0 * s);
      v[1] = s * (1.0 + s * (-2.0 + s));
      v[2] = s * s * (3.0 - 2.0 * s);
      v[3] = s * s * (-1.0 + s);
      break;
    case 1:
      v[0] = 6.0 * s * (s - 1.0);
      v[1] = 1.0 + s * (-4.0 + 3.0 * s);
      v[2] = 6.0 * s * (1.0 - s);
      v[3] = s * (-2.0 + 3.0 * s);
      break;
    case 2:
      v[0] = -6.0 + 12.0 * s;
      v[1] = -4.0 + 6.0 * s;
      v[2] = 6.0 - 12.0 * s;
      v[3] = -2.0 + 6.0 * s;
      break;
    case 3:
      v[0] = 12.0;
      v[1] = 6.0;
      v[2] = -12.0;
      v[3] = 6.0;
      break;
    default:
      v[0] = v[1] = v[2] = v[3] = 0.0;
  }
  const double scale = std::pow(h, -deriv);
  out[0] = scale * v[0];
  out[1] = scale * h * v[1];
  out[2] = scale * v[2];
  out[3] = scale * h * v[3];
}

void p1_shapes(double s, double h, int deriv, double out[2]) {
  switch (deriv) {
    case 0:
      out[0] = 1.0 - s;
      out[1] = s;
      break;
    case 1:
      out[0] = -1.0 / h;
      out[1] = 1.0 / h;
      break;
    default:
      out[0] = out[1] = 0.0;
  }
}

Field1D::Field1D(std::shared_ptr<const IntervalMesh> mesh)
    : mesh_(std::move(mesh)) {
  dofs_ = Eigen::VectorXd::Zero(6 * mesh_->n_nodes());
}

double Field1D::eval_hermite(int offset, double x, int deriv) const {
  const int e = mesh_->find_element(x);
  const double h = mesh_->h(e);
  const double s = (x - mesh_->nodes[e]) / h;
  double shp[4];
  hermite_shapes(s, h, deriv, shp);
  const double* d = dofs_.data() + offset;
  return shp[0] * d[2 * e] + shp[1] * d[2 * e + 1] + shp[2] * d[2 * e + 2] +
         shp[3] * d[2 * e + 3];
}

double Field1D::eval_p1(int offset, double x, int deriv) const {
  const int e = mesh_->find_element(x);
  const double h = mesh_->h(e);
  const double s = (x - mesh_->nodes[e]) / h;
  double shp[2];
  p1_shapes(s, h, deriv, shp);
  const double* d = dofs_.data() + offset;
  return shp[0] * d[e] + shp[1] * d[e + 1];
}

double Field1D::w(double x, int deriv) const {
  return eval_hermite(0, x, deriv);
}

double Field1D::theta(double x, int deriv) const {
  return eval_p1(2 * mesh_->n_nodes(), x, deriv);
}

double Field1D::xi1(double x, int deriv) const {
  return eval_p1(3 * mesh_->n_nodes(), x, deriv);
}

double Field1D::xi2(double x, int deriv) const {
  return eval_hermite(4 * mesh_->n_nodes(), x, deriv);
}

void Field1D::set_w(const Profile& p) {
  for (int i = 0; i < mesh_->n_nodes(); ++i) {
    dofs_[idx_w(i, 0)] = p.eval(mesh_->nodes[i], 0);
    dofs_[idx_w(i, 1)] = p.eval(mesh_->nodes[i], 1);
  }
}

void Field1D::set_theta(const Profile& p) {
  for (int i = 0; i < mesh_->n_nodes(); ++i)
    dofs_[idx_theta(i)] = p.eval(mesh_->nodes[i], 0);
}

void Field1D::set_xi1(const Profile& p) {
  for (int i = 0; i < mesh_->n_nodes(); ++i)
    dofs_[idx_xi1(i)] = p.eval(mesh_->nodes[i], 0);
}

void Field1D::set_xi2(const Profile& p) {
  for (int i = 0; i < mesh_->n_nodes(); ++i) {
    dofs_[idx_xi2(i, 0)] = p.eval(mesh_->nodes[i], 0);
    dofs_[idx_xi2(i, 1)] = p.eval(mesh_->nodes[i], 1);
  }
}

namespace {

ProfilePtr field_profile(std::shared_ptr<const IntervalMesh> mesh,
                         std::shared_ptr<const Field1D> field,
                         double (Field1D::*eval)(double, int) const) {
  return make_profile([mesh, field, eval](double x, int deriv) {
    return ((*field).*eval)(x, deriv);
  });
}

}  // namespace

ProfilePtr Field1D::profile_w() const {
  auto copy = std::make_shared<Field1D>(*this);
  return field_profile(mesh_, copy, &Field1D::w);
}

ProfilePtr Field1D::profile_theta() const {
  auto copy = std::make_shared<Field1D>(*this);
  return field_profile(mesh_, copy, &Field1D::theta);
}

ProfilePtr Field1D::profile_xi1() const {
  auto copy = std::make_shared<Field1D>(*this);
  return field_profile(mesh_, copy, &Field1D::xi1);
}

ProfilePtr Field1D::profile_xi2() const {
  auto copy = std::make_shared<Field1D>(*this);
  return field_profile(mesh_, copy, &Field1D::xi2);
}

}  // namespace vkr
