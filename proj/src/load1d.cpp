#include "vkr/load1d.hpp"

#include "vkr/energy1d.hpp"
#include "vkr/gauss.hpp"

namespace vkr {

Eigen::VectorXd load_vector(const IntervalMesh& mesh, const Load1D& load) {
  const int n = mesh.n_nodes();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(6 * n);
  static const GaussRule rule = gauss_legendre_01(kQuad1D);

  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double h = mesh.h(e);
    for (int k = 0; k < rule.size(); ++k) {
      const double s = rule.x[k];
      const double x = mesh.nodes[e] + h * s;
      const double wq = h * rule.w[k];
      double hv[4], pv[2];
      hermite_shapes(s, h, 0, hv);
      p1_shapes(s, h, 0, pv);
      if (load.q_w) {
        const double q = load.q_w(x);
        for (int a = 0; a < 4; ++a) f[2 * (e + a / 2) + a % 2] += wq * q * hv[a];
      }
      if (load.q_xi2) {
        const double q = load.q_xi2(x);
        for (int a = 0; a < 4; ++a)
          f[4 * n + 2 * (e + a / 2) + a % 2] += wq * q * hv[a];
      }
      if (load.m_theta) {
        const double q = load.m_theta(x);
        for (int a = 0; a < 2; ++a) f[2 * n + e + a] += wq * q * pv[a];
      }
      if (load.q_xi1) {
        const double q = load.q_xi1(x);
        for (int a = 0; a < 2; ++a) f[3 * n + e + a] += wq * q * pv[a];
      }
    }
  }

  for (const PointLoad1D& p : load.point_loads) {
    const int e = mesh.find_element(p.x);
    const double h = mesh.h(e);
    const double s = (p.x - mesh.nodes[e]) / h;
    double hv[4], pv[2];
    hermite_shapes(s, h, 0, hv);
    p1_shapes(s, h, 0, pv);
    switch (p.comp) {
      case PointLoad1D::Comp::kW:
        for (int a = 0; a < 4; ++a)
          f[2 * (e + a / 2) + a % 2] += p.magnitude * hv[a];
        break;
      case PointLoad1D::Comp::kXi2:
        for (int a = 0; a < 4; ++a)
          f[4 * n + 2 * (e + a / 2) + a % 2] += p.magnitude * hv[a];
        break;
      case PointLoad1D::Comp::kTheta:
        for (int a = 0; a < 2; ++a) f[2 * n + e + a] += p.magnitude * pv[a];
        break;
      case PointLoad1D::Comp::kXi1:
        for (int a = 0; a < 2; ++a) f[3 * n + e + a] += p.magnitude * pv[a];
        break;
    }
  }
  return f;
}

}  // namespace vkr
