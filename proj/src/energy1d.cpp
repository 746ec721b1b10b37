#include "vkr/energy1d.hpp"

#include <cmath>

#include "vkr/gauss.hpp"

namespace vkr {

namespace {

struct QPoint {
  double x;
  double weight;  // includes element length
};

template <typename Fn>
void for_quad_points(const IntervalMesh& mesh, Fn&& fn) {
  static const GaussRule rule = gauss_legendre_01(kQuad1D);
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double h = mesh.h(e);
    for (int k = 0; k < rule.size(); ++k)
      fn(e, QPoint{mesh.nodes[e] + h * rule.x[k], h * rule.w[k]});
  }
}

// Splits Q1(kappa, tau) = q11 k^2 + (2 q12 k t + q22 t^2) into the
// bending_out / torsion buckets.
void add_q1_split(const Eigen::Matrix2d& q1m, double kappa, double tau,
                  double weight, EnergyReport* rep) {
  const double bend = q1m(0, 0) * kappa * kappa;
  const double tors = 2.0 * q1m(0, 1) * kappa * tau + q1m(1, 1) * tau * tau;
  rep->bending_out += weight / 24.0 * bend;
  rep->torsion += weight / 24.0 * tors;
}

}  // namespace

EnergyReport energy_lvk(const Field1D& f, const QuadForm2& q) {
  EnergyReport rep;
  const Eigen::Matrix2d& q1m = q.q1_matrix();
  for_quad_points(f.mesh(), [&](int, const QPoint& qp) {
    add_q1_split(q1m, f.w(qp.x, 2), f.theta(qp.x, 1), qp.weight, &rep);
  });
  rep.total = rep.bending_out + rep.torsion;
  return rep;
}

EnergyReport energy_vk(const Field1D& f, const QuadForm2& q) {
  EnergyReport rep;
  const Eigen::Matrix2d& q1m = q.q1_matrix();
  const double e0 = q.q0_coeff();
  for_quad_points(f.mesh(), [&](int, const QPoint& qp) {
    const double wp = f.w(qp.x, 1);
    const double g = f.xi1(qp.x, 1) + 0.5 * wp * wp;
    rep.stretching += qp.weight * 0.5 * e0 * g * g;
    const double xi2pp = f.xi2(qp.x, 2);
    rep.bending_in += qp.weight / 24.0 * e0 * xi2pp * xi2pp;
    add_q1_split(q1m, f.w(qp.x, 2), f.theta(qp.x, 1), qp.weight, &rep);
  });
  rep.total = rep.stretching + rep.bending_in + rep.bending_out + rep.torsion;

  const double strip = energy_vk_strip(f, q);
  if (std::abs(strip - rep.total) > 1e-12 * (1.0 + std::abs(rep.total)))
    throw Error("energy_vk: strip form and intro form disagree");
  return rep;
}

double energy_vk_strip(const Field1D& f, const QuadForm2& q) {
  // (1/2) int_S Q0(d1 y1 + |w'|^2/2) with y1 = xi1 - x2 xi2', plus the
  // (1/24) int_I Q1 bending term. The transverse integral uses 2-point
  // Gauss, exact for the quadratic x2-dependence.
  static const GaussRule x2rule = gauss_legendre_01(2);
  const Eigen::Matrix2d& q1m = q.q1_matrix();
  const double e0 = q.q0_coeff();
  double total = 0.0;
  for_quad_points(f.mesh(), [&](int, const QPoint& qp) {
    const double wp = f.w(qp.x, 1);
    const double g0 = f.xi1(qp.x, 1) + 0.5 * wp * wp;
    const double gs = -f.xi2(qp.x, 2);
    for (int k = 0; k < x2rule.size(); ++k) {
      const double x2 = x2rule.x[k] - 0.5;
      const double g = g0 + x2 * gs;
      total += qp.weight * x2rule.w[k] * 0.5 * e0 * g * g;
    }
    const double kappa = f.w(qp.x, 2);
    const double tau = f.theta(qp.x, 1);
    total += qp.weight / 24.0 *
             (q1m(0, 0) * kappa * kappa + 2.0 * q1m(0, 1) * kappa * tau +
              q1m(1, 1) * tau * tau);
  });
  return total;
}

EnergyReport energy_cvk(const Field1D& f, const QuadForm2& q,
                        const RelaxConstants& c) {
  EnergyReport rep;
  for_quad_points(f.mesh(), [&](int, const QPoint& qp) {
    const QbarResult qb = qbar(q, c, f.w(qp.x, 2), f.theta(qp.x, 1));
    rep.bending_out += qp.weight / 24.0 * qb.value;
  });
  rep.total = rep.bending_out;
  return rep;
}

EnergyReport energy(ModelKind kind, const Field1D& f, const QuadForm2& q,
                    const RelaxConstants* c) {
  switch (kind) {
    case ModelKind::kLvk:
      return energy_lvk(f, q);
    case ModelKind::kVk:
      return energy_vk(f, q);
    case ModelKind::kCvk:
      if (!c) throw Error("energy: CvK requires relaxation constants");
      return energy_cvk(f, q, *c);
  }
  throw Error("energy: unknown model kind");
}

Eigen::VectorXd gradient(ModelKind kind, const Field1D& f, const QuadForm2& q,
                         const RelaxConstants* c) {
  if (kind == ModelKind::kCvk && !c)
    throw Error("gradient: CvK requires relaxation constants");
  const IntervalMesh& mesh = f.mesh();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(f.n_dofs());
  const Eigen::Matrix2d& q1m = q.q1_matrix();
  const double e0 = q.q0_coeff();
  static const GaussRule rule = gauss_legendre_01(kQuad1D);

  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double h = mesh.h(e);
    for (int k = 0; k < rule.size(); ++k) {
      const double s = rule.x[k];
      const double x = mesh.nodes[e] + h * s;
      const double wq = h * rule.w[k];
      double hw2[4], hw1[4], p1d[2];
      hermite_shapes(s, h, 2, hw2);
      p1_shapes(s, h, 1, p1d);

      const double kappa = f.w(x, 2);
      const double tau = f.theta(x, 1);

      double dk, dt;  // d(density)/d(kappa), /d(tau) of the bending density
      if (kind == ModelKind::kCvk) {
        const Grad2 g2 = qbar_grad(q, *c, kappa, tau);
        dk = g2.dkappa / 24.0;
        dt = g2.dtau / 24.0;
      } else {
        dk = (2.0 * q1m(0, 0) * kappa + 2.0 * q1m(0, 1) * tau) / 24.0;
        dt = (2.0 * q1m(0, 1) * kappa + 2.0 * q1m(1, 1) * tau) / 24.0;
      }
      for (int a = 0; a < 4; ++a)
        grad[f.idx_w(e + a / 2, a % 2)] += wq * dk * hw2[a];
      for (int a = 0; a < 2; ++a)
        grad[f.idx_theta(e + a)] += wq * dt * p1d[a];

      if (kind == ModelKind::kVk) {
        hermite_shapes(s, h, 1, hw1);
        const double wp = f.w(x, 1);
        const double g = f.xi1(x, 1) + 0.5 * wp * wp;
        const double dg = e0 * g;  // d/dg of (1/2) e0 g^2
        for (int a = 0; a < 4; ++a)
          grad[f.idx_w(e + a / 2, a % 2)] += wq * dg * wp * hw1[a];
        for (int a = 0; a < 2; ++a)
          grad[f.idx_xi1(e + a)] += wq * dg * p1d[a];
        const double xi2pp = f.xi2(x, 2);
        for (int a = 0; a < 4; ++a)
          grad[f.idx_xi2(e + a / 2, a % 2)] +=
              wq * e0 * xi2pp / 12.0 * hw2[a];
      }
    }
  }
  return grad;
}

}  // namespace vkr
