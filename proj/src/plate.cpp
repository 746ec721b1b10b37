#include "vkr/plate.hpp"

#include <algorithm>
#include <cmath>

#include "vkr/field1d.hpp"
#include "vkr/gauss.hpp"
#include "vkr/newton.hpp"

namespace vkr {

namespace {

// Local DOF maps of one rectangle: 16 BFS DOFs for w, 4 bilinear per y
// component. Corner c has (ci, cj) = (c & 1, c >> 1).
struct ElemDofs {
  int wg[16];
  int y1g[4];
  int y2g[4];
};

ElemDofs elem_dofs(const RectMesh& m, int ei, int ej) {
  ElemDofs d;
  for (int c = 0; c < 4; ++c) {
    const int node = m.node_id(ei + (c & 1), ej + (c >> 1));
    for (int t = 0; t < 4; ++t) d.wg[4 * c + t] = m.idx_w(node, t);
    d.y1g[c] = m.idx_y1(node);
    d.y2g[c] = m.idx_y2(node);
  }
  return d;
}

void bfs_shapes(double sx, double sy, double hx, double hy, int dx, int dy,
                double out[16]) {
  double x4[4], y4[4];
  hermite_shapes(sx, hx, dx, x4);
  hermite_shapes(sy, hy, dy, y4);
  for (int c = 0; c < 4; ++c) {
    const int ci = c & 1, cj = c >> 1;
    out[4 * c + 0] = x4[2 * ci] * y4[2 * cj];
    out[4 * c + 1] = x4[2 * ci + 1] * y4[2 * cj];
    out[4 * c + 2] = x4[2 * ci] * y4[2 * cj + 1];
    out[4 * c + 3] = x4[2 * ci + 1] * y4[2 * cj + 1];
  }
}

void q4_shapes(double sx, double sy, double hx, double hy, int dx, int dy,
               double out[4]) {
  double x2[2], y2[2];
  p1_shapes(sx, hx, dx, x2);
  p1_shapes(sy, hy, dy, y2);
  for (int c = 0; c < 4; ++c) out[c] = x2[c & 1] * y2[c >> 1];
}

// Tensor Gauss rule with shape tables; one table serves every element of the
// uniform mesh.
struct ShapeCache {
  int nq = 0;
  std::vector<double> wq, sx, sy;
  std::vector<std::array<double, 16>> w00, w10, w01, w20, w11, w02;
  std::vector<std::array<double, 4>> y00, y10, y01;
};

ShapeCache build_cache(const RectMesh& m, int nqx, int nqy) {
  const GaussRule gx = gauss_legendre_01(nqx);
  const GaussRule gy = gauss_legendre_01(nqy);
  ShapeCache c;
  c.nq = nqx * nqy;
  const double hx = m.hx(), hy = m.hy();
  for (int a = 0; a < nqx; ++a)
    for (int b = 0; b < nqy; ++b) {
      c.wq.push_back(hx * hy * gx.w[a] * gy.w[b]);
      c.sx.push_back(gx.x[a]);
      c.sy.push_back(gy.x[b]);
      std::array<double, 16> t;
      bfs_shapes(gx.x[a], gy.x[b], hx, hy, 0, 0, t.data());
      c.w00.push_back(t);
      bfs_shapes(gx.x[a], gy.x[b], hx, hy, 1, 0, t.data());
      c.w10.push_back(t);
      bfs_shapes(gx.x[a], gy.x[b], hx, hy, 0, 1, t.data());
      c.w01.push_back(t);
      bfs_shapes(gx.x[a], gy.x[b], hx, hy, 2, 0, t.data());
      c.w20.push_back(t);
      bfs_shapes(gx.x[a], gy.x[b], hx, hy, 1, 1, t.data());
      c.w11.push_back(t);
      bfs_shapes(gx.x[a], gy.x[b], hx, hy, 0, 2, t.data());
      c.w02.push_back(t);
      std::array<double, 4> s;
      q4_shapes(gx.x[a], gy.x[b], hx, hy, 0, 0, s.data());
      c.y00.push_back(s);
      q4_shapes(gx.x[a], gy.x[b], hx, hy, 1, 0, s.data());
      c.y10.push_back(s);
      q4_shapes(gx.x[a], gy.x[b], hx, hy, 0, 1, s.data());
      c.y01.push_back(s);
    }
  return c;
}

struct QpState {
  // w derivatives
  double w20 = 0.0, w11 = 0.0, w02 = 0.0, w10 = 0.0, w01 = 0.0, w00 = 0.0;
  // y derivatives
  double y1_10 = 0.0, y1_01 = 0.0, y2_10 = 0.0, y2_01 = 0.0;
};

QpState qp_state(const Eigen::VectorXd& dofs, const ElemDofs& ed,
                 const ShapeCache& c, int qp, bool with_y) {
  QpState s;
  for (int l = 0; l < 16; ++l) {
    const double v = dofs[ed.wg[l]];
    s.w00 += c.w00[qp][l] * v;
    s.w10 += c.w10[qp][l] * v;
    s.w01 += c.w01[qp][l] * v;
    s.w20 += c.w20[qp][l] * v;
    s.w11 += c.w11[qp][l] * v;
    s.w02 += c.w02[qp][l] * v;
  }
  if (with_y) {
    for (int l = 0; l < 4; ++l) {
      s.y1_10 += c.y10[qp][l] * dofs[ed.y1g[l]];
      s.y1_01 += c.y01[qp][l] * dofs[ed.y1g[l]];
      s.y2_10 += c.y10[qp][l] * dofs[ed.y2g[l]];
      s.y2_01 += c.y01[qp][l] * dofs[ed.y2g[l]];
    }
  }
  return s;
}

Eigen::Vector3d hess_voigt(const QpState& s, double eps) {
  return Eigen::Vector3d(s.w20, s.w02 / (eps * eps), M_SQRT2 * s.w11 / eps);
}

Eigen::Vector3d strain_voigt(const QpState& s, double eps) {
  const double p1 = s.w10, p2 = s.w01 / eps;
  const double g11 = s.y1_10 + 0.5 * p1 * p1;
  const double g22 = s.y2_01 / (eps * eps) + 0.5 * p2 * p2;
  const double g12 = (s.y2_10 + s.y1_01) / (2.0 * eps) + 0.5 * p1 * p2;
  return Eigen::Vector3d(g11, g22, M_SQRT2 * g12);
}

}  // namespace

ScaledPlateField::ScaledPlateField(std::shared_ptr<const RectMesh> mesh,
                                   double eps)
    : mesh_(std::move(mesh)), eps_(eps) {
  if (!(eps_ > 0.0 && eps_ <= 1.0))
    throw Error("ScaledPlateField: eps must lie in (0, 1]");
  dofs_ = Eigen::VectorXd::Zero(mesh_->n_dofs());
}

double ScaledPlateField::w(double x1, double x2, int dx, int dy) const {
  const RectMesh& m = *mesh_;
  const int ei = std::clamp(
      static_cast<int>((x1 + 0.5 * m.ell) / m.hx()), 0, m.nx - 1);
  const int ej =
      std::clamp(static_cast<int>((x2 + 0.5) / m.hy()), 0, m.ny - 1);
  const double sx = (x1 - m.x1(ei)) / m.hx();
  const double sy = (x2 - m.x2(ej)) / m.hy();
  double shp[16];
  bfs_shapes(sx, sy, m.hx(), m.hy(), dx, dy, shp);
  const ElemDofs ed = elem_dofs(m, ei, ej);
  double v = 0.0;
  for (int l = 0; l < 16; ++l) v += shp[l] * dofs_[ed.wg[l]];
  return v;
}

double ScaledPlateField::y(int comp, double x1, double x2, int dx,
                           int dy) const {
  const RectMesh& m = *mesh_;
  const int ei = std::clamp(
      static_cast<int>((x1 + 0.5 * m.ell) / m.hx()), 0, m.nx - 1);
  const int ej =
      std::clamp(static_cast<int>((x2 + 0.5) / m.hy()), 0, m.ny - 1);
  const double sx = (x1 - m.x1(ei)) / m.hx();
  const double sy = (x2 - m.x2(ej)) / m.hy();
  double shp[4];
  q4_shapes(sx, sy, m.hx(), m.hy(), dx, dy, shp);
  const ElemDofs ed = elem_dofs(m, ei, ej);
  const int* gl = comp == 0 ? ed.y1g : ed.y2g;
  double v = 0.0;
  for (int l = 0; l < 4; ++l) v += shp[l] * dofs_[gl[l]];
  return v;
}

void ScaledPlateField::set_w_nodal(
    const std::function<std::array<double, 4>(double, double)>& fw) {
  const RectMesh& m = *mesh_;
  for (int j = 0; j <= m.ny; ++j)
    for (int i = 0; i <= m.nx; ++i) {
      const std::array<double, 4> v = fw(m.x1(i), m.x2(j));
      for (int t = 0; t < 4; ++t) dofs_[m.idx_w(m.node_id(i, j), t)] = v[t];
    }
}

void ScaledPlateField::set_y_nodal(
    const std::function<std::array<double, 2>(double, double)>& fy) {
  const RectMesh& m = *mesh_;
  for (int j = 0; j <= m.ny; ++j)
    for (int i = 0; i <= m.nx; ++i) {
      const std::array<double, 2> v = fy(m.x1(i), m.x2(j));
      dofs_[m.idx_y1(m.node_id(i, j))] = v[0];
      dofs_[m.idx_y2(m.node_id(i, j))] = v[1];
    }
}

ScaledOps ops_at(const ScaledPlateField& f, double x1, double x2) {
  const RectMesh& m = f.mesh();
  if (x1 < -0.5 * m.ell - 1e-14 || x1 > 0.5 * m.ell + 1e-14 ||
      x2 < -0.5 - 1e-14 || x2 > 0.5 + 1e-14)
    throw Error("ops_at: point outside the strip S");
  const double eps = f.eps();
  ScaledOps ops;
  const double d1y1 = f.y(0, x1, x2, 1, 0);
  const double d2y1 = f.y(0, x1, x2, 0, 1);
  const double d1y2 = f.y(1, x1, x2, 1, 0);
  const double d2y2 = f.y(1, x1, x2, 0, 1);
  ops.strain_y =
      SymMat2{d1y1, (d1y2 + d2y1) / (2.0 * eps), d2y2 / (eps * eps)};
  ops.grad_eps_w =
      Eigen::Vector2d(f.w(x1, x2, 1, 0), f.w(x1, x2, 0, 1) / eps);
  ops.hess_eps_w = SymMat2{f.w(x1, x2, 2, 0), f.w(x1, x2, 1, 1) / eps,
                           f.w(x1, x2, 0, 2) / (eps * eps)};
  return ops;
}

namespace {

template <typename Fn>
void for_elements(const RectMesh& m, Fn&& fn) {
  for (int ej = 0; ej < m.ny; ++ej)
    for (int ei = 0; ei < m.nx; ++ei) fn(ei, ej);
}

}  // namespace

double energy_ben(const ScaledPlateField& f, const QuadForm2& q) {
  const RectMesh& m = f.mesh();
  const ShapeCache cache = build_cache(m, kQuadX, kQuadY);
  const Eigen::Matrix3d& r = q.rep();
  const double eps = f.eps();
  double total = 0.0;
  for_elements(m, [&](int ei, int ej) {
    const ElemDofs ed = elem_dofs(m, ei, ej);
    for (int qp = 0; qp < cache.nq; ++qp) {
      const QpState s = qp_state(f.dofs(), ed, cache, qp, false);
      const Eigen::Vector3d h = hess_voigt(s, eps);
      total += cache.wq[qp] / 24.0 * h.dot(r * h);
    }
  });
  return total;
}

double energy_ext(const ScaledPlateField& f, const QuadForm2& q) {
  const RectMesh& m = f.mesh();
  const ShapeCache cache = build_cache(m, kQuadX, kQuadY);
  const Eigen::Matrix3d& r = q.rep();
  const double eps = f.eps();
  double total = 0.0;
  for_elements(m, [&](int ei, int ej) {
    const ElemDofs ed = elem_dofs(m, ei, ej);
    for (int qp = 0; qp < cache.nq; ++qp) {
      const QpState s = qp_state(f.dofs(), ed, cache, qp, true);
      const Eigen::Vector3d g = strain_voigt(s, eps);
      total += cache.wq[qp] * 0.5 * g.dot(r * g);
    }
  });
  return total;
}

double det_penalty(const ScaledPlateField& f, double weight) {
  if (!(weight > 0.0)) throw Error("det_penalty: weight must be positive");
  const RectMesh& m = f.mesh();
  const ShapeCache cache = build_cache(m, kQuadX, kQuadY);
  const double eps = f.eps();
  double total = 0.0;
  for_elements(m, [&](int ei, int ej) {
    const ElemDofs ed = elem_dofs(m, ei, ej);
    for (int qp = 0; qp < cache.nq; ++qp) {
      const QpState s = qp_state(f.dofs(), ed, cache, qp, false);
      const double h11 = s.w20, h12 = s.w11 / eps, h22 = s.w02 / (eps * eps);
      const double det = h11 * h22 - h12 * h12;
      total += cache.wq[qp] * weight * det * det;
    }
  });
  return total;
}

PlateDiagNorms plate_diag_norms(const ScaledPlateField& f) {
  const RectMesh& m = f.mesh();
  const ShapeCache cache = build_cache(m, kQuadX, kQuadY);
  const double eps = f.eps();
  double n11 = 0.0, n12 = 0.0, n22 = 0.0;
  for_elements(m, [&](int ei, int ej) {
    const ElemDofs ed = elem_dofs(m, ei, ej);
    for (int qp = 0; qp < cache.nq; ++qp) {
      const QpState s = qp_state(f.dofs(), ed, cache, qp, false);
      n11 += cache.wq[qp] * s.w20 * s.w20;
      n12 += cache.wq[qp] * s.w11 * s.w11 / (eps * eps);
      n22 += cache.wq[qp] * s.w02 * s.w02 / std::pow(eps, 4);
    }
  });
  return {std::sqrt(n11), std::sqrt(n12), std::sqrt(n22)};
}

Eigen::VectorXd plate_load_vector(const RectMesh& mesh, double eps,
                                  const Load2D& loads) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.n_dofs());
  if (loads.empty()) return f;
  const ShapeCache cache = build_cache(mesh, kQuadX, kQuadY);
  for_elements(mesh, [&](int ei, int ej) {
    const ElemDofs ed = elem_dofs(mesh, ei, ej);
    const double xa = mesh.x1(ei), ya = mesh.x2(ej);
    for (int qp = 0; qp < cache.nq; ++qp) {
      const double x1 = xa + cache.sx[qp] * mesh.hx();
      const double x2 = ya + cache.sy[qp] * mesh.hy();
      double qw = 0.0;
      if (loads.q_w) qw += loads.q_w(x1);
      if (loads.m_theta) qw += 12.0 * loads.m_theta(x1) * x2 / eps;
      if (qw != 0.0)
        for (int l = 0; l < 16; ++l)
          f[ed.wg[l]] += cache.wq[qp] * qw * cache.w00[qp][l];
      if (loads.q_y1) {
        const double v = loads.q_y1(x1);
        for (int l = 0; l < 4; ++l)
          f[ed.y1g[l]] += cache.wq[qp] * v * cache.y00[qp][l];
      }
      if (loads.q_y2) {
        const double v = loads.q_y2(x1);
        for (int l = 0; l < 4; ++l)
          f[ed.y2g[l]] += cache.wq[qp] * v * cache.y00[qp][l];
      }
    }
  });
  return f;
}

namespace {

struct Rows2D {
  std::vector<Eigen::VectorXd> rows;
};

Rows2D zero_average_rows(const RectMesh& m, bool with_w, bool with_y) {
  Rows2D out;
  const ShapeCache cache = build_cache(m, kQuadX, kQuadY);
  const int n = m.n_dofs();
  Eigen::VectorXd rw0 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd rw1 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd rw2 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd ry1 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd ry2 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd rrot = Eigen::VectorXd::Zero(n);
  for_elements(m, [&](int ei, int ej) {
    const ElemDofs ed = elem_dofs(m, ei, ej);
    for (int qp = 0; qp < cache.nq; ++qp) {
      for (int l = 0; l < 16; ++l) {
        rw0[ed.wg[l]] += cache.wq[qp] * cache.w00[qp][l];
        rw1[ed.wg[l]] += cache.wq[qp] * cache.w10[qp][l];
        rw2[ed.wg[l]] += cache.wq[qp] * cache.w01[qp][l];
      }
      for (int l = 0; l < 4; ++l) {
        ry1[ed.y1g[l]] += cache.wq[qp] * cache.y00[qp][l];
        ry2[ed.y2g[l]] += cache.wq[qp] * cache.y00[qp][l];
        rrot[ed.y2g[l]] += cache.wq[qp] * cache.y10[qp][l];
        rrot[ed.y1g[l]] -= cache.wq[qp] * cache.y01[qp][l];
      }
    }
  });
  if (with_w) {
    out.rows.push_back(rw0);
    out.rows.push_back(rw1);
    out.rows.push_back(rw2);
  }
  if (with_y) {
    out.rows.push_back(ry1);
    out.rows.push_back(ry2);
    out.rows.push_back(rrot);
  }
  return out;
}

}  // namespace

ReducedSystem build_reduced_system_2d(const RectMesh& mesh, PlateModel model,
                                      const Constraints2D& bc) {
  const bool with_y = model == PlateModel::kVk;
  const int n = mesh.n_dofs();
  std::vector<char> include(n, 0);

  for (int j = 0; j <= mesh.ny; ++j)
    for (int i = 0; i <= mesh.nx; ++i) {
      const int node = mesh.node_id(i, j);
      const bool boundary =
          i == 0 || i == mesh.nx || j == 0 || j == mesh.ny;
      const bool w_on = bc.w != Bc::kClamped || !boundary;
      for (int t = 0; t < 4; ++t)
        include[mesh.idx_w(node, t)] = w_on ? 1 : 0;
      if (with_y) {
        const bool y_on = bc.y != Bc::kClamped || !boundary;
        include[mesh.idx_y1(node)] = y_on ? 1 : 0;
        include[mesh.idx_y2(node)] = y_on ? 1 : 0;
      }
    }

  ReducedSystem sys;
  for (int i = 0; i < n; ++i)
    if (include[i]) sys.full_of_red.push_back(i);

  const Rows2D rows = zero_average_rows(
      mesh, bc.w == Bc::kZeroAverage,
      with_y && bc.y == Bc::kZeroAverage);
  sys.rows.resize(static_cast<int>(rows.rows.size()), sys.n_reduced());
  for (int r = 0; r < static_cast<int>(rows.rows.size()); ++r)
    for (int i = 0; i < sys.n_reduced(); ++i)
      sys.rows(r, i) = rows.rows[r][sys.full_of_red[i]];
  return sys;
}

void recenter(ScaledPlateField* f, bool with_y) {
  const RectMesh& m = f->mesh();
  const Rows2D rows = zero_average_rows(m, true, with_y);
  const double area = m.ell;
  const double r0 = rows.rows[0].dot(f->dofs());
  const double r1 = rows.rows[1].dot(f->dofs());
  const double r2 = rows.rows[2].dot(f->dofs());
  const double a = r0 / area, b = r1 / area, c = r2 / area;
  for (int j = 0; j <= m.ny; ++j)
    for (int i = 0; i <= m.nx; ++i) {
      const int node = m.node_id(i, j);
      f->dofs()[m.idx_w(node, 0)] -= a + b * m.x1(i) + c * m.x2(j);
      f->dofs()[m.idx_w(node, 1)] -= b;
      f->dofs()[m.idx_w(node, 2)] -= c;
    }
  if (with_y) {
    const double s1 = rows.rows[3].dot(f->dofs()) / area;
    const double s2 = rows.rows[4].dot(f->dofs()) / area;
    const double rot = rows.rows[5].dot(f->dofs()) / (2.0 * area);
    for (int j = 0; j <= m.ny; ++j)
      for (int i = 0; i <= m.nx; ++i) {
        const int node = m.node_id(i, j);
        f->dofs()[m.idx_y1(node)] -= s1 - rot * m.x2(j);
        f->dofs()[m.idx_y2(node)] -= s2 + rot * m.x1(i);
      }
  }
}

namespace {

struct PlateProblem {
  const RectMesh& mesh;
  double eps;
  const QuadForm2& q;
  PlateModel model;
  double penalty_weight = 0.0;
  const ShapeCache cache;
  std::vector<int> red_of_full;
  const ReducedSystem& sys;

  PlateProblem(const RectMesh& m, double e, const QuadForm2& qq,
               PlateModel mod, const ReducedSystem& s)
      : mesh(m), eps(e), q(qq), model(mod),
        cache(build_cache(m, kQuadX, kQuadY)), sys(s) {
    red_of_full.assign(m.n_dofs(), -1);
    for (int i = 0; i < s.n_reduced(); ++i) red_of_full[s.full_of_red[i]] = i;
  }

  bool with_y() const { return model == PlateModel::kVk; }

  double energy_and_gradient(const Eigen::VectorXd& dofs,
                             Eigen::VectorXd* gfull) const {
    const Eigen::Matrix3d& r = q.rep();
    const double e2 = eps * eps;
    double total = 0.0;
    gfull->setZero();
    for_elements(mesh, [&](int ei, int ej) {
      const ElemDofs ed = elem_dofs(mesh, ei, ej);
      for (int qp = 0; qp < cache.nq; ++qp) {
        const QpState s = qp_state(dofs, ed, cache, qp, with_y());
        const double wq = cache.wq[qp];
        {
          const Eigen::Vector3d h = hess_voigt(s, eps);
          const Eigen::Vector3d rh = r * h;
          total += wq / 24.0 * h.dot(rh);
          for (int l = 0; l < 16; ++l) {
            const double dh0 = cache.w20[qp][l];
            const double dh1 = cache.w02[qp][l] / e2;
            const double dh2 = M_SQRT2 * cache.w11[qp][l] / eps;
            (*gfull)[ed.wg[l]] +=
                wq / 12.0 * (rh[0] * dh0 + rh[1] * dh1 + rh[2] * dh2);
          }
        }
        if (model == PlateModel::kVk) {
          const Eigen::Vector3d g = strain_voigt(s, eps);
          const Eigen::Vector3d rg = r * g;
          total += wq * 0.5 * g.dot(rg);
          const double p1 = s.w10, p2 = s.w01 / eps;
          for (int l = 0; l < 16; ++l) {
            const double dp1 = cache.w10[qp][l];
            const double dp2 = cache.w01[qp][l] / eps;
            const double dg0 = p1 * dp1;
            const double dg1 = p2 * dp2;
            const double dg2 = M_SQRT2 * 0.5 * (p1 * dp2 + p2 * dp1);
            (*gfull)[ed.wg[l]] +=
                wq * (rg[0] * dg0 + rg[1] * dg1 + rg[2] * dg2);
          }
          for (int l = 0; l < 4; ++l) {
            const double d1 = cache.y10[qp][l], d2 = cache.y01[qp][l];
            (*gfull)[ed.y1g[l]] +=
                wq * (rg[0] * d1 + rg[2] * M_SQRT2 * d2 / (2.0 * eps));
            (*gfull)[ed.y2g[l]] +=
                wq * (rg[1] * d2 / e2 + rg[2] * M_SQRT2 * d1 / (2.0 * eps));
          }
        }
        if (model == PlateModel::kCvkPenalty && penalty_weight > 0.0) {
          const double h11 = s.w20, h12 = s.w11 / eps, h22 = s.w02 / e2;
          const double det = h11 * h22 - h12 * h12;
          total += wq * penalty_weight * det * det;
          const double fac = wq * penalty_weight * 2.0 * det;
          for (int l = 0; l < 16; ++l) {
            const double dh11 = cache.w20[qp][l];
            const double dh12 = cache.w11[qp][l] / eps;
            const double dh22 = cache.w02[qp][l] / e2;
            (*gfull)[ed.wg[l]] +=
                fac * (h22 * dh11 + h11 * dh22 - 2.0 * h12 * dh12);
          }
        }
      }
    });
    return total;
  }

  Eigen::SparseMatrix<double> hessian(const Eigen::VectorXd& dofs) const {
    const Eigen::Matrix3d& r = q.rep();
    const double e2 = eps * eps;
    std::vector<Eigen::Triplet<double>> trips;
    const auto add = [&](int fi, int fj, double v) {
      const int ri = red_of_full[fi];
      const int rj = red_of_full[fj];
      if (ri >= 0 && rj >= 0 && v != 0.0) trips.emplace_back(ri, rj, v);
    };
    for_elements(mesh, [&](int ei, int ej) {
      const ElemDofs ed = elem_dofs(mesh, ei, ej);
      for (int qp = 0; qp < cache.nq; ++qp) {
        const QpState s = qp_state(dofs, ed, cache, qp, with_y());
        const double wq = cache.wq[qp];
        // Bending block.
        {
          Eigen::Matrix<double, 3, 16> dh;
          for (int l = 0; l < 16; ++l) {
            dh(0, l) = cache.w20[qp][l];
            dh(1, l) = cache.w02[qp][l] / e2;
            dh(2, l) = M_SQRT2 * cache.w11[qp][l] / eps;
          }
          const Eigen::Matrix<double, 16, 16> hb =
              wq / 12.0 * dh.transpose() * r * dh;
          for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) add(ed.wg[i], ed.wg[j], hb(i, j));
        }
        if (model == PlateModel::kVk) {
          const Eigen::Vector3d g = strain_voigt(s, eps);
          const Eigen::Vector3d rg = r * g;
          const double p1 = s.w10, p2 = s.w01 / eps;
          // Rows of the strain variation for the 24 local dofs (16 w + 8 y).
          Eigen::Matrix<double, 3, 24> dg = Eigen::Matrix<double, 3, 24>::Zero();
          int gl[24];
          for (int l = 0; l < 16; ++l) {
            const double dp1 = cache.w10[qp][l];
            const double dp2 = cache.w01[qp][l] / eps;
            dg(0, l) = p1 * dp1;
            dg(1, l) = p2 * dp2;
            dg(2, l) = M_SQRT2 * 0.5 * (p1 * dp2 + p2 * dp1);
            gl[l] = ed.wg[l];
          }
          for (int l = 0; l < 4; ++l) {
            const double d1 = cache.y10[qp][l], d2 = cache.y01[qp][l];
            dg(0, 16 + l) = d1;
            dg(2, 16 + l) = M_SQRT2 * d2 / (2.0 * eps);
            gl[16 + l] = ed.y1g[l];
            dg(1, 20 + l) = d2 / e2;
            dg(2, 20 + l) = M_SQRT2 * d1 / (2.0 * eps);
            gl[20 + l] = ed.y2g[l];
          }
          const Eigen::Matrix<double, 24, 24> he =
              wq * dg.transpose() * r * dg;
          for (int i = 0; i < 24; ++i)
            for (int j = 0; j < 24; ++j) add(gl[i], gl[j], he(i, j));
          // Geometric part: (R g) . d2(strain) in the w block.
          for (int i = 0; i < 16; ++i) {
            const double dp1i = cache.w10[qp][i];
            const double dp2i = cache.w01[qp][i] / eps;
            for (int j = 0; j < 16; ++j) {
              const double dp1j = cache.w10[qp][j];
              const double dp2j = cache.w01[qp][j] / eps;
              const double v =
                  wq * (rg[0] * dp1i * dp1j + rg[1] * dp2i * dp2j +
                        rg[2] * M_SQRT2 * 0.5 *
                            (dp1i * dp2j + dp2i * dp1j));
              add(ed.wg[i], ed.wg[j], v);
            }
          }
        }
        if (model == PlateModel::kCvkPenalty && penalty_weight > 0.0) {
          const double h11 = s.w20, h12 = s.w11 / eps, h22 = s.w02 / e2;
          const double det = h11 * h22 - h12 * h12;
          double dd[16];
          for (int l = 0; l < 16; ++l) {
            const double dh11 = cache.w20[qp][l];
            const double dh12 = cache.w11[qp][l] / eps;
            const double dh22 = cache.w02[qp][l] / e2;
            dd[l] = h22 * dh11 + h11 * dh22 - 2.0 * h12 * dh12;
          }
          const double f2 = wq * penalty_weight * 2.0;
          for (int i = 0; i < 16; ++i) {
            const double dh11i = cache.w20[qp][i];
            const double dh12i = cache.w11[qp][i] / eps;
            const double dh22i = cache.w02[qp][i] / e2;
            for (int j = 0; j < 16; ++j) {
              const double dh11j = cache.w20[qp][j];
              const double dh12j = cache.w11[qp][j] / eps;
              const double dh22j = cache.w02[qp][j] / e2;
              const double d2det = dh11i * dh22j + dh22i * dh11j -
                                   2.0 * dh12i * dh12j;
              add(ed.wg[i], ed.wg[j],
                  f2 * (dd[i] * dd[j] + det * d2det));
            }
          }
        }
      }
    });
    Eigen::SparseMatrix<double> h(sys.n_reduced(), sys.n_reduced());
    h.setFromTriplets(trips.begin(), trips.end());
    return h;
  }
};

}  // namespace

double plate_energy_and_gradient(PlateModel model, const ScaledPlateField& f,
                                 const QuadForm2& q, double penalty_weight,
                                 Eigen::VectorXd* grad) {
  const ReducedSystem empty;
  PlateProblem prob(f.mesh(), f.eps(), q, model, empty);
  prob.penalty_weight = penalty_weight;
  grad->resize(f.mesh().n_dofs());
  return prob.energy_and_gradient(f.dofs(), grad);
}

Eigen::SparseMatrix<double> plate_hessian(PlateModel model,
                                          const ScaledPlateField& f,
                                          const QuadForm2& q,
                                          double penalty_weight,
                                          const ReducedSystem& sys) {
  PlateProblem prob(f.mesh(), f.eps(), q, model, sys);
  prob.penalty_weight = penalty_weight;
  return prob.hessian(f.dofs());
}

PlateSolveResult minimize_plate(PlateModel model,
                                std::shared_ptr<const RectMesh> mesh,
                                double eps, const QuadForm2& q,
                                const Load2D& loads, const Constraints2D& bc,
                                const PlateSolveOptions& opt) {
  const ReducedSystem sys = build_reduced_system_2d(*mesh, model, bc);
  const Eigen::VectorXd fvec_full = plate_load_vector(*mesh, eps, loads);
  const Eigen::VectorXd fvec = sys.gather(fvec_full);

  ScaledPlateField field(mesh, eps);
  PlateSolveResult result{field, 0.0, 0.0, 0.0, 0, 0.0, {}};
  PlateProblem prob(*mesh, eps, q, model, sys);

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(sys.n_reduced());
  if (opt.start) {
    if (opt.start->eps() != eps)
      throw Error("minimize_plate: start field has a different eps");
    x0 = sys.gather(opt.start->dofs());
  }

  Eigen::VectorXd work_full = Eigen::VectorXd::Zero(mesh->n_dofs());
  Eigen::VectorXd grad_full(mesh->n_dofs());
  auto fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    work_full.setZero();
    sys.scatter(x, &work_full);
    const double e = prob.energy_and_gradient(work_full, &grad_full);
    *g = sys.gather(grad_full) - fvec;
    return e - fvec.dot(x);
  };
  auto hs = [&](const Eigen::VectorXd& x) {
    work_full.setZero();
    sys.scatter(x, &work_full);
    return prob.hessian(work_full);
  };

  NewtonOptions nopt;
  nopt.tol = opt.tol;
  nopt.max_iters = opt.max_iters;

  if (model == PlateModel::kLvk) {
    const Eigen::SparseMatrix<double> k = hs(x0);
    const KktOperator kkt(k, sys.rows);
    const Eigen::VectorXd x = kkt.solve(fvec);
    sys.scatter(x, &result.field.dofs());
    result.iterations = 1;
  } else if (model == PlateModel::kVk) {
    const NewtonOutcome out = newton_minimize(fg, hs, sys.rows, x0, nopt);
    if (!out.converged)
      throw SolveError("minimize_plate: vK descent did not converge, |grad| = " +
                       std::to_string(out.grad_norm));
    sys.scatter(out.x, &result.field.dofs());
    result.iterations = out.iterations;
    result.grad_norm = out.grad_norm;
    result.history = out.f_history;
  } else {
    if (opt.penalty_weights.empty())
      throw Error("minimize_plate: empty penalty continuation schedule");
    Eigen::VectorXd x = x0;
    NewtonOutcome out;
    for (double w : opt.penalty_weights) {
      prob.penalty_weight = w;
      out = newton_minimize(fg, hs, sys.rows, x, nopt);
      if (!out.converged)
        throw SolveError(
            "minimize_plate: penalty stage (weight " + std::to_string(w) +
            ") did not converge, |grad| = " + std::to_string(out.grad_norm));
      x = out.x;
      result.iterations += out.iterations;
      result.history.insert(result.history.end(), out.f_history.begin(),
                            out.f_history.end());
    }
    if (opt.bracket_reference) {
      Eigen::VectorXd xref = sys.gather(opt.bracket_reference->dofs());
      Eigen::VectorXd gtmp(x.size());
      const double f_cur = fg(x, &gtmp);
      const double f_ref = fg(xref, &gtmp);
      if (f_ref < f_cur) {
        out = newton_minimize(fg, hs, sys.rows, xref, nopt);
        if (out.converged && out.f <= f_cur) x = out.x;
      }
    }
    result.grad_norm = out.grad_norm;
    sys.scatter(x, &result.field.dofs());
  }

  result.energy = energy_ben(result.field, q);
  if (model == PlateModel::kVk) result.energy += energy_ext(result.field, q);
  result.penalty_residual = det_penalty(result.field, 1.0);
  result.objective = result.energy - fvec_full.dot(result.field.dofs());
  return result;
}

}  // namespace vkr
