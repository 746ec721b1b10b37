#include "vkr/solve1d.hpp"

#include <cmath>

#include "vkr/gauss.hpp"
#include "vkr/newton.hpp"

namespace vkr {

bool field_active(ModelKind kind, int field) {
  if (kind == ModelKind::kVk) return true;
  return field == 0 || field == 1;  // w and theta
}

namespace {

Eigen::VectorXd integral_row_hermite(const IntervalMesh& mesh, int offset) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(6 * mesh.n_nodes());
  static const GaussRule rule = gauss_legendre_01(kQuad1D);
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double h = mesh.h(e);
    for (int k = 0; k < rule.size(); ++k) {
      double hv[4];
      hermite_shapes(rule.x[k], h, 0, hv);
      for (int a = 0; a < 4; ++a)
        row[offset + 2 * (e + a / 2) + a % 2] += h * rule.w[k] * hv[a];
    }
  }
  return row;
}

Eigen::VectorXd integral_row_p1(const IntervalMesh& mesh, int offset) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(6 * mesh.n_nodes());
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double h = mesh.h(e);
    row[offset + e] += 0.5 * h;
    row[offset + e + 1] += 0.5 * h;
  }
  return row;
}

// int f' = f(right end) - f(left end), for Hermite fields.
Eigen::VectorXd slope_row_hermite(const IntervalMesh& mesh, int offset) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(6 * mesh.n_nodes());
  row[offset + 0] = -1.0;
  row[offset + 2 * (mesh.n_nodes() - 1)] = 1.0;
  return row;
}

// d^2 Qbar / d(kappa, tau)^2 on the active branch.
Eigen::Matrix2d qbar_hessian(const QuadForm2& q, const RelaxConstants& c,
                             double kappa, double tau) {
  const QbarResult res = qbar(q, c, kappa, tau);
  const Eigen::Matrix3d& r = q.rep();
  if (res.branch == QbarBranch::kZeroDet) {
    if (kappa == 0.0) return 2.0 * q.q1_matrix();  // only at the origin
    // V(kappa, tau) = Q2(kappa, tau^2/kappa; tau) along det = 0.
    const double g0 = tau * tau / kappa;
    const Eigen::Vector3d v(kappa, g0, M_SQRT2 * tau);
    const Eigen::Vector3d rv = r * v;
    const Eigen::Vector3d vk(1.0, -tau * tau / (kappa * kappa), 0.0);
    const Eigen::Vector3d vt(0.0, 2.0 * tau / kappa, M_SQRT2);
    const Eigen::Vector3d vkk(0.0, 2.0 * tau * tau / (kappa * kappa * kappa),
                              0.0);
    const Eigen::Vector3d vkt(0.0, -2.0 * tau / (kappa * kappa), 0.0);
    const Eigen::Vector3d vtt(0.0, 2.0 / kappa, 0.0);
    Eigen::Matrix2d h;
    h(0, 0) = 2.0 * (vk.dot(r * vk) + rv.dot(vkk));
    h(0, 1) = h(1, 0) = 2.0 * (vk.dot(r * vt) + rv.dot(vkt));
    h(1, 1) = 2.0 * (vt.dot(r * vt) + rv.dot(vtt));
    return h;
  }
  const double coef = res.branch == QbarBranch::kPosDet ? c.alpha_plus
                                                        : -c.alpha_minus;
  // Schur complement of the (kappa, tau, gamma) Hessian of Q2 + coef det
  // over gamma.
  const double fkk = 2.0 * r(0, 0);
  const double fkt = 2.0 * M_SQRT2 * r(0, 2);
  const double ftt = 4.0 * r(2, 2) - 2.0 * coef;
  const double fkg = 2.0 * r(0, 1) + coef;
  const double ftg = 2.0 * M_SQRT2 * r(1, 2);
  const double fgg = 2.0 * r(1, 1);
  Eigen::Matrix2d h;
  h(0, 0) = fkk - fkg * fkg / fgg;
  h(0, 1) = h(1, 0) = fkt - fkg * ftg / fgg;
  h(1, 1) = ftt - ftg * ftg / fgg;
  return h;
}

}  // namespace

ReducedSystem build_reduced_system(const IntervalMesh& mesh, ModelKind kind,
                                   const Constraints1D& bc) {
  const int n = mesh.n_nodes();
  const int n_full = 6 * n;
  std::vector<char> include(n_full, 0);

  auto mark_hermite = [&](int offset, Bc b) {
    for (int i = 0; i < 2 * n; ++i) include[offset + i] = 1;
    if (b == Bc::kClamped) {
      include[offset + 0] = include[offset + 1] = 0;
      include[offset + 2 * (n - 1)] = include[offset + 2 * (n - 1) + 1] = 0;
    }
  };
  auto mark_p1 = [&](int offset, Bc b) {
    for (int i = 0; i < n; ++i) include[offset + i] = 1;
    if (b == Bc::kClamped) {
      include[offset + 0] = 0;
      include[offset + n - 1] = 0;
    }
  };

  if (field_active(kind, 0)) mark_hermite(0, bc.w);
  if (field_active(kind, 1)) mark_p1(2 * n, bc.theta);
  if (field_active(kind, 2)) mark_p1(3 * n, bc.xi1);
  if (field_active(kind, 3)) mark_hermite(4 * n, bc.xi2);

  ReducedSystem sys;
  for (int i = 0; i < n_full; ++i)
    if (include[i]) sys.full_of_red.push_back(i);

  std::vector<Eigen::VectorXd> rows;
  if (field_active(kind, 0) && bc.w == Bc::kZeroAverage) {
    rows.push_back(integral_row_hermite(mesh, 0));
    rows.push_back(slope_row_hermite(mesh, 0));
  }
  if (field_active(kind, 1) && bc.theta == Bc::kZeroAverage)
    rows.push_back(integral_row_p1(mesh, 2 * n));
  if (field_active(kind, 2) && bc.xi1 == Bc::kZeroAverage)
    rows.push_back(integral_row_p1(mesh, 3 * n));
  if (field_active(kind, 3) && bc.xi2 == Bc::kZeroAverage) {
    rows.push_back(integral_row_hermite(mesh, 4 * n));
    if (bc.xi2_mean_slope) rows.push_back(slope_row_hermite(mesh, 4 * n));
  }

  sys.rows.resize(static_cast<int>(rows.size()), sys.n_reduced());
  for (int r = 0; r < static_cast<int>(rows.size()); ++r)
    for (int i = 0; i < sys.n_reduced(); ++i)
      sys.rows(r, i) = rows[r][sys.full_of_red[i]];
  return sys;
}

namespace {

// Exact Hessian of the discrete energy over the reduced DOFs. For LvK the
// field is irrelevant (constant matrix).
Eigen::SparseMatrix<double> assemble_hessian(const IntervalMesh& mesh,
                                             ModelKind kind,
                                             const QuadForm2& q,
                                             const RelaxConstants* c,
                                             const Field1D& f,
                                             const ReducedSystem& sys) {
  const int n = mesh.n_nodes();
  std::vector<int> red_of_full(6 * n, -1);
  for (int i = 0; i < sys.n_reduced(); ++i) red_of_full[sys.full_of_red[i]] = i;

  const double e0 = q.q0_coeff();
  static const GaussRule rule = gauss_legendre_01(kQuad1D);
  std::vector<Eigen::Triplet<double>> trips;
  const auto add = [&](int fi, int fj, double v) {
    const int ri = red_of_full[fi];
    const int rj = red_of_full[fj];
    if (ri >= 0 && rj >= 0 && v != 0.0) trips.emplace_back(ri, rj, v);
  };

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
      Eigen::Matrix2d h2;
      if (kind == ModelKind::kCvk)
        h2 = qbar_hessian(q, *c, kappa, tau) / 24.0;
      else
        h2 = 2.0 * q.q1_matrix() / 24.0;

      int idx[6];
      double bk[6], bt[6];
      for (int a = 0; a < 4; ++a) {
        idx[a] = 2 * (e + a / 2) + a % 2;
        bk[a] = hw2[a];
        bt[a] = 0.0;
      }
      for (int a = 0; a < 2; ++a) {
        idx[4 + a] = 2 * n + e + a;
        bk[4 + a] = 0.0;
        bt[4 + a] = p1d[a];
      }
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          add(idx[i], idx[j],
              wq * (h2(0, 0) * bk[i] * bk[j] +
                    h2(0, 1) * (bk[i] * bt[j] + bt[i] * bk[j]) +
                    h2(1, 1) * bt[i] * bt[j]));

      if (kind == ModelKind::kVk) {
        hermite_shapes(s, h, 1, hw1);
        const double wp = f.w(x, 1);
        const double g = f.xi1(x, 1) + 0.5 * wp * wp;
        // Stretching (1/2) e0 g^2: Gauss-Newton term over (w, xi1) plus the
        // g d2g curvature in the w block.
        double rowv[6];
        int ridx[6];
        for (int a = 0; a < 4; ++a) {
          ridx[a] = 2 * (e + a / 2) + a % 2;
          rowv[a] = wp * hw1[a];
        }
        for (int a = 0; a < 2; ++a) {
          ridx[4 + a] = 3 * n + e + a;
          rowv[4 + a] = p1d[a];
        }
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j)
            add(ridx[i], ridx[j], wq * e0 * rowv[i] * rowv[j]);
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            add(ridx[i], ridx[j], wq * e0 * g * hw1[i] * hw1[j]);
        // In-plane bending (1/24) e0 xi2''^2.
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            add(4 * n + 2 * (e + i / 2) + i % 2,
                4 * n + 2 * (e + j / 2) + j % 2,
                wq * e0 / 12.0 * hw2[i] * hw2[j]);
      }
    }
  }
  Eigen::SparseMatrix<double> kmat(sys.n_reduced(), sys.n_reduced());
  kmat.setFromTriplets(trips.begin(), trips.end());
  return kmat;
}

}  // namespace

SolveResult1D minimize(ModelKind kind, std::shared_ptr<const IntervalMesh> mesh,
                       const QuadForm2& q, const RelaxConstants* c,
                       const Load1D& loads, const Constraints1D& bc,
                       const SolveOptions1D& opt) {
  if (kind == ModelKind::kCvk && !c)
    throw Error("minimize: CvK requires relaxation constants");

  const ReducedSystem sys = build_reduced_system(*mesh, kind, bc);
  const Eigen::VectorXd fvec_full = load_vector(*mesh, loads);
  const Eigen::VectorXd fvec = sys.gather(fvec_full);

  Field1D field(mesh);
  SolveResult1D result{field, {}, 0.0, 0, 0.0, {}};

  if (kind == ModelKind::kLvk) {
    const Eigen::SparseMatrix<double> kmat =
        assemble_hessian(*mesh, kind, q, c, field, sys);
    const KktOperator kkt(kmat, sys.rows);
    const Eigen::VectorXd x = kkt.solve(fvec);
    sys.scatter(x, &result.field.dofs());
    result.grad_norm = 0.0;
    result.iterations = 1;
  } else {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(sys.n_reduced());
    if (opt.start == SolveOptions1D::Start::kLvk) {
      const SolveResult1D warm =
          minimize(ModelKind::kLvk, mesh, q, nullptr, loads, bc);
      x0 = sys.gather(warm.field.dofs());
    } else if (opt.start == SolveOptions1D::Start::kField) {
      if (!opt.start_field) throw Error("minimize: start field missing");
      x0 = sys.gather(opt.start_field->dofs());
    }

    Field1D work(mesh);
    auto fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
      work.dofs().setZero();
      sys.scatter(x, &work.dofs());
      const EnergyReport rep = energy(kind, work, q, c);
      const Eigen::VectorXd gfull = gradient(kind, work, q, c);
      *g = sys.gather(gfull) - fvec;
      return rep.total - fvec.dot(x);
    };
    auto hess = [&](const Eigen::VectorXd& x) {
      work.dofs().setZero();
      sys.scatter(x, &work.dofs());
      return assemble_hessian(*mesh, kind, q, c, work, sys);
    };
    NewtonOptions nopt;
    nopt.tol = opt.tol;
    nopt.max_iters = opt.max_iters;
    const NewtonOutcome outcome =
        newton_minimize(fg, hess, sys.rows, x0, nopt);
    if (!outcome.converged)
      throw SolveError("minimize: descent did not converge after " +
                       std::to_string(outcome.iterations) +
                       " iterations, |grad| = " +
                       std::to_string(outcome.grad_norm));
    sys.scatter(outcome.x, &result.field.dofs());
    result.iterations = outcome.iterations;
    result.grad_norm = outcome.grad_norm;
    result.history = outcome.f_history;
  }

  result.report = energy(kind, result.field, q, c);
  result.report.load_work = load_work(fvec_full, result.field);
  result.objective = result.report.total - result.report.load_work;
  return result;
}

}  // namespace vkr
