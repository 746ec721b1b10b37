#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vkr/gauss.hpp"
#include "vkr/plate.hpp"

using namespace vkr;

namespace {

std::shared_ptr<const RectMesh> make_mesh(double ell, int nx, int ny) {
  return std::make_shared<RectMesh>(ell, nx, ny);
}

ScaledPlateField random_plate_field(std::shared_ptr<const RectMesh> mesh,
                                    double eps, unsigned seed,
                                    double scale = 1.0) {
  ScaledPlateField f(mesh, eps);
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist(0.0, scale);
  for (int i = 0; i < f.dofs().size(); ++i) f.dofs()[i] = dist(rng);
  return f;
}

// Quadrature of a pointwise energy density, independent of the assembled
// element loops (refined-quadrature oracle).
double dense_energy(const ScaledPlateField& f, int cells_x, int cells_y,
                    int pts, const std::function<double(double, double)>& d) {
  const GaussRule rule = gauss_legendre_01(pts);
  const double ell = f.mesh().ell;
  const double hx = ell / cells_x, hy = 1.0 / cells_y;
  double total = 0.0;
  for (int cx = 0; cx < cells_x; ++cx)
    for (int cy = 0; cy < cells_y; ++cy)
      for (int a = 0; a < rule.size(); ++a)
        for (int b = 0; b < rule.size(); ++b) {
          const double x1 = -0.5 * ell + (cx + rule.x[a]) * hx;
          const double x2 = -0.5 + (cy + rule.x[b]) * hy;
          total += hx * hy * rule.w[a] * rule.w[b] * d(x1, x2);
        }
  return total;
}

}  // namespace

TEST_CASE("ops_at reproduces the scaled operator definitions") {
  const auto mesh = make_mesh(1.0, 8, 4);
  for (double eps : {1.0, 0.25, 0.1}) {
    ScaledPlateField f(mesh, eps);
    f.set_w_nodal([](double x1, double) {
      return std::array<double, 4>{x1 * x1, 2.0 * x1, 0.0, 0.0};
    });
    ScaledOps ops = ops_at(f, 0.21, -0.13);
    CHECK(ops.hess_eps_w.a11 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ops.hess_eps_w.a12 == doctest::Approx(0.0));
    CHECK(ops.hess_eps_w.a22 == doctest::Approx(0.0));

    f.set_w_nodal([](double, double x2) {
      return std::array<double, 4>{x2 * x2, 0.0, 2.0 * x2, 0.0};
    });
    ops = ops_at(f, -0.3, 0.4);
    CHECK(ops.hess_eps_w.a11 == doctest::Approx(0.0));
    CHECK(ops.hess_eps_w.a22 ==
          doctest::Approx(2.0 / (eps * eps)).epsilon(1e-12));

    f.set_w_nodal([](double, double) {
      return std::array<double, 4>{0.0, 0.0, 0.0, 0.0};
    });
    f.set_y_nodal([](double, double x2) {
      return std::array<double, 2>{x2, 0.0};
    });
    ops = ops_at(f, 0.1, 0.1);
    CHECK(ops.strain_y.a11 == doctest::Approx(0.0));
    CHECK(ops.strain_y.a12 ==
          doctest::Approx(1.0 / (2.0 * eps)).epsilon(1e-12));
    CHECK(ops.strain_y.a22 == doctest::Approx(0.0));
  }
  ScaledPlateField f(mesh, 0.5);
  CHECK_THROWS_AS(ops_at(f, 2.0, 0.0), Error);
}

TEST_CASE("energy_ben: zero field, x2-independent profile, twist ansatz") {
  const auto mesh = make_mesh(1.0, 16, 6);
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));

  ScaledPlateField zero(mesh, 0.3);
  CHECK(energy_ben(zero, q) == 0.0);

  // w(x1) = x1^2 - 1/12: energy (1/24) Q2(2,0;0) for every eps.
  const double expect = eval_q2(q, SymMat2{2.0, 0.0, 0.0}) / 24.0;
  for (double eps : {1.0, 0.2, 0.05}) {
    ScaledPlateField f(mesh, eps);
    f.set_w_nodal([](double x1, double) {
      return std::array<double, 4>{x1 * x1 - 1.0 / 12.0, 2.0 * x1, 0.0, 0.0};
    });
    CHECK(energy_ben(f, q) == doctest::Approx(expect).epsilon(1e-12));
  }

  // w = w(x1) + eps x2 theta(x1) approaches (1/24) int Q2(w'', theta'; 0).
  const auto wf = [](double x) { return 0.1 * std::sin(2.0 * M_PI * x); };
  const auto wf2 = [](double x) {
    return -0.1 * 4.0 * M_PI * M_PI * std::sin(2.0 * M_PI * x);
  };
  const auto th = [](double x) { return 0.2 * std::sin(2.0 * M_PI * x); };
  const auto thp = [](double x) {
    return 0.2 * 2.0 * M_PI * std::cos(2.0 * M_PI * x);
  };
  const double limit = dense_energy(
      ScaledPlateField(mesh, 1.0), 32, 4, 6, [&](double x1, double) {
        return eval_q2(q, SymMat2{wf2(x1), thp(x1), 0.0}) / 24.0;
      });
  double prev_err = 1e9;
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto mesh_fine = make_mesh(1.0, 48, 6);
    ScaledPlateField f(mesh_fine, eps);
    f.set_w_nodal([&](double x1, double x2) {
      return std::array<double, 4>{wf(x1) + eps * x2 * th(x1),
                                   // d1, d2, d12
                                   0.1 * 2.0 * M_PI * std::cos(2.0 * M_PI * x1) +
                                       eps * x2 * thp(x1),
                                   eps * th(x1), eps * thp(x1)};
    });
    const double err = std::abs(energy_ben(f, q) - limit);
    CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("energy_ext: zero strain competitor gives zero energy") {
  const auto mesh = make_mesh(1.0, 16, 6);
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  const double eps = 0.4;

  ScaledPlateField f(mesh, eps);
  CHECK(energy_ext(f, q) == 0.0);

  // w = c x1, y1 with xi1' = -c^2/2, y2 = 0: the membrane argument vanishes.
  const double c = 0.6;
  f.set_w_nodal([&](double x1, double) {
    return std::array<double, 4>{c * x1, c, 0.0, 0.0};
  });
  f.set_y_nodal([&](double x1, double) {
    return std::array<double, 2>{-0.5 * c * c * x1, 0.0};
  });
  CHECK(energy_ext(f, q) <= 1e-26);
}

TEST_CASE("assembled energies match the refined-quadrature oracle") {
  const auto mesh = make_mesh(1.3, 7, 5);
  const QuadForm2 q = q2_isotropic(Material(0.8, 1.1));
  const double eps = 0.35;
  const ScaledPlateField f = random_plate_field(mesh, eps, 99, 0.3);

  const double oracle_ben =
      dense_energy(f, 7, 5, 9, [&](double x1, double x2) {
        const ScaledOps ops = ops_at(f, x1, x2);
        return eval_q2(q, ops.hess_eps_w) / 24.0;
      });
  CHECK(energy_ben(f, q) ==
        doctest::Approx(oracle_ben).epsilon(1e-10));

  const double oracle_ext =
      dense_energy(f, 7, 5, 9, [&](double x1, double x2) {
        const ScaledOps ops = ops_at(f, x1, x2);
        const Eigen::Vector2d p = ops.grad_eps_w;
        const SymMat2 g{ops.strain_y.a11 + 0.5 * p[0] * p[0],
                        ops.strain_y.a12 + 0.5 * p[0] * p[1],
                        ops.strain_y.a22 + 0.5 * p[1] * p[1]};
        return 0.5 * eval_q2(q, g);
      });
  CHECK(energy_ext(f, q) ==
        doctest::Approx(oracle_ext).epsilon(1e-10));

  const double oracle_pen =
      dense_energy(f, 7, 5, 9, [&](double x1, double x2) {
        const ScaledOps ops = ops_at(f, x1, x2);
        const double d = ops.hess_eps_w.det();
        return d * d;
      });
  CHECK(det_penalty(f, 2.0) ==
        doctest::Approx(2.0 * oracle_pen).epsilon(1e-10));
  CHECK(det_penalty(f, 4.0) ==
        doctest::Approx(2.0 * det_penalty(f, 2.0)).epsilon(1e-12));
}

TEST_CASE("det_penalty vanishes exactly on x2-independent profiles") {
  const auto mesh = make_mesh(1.0, 12, 4);
  ScaledPlateField f(mesh, 0.2);
  f.set_w_nodal([](double x1, double) {
    return std::array<double, 4>{std::sin(3.0 * x1), 3.0 * std::cos(3.0 * x1),
                                 0.0, 0.0};
  });
  CHECK(det_penalty(f, 100.0) <= 1e-20);
}

TEST_CASE("det_penalty of the twist ansatz integrates theta'^4") {
  // w = w(x1) + eps x2 theta(x1): det Hess_eps = -(theta')^2.
  const auto mesh = make_mesh(1.0, 32, 4);
  const double eps = 0.3;
  const double a = 0.4;  // theta = a x -> theta' = a
  ScaledPlateField f(mesh, eps);
  f.set_w_nodal([&](double x1, double x2) {
    return std::array<double, 4>{x1 * x1 + eps * x2 * a * x1, 2.0 * x1 +
                                     eps * x2 * a,
                                 eps * a * x1, eps * a};
  });
  const double expect = std::pow(a, 4);  // weight 1, int over S of a^4
  CHECK(det_penalty(f, 1.0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("scaling identity: scaled energies equal unscaled ones on S_eps") {
  // Polynomial u, v on S_eps; y, w their scaled transplants on S.
  const double eps = 0.3, ell = 1.0;
  const auto mesh = make_mesh(ell, 10, 6);
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));

  // v(X1, X2) = X1^2 + X1 X2 + 2 X2^2 ; u = (X1 X2, X1 X2). Both transplants
  // are exactly representable (bicubic w, bilinear y).
  const auto v = [](double X1, double X2) {
    return X1 * X1 + X1 * X2 + 2.0 * X2 * X2;
  };
  const auto u1 = [](double X1, double X2) { return X1 * X2; };
  const auto u2 = [](double X1, double X2) { return X1 * X2; };

  ScaledPlateField f(mesh, eps);
  f.set_w_nodal([&](double x1, double x2) {
    const double X2 = eps * x2;
    return std::array<double, 4>{v(x1, X2),
                                 2.0 * x1 + X2,               // d1
                                 eps * (x1 + 4.0 * X2),       // d2
                                 eps * 1.0};                  // d12
  });
  f.set_y_nodal([&](double x1, double x2) {
    const double X2 = eps * x2;
    return std::array<double, 2>{u1(x1, X2), eps * u2(x1, X2)};
  });

  // Unscaled energies over S_eps by quadrature.
  const GaussRule rule = gauss_legendre_01(8);
  double jben = 0.0, jext = 0.0;
  const int cx = 20, cy = 8;
  for (int a = 0; a < cx; ++a)
    for (int b = 0; b < cy; ++b)
      for (int ia = 0; ia < rule.size(); ++ia)
        for (int ib = 0; ib < rule.size(); ++ib) {
          const double X1 = -0.5 * ell + (a + rule.x[ia]) * ell / cx;
          const double X2 = -0.5 * eps + (b + rule.x[ib]) * eps / cy;
          const double wq =
              (ell / cx) * (eps / cy) * rule.w[ia] * rule.w[ib];
          // Hess v = (2, 1; 1, 4), grad v = (2X1 + X2, X1 + 4X2)
          jben += wq / 24.0 * eval_q2(q, SymMat2{2.0, 1.0, 4.0});
          // E u = sym grad u; grad u1 = (X2, X1), grad u2 = (X2, X1)
          const SymMat2 strain{X2, 0.5 * (X1 + X2), X1};
          const double g1 = 2.0 * X1 + X2, g2 = X1 + 4.0 * X2;
          const SymMat2 arg{strain.a11 + 0.5 * g1 * g1,
                            strain.a12 + 0.5 * g1 * g2,
                            strain.a22 + 0.5 * g2 * g2};
          jext += wq * 0.5 * eval_q2(q, arg);
        }
  CHECK(energy_ben(f, q) == doctest::Approx(jben / eps).epsilon(1e-11));
  CHECK(energy_ext(f, q) == doctest::Approx(jext / eps).epsilon(1e-11));
}

TEST_CASE("plate gradients match finite differences of the energies") {
  const auto mesh = make_mesh(1.0, 4, 3);
  const QuadForm2 q = q2_isotropic(Material(1.0, 0.7));
  const double eps = 0.45;
  const double weight = 60.0;

  for (PlateModel model :
       {PlateModel::kLvk, PlateModel::kVk, PlateModel::kCvkPenalty}) {
    ScaledPlateField f = random_plate_field(mesh, eps, 7, 0.4);
    const auto value = [&](const ScaledPlateField& g) {
      double v = energy_ben(g, q);
      if (model == PlateModel::kVk) v += energy_ext(g, q);
      if (model == PlateModel::kCvkPenalty) v += det_penalty(g, weight);
      return v;
    };
    Eigen::VectorXd grad;
    const double e = plate_energy_and_gradient(model, f, q, weight, &grad);
    CHECK(e == doctest::Approx(value(f)).epsilon(1e-12));

    const double h = 1e-6;
    std::mt19937 rng(5);
    double max_rel = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
      const int i = std::uniform_int_distribution<int>(
          0, static_cast<int>(f.dofs().size()) - 1)(rng);
      ScaledPlateField fp = f, fm = f;
      fp.dofs()[i] += h;
      fm.dofs()[i] -= h;
      const double fd = (value(fp) - value(fm)) / (2.0 * h);
      if (std::abs(fd) > 1e-8)
        max_rel = std::max(
            max_rel, std::abs(grad[i] - fd) / std::max(1.0, std::abs(fd)));
    }
    CHECK(max_rel <= 1e-6);
  }
}

TEST_CASE("plate hessians match directional gradient differences") {
  const auto mesh = make_mesh(1.0, 3, 3);
  const QuadForm2 q = q2_isotropic(Material(1.0, 0.7));
  const double eps = 0.5;
  const double weight = 25.0;
  Constraints2D bc;
  bc.w = Bc::kFree;
  bc.y = Bc::kFree;

  for (PlateModel model :
       {PlateModel::kLvk, PlateModel::kVk, PlateModel::kCvkPenalty}) {
    const ReducedSystem sys = build_reduced_system_2d(*mesh, model, bc);
    ScaledPlateField f = random_plate_field(mesh, eps, 31, 0.3);
    const Eigen::SparseMatrix<double> hmat =
        plate_hessian(model, f, q, weight, sys);
    std::mt19937 rng(3);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::VectorXd d(sys.n_reduced());
    for (int i = 0; i < d.size(); ++i) d[i] = dist(rng);
    d.normalize();
    const double h = 1e-6;
    ScaledPlateField fp = f, fm = f;
    Eigen::VectorXd dfull = Eigen::VectorXd::Zero(mesh->n_dofs());
    sys.scatter(d, &dfull);
    fp.dofs() += h * dfull;
    fm.dofs() -= h * dfull;
    Eigen::VectorXd gp, gm;
    plate_energy_and_gradient(model, fp, q, weight, &gp);
    plate_energy_and_gradient(model, fm, q, weight, &gm);
    const Eigen::VectorXd hd_fd = (sys.gather(gp) - sys.gather(gm)) / (2.0 * h);
    const Eigen::VectorXd hd = hmat * d;
    CHECK((hd - hd_fd).norm() <= 1e-5 * (1.0 + hd.norm()));
  }
}

TEST_CASE("lvk plate: clamped uniform load refines to a limit") {
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  Load2D loads;
  loads.q_w = [](double) { return 1.0; };
  Constraints2D bc;
  bc.w = Bc::kClamped;
  double prev = -1.0;
  std::vector<double> energies;
  for (int n : {4, 8, 16}) {
    const auto mesh = make_mesh(1.0, n, n);
    const PlateSolveResult res =
        minimize_plate(PlateModel::kLvk, mesh, 1.0, q, loads, bc);
    CHECK(res.objective < 0.0);  // loaded minimum is negative
    CHECK(res.energy > 0.0);
    energies.push_back(res.objective);
  }
  // Conforming nested refinement: objective non-increasing, converging.
  CHECK(energies[1] <= energies[0] + 1e-14);
  CHECK(energies[2] <= energies[1] + 1e-14);
  CHECK(std::abs(energies[2] - energies[1]) <
        0.25 * std::abs(energies[1] - energies[0]));
}

TEST_CASE("zero loads give the zero plate field") {
  const auto mesh = make_mesh(1.0, 4, 3);
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  const Load2D no_loads;
  const Constraints2D bc;
  for (PlateModel model :
       {PlateModel::kLvk, PlateModel::kVk, PlateModel::kCvkPenalty}) {
    const PlateSolveResult res =
        minimize_plate(model, mesh, 0.5, q, no_loads, bc);
    CHECK(res.field.dofs().cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("monotone information under nested refinement, zero-average lvk") {
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  Load2D loads;
  loads.q_w = [](double x1) { return std::sin(2.0 * M_PI * x1); };
  loads.m_theta = [](double x1) { return 0.1 * std::cos(2.0 * M_PI * x1); };
  Constraints2D bc;
  std::vector<double> objectives;
  for (int n : {8, 16, 32}) {
    const auto mesh = make_mesh(1.0, n, 4);
    const PlateSolveResult res =
        minimize_plate(PlateModel::kLvk, mesh, 0.25, q, loads, bc);
    objectives.push_back(res.objective);
  }
  CHECK(objectives[1] <= objectives[0] + 1e-14);
  CHECK(objectives[2] <= objectives[1] + 1e-14);
}

TEST_CASE("recenter produces zero discrete averages without energy change") {
  const auto mesh = make_mesh(1.0, 6, 4);
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  ScaledPlateField f = random_plate_field(mesh, 0.3, 13, 0.5);
  const double eb_before = energy_ben(f, q);
  recenter(&f, true);
  const double eb_after = energy_ben(f, q);
  CHECK(eb_after == doctest::Approx(eb_before).epsilon(1e-11));
  const ReducedSystem sys =
      build_reduced_system_2d(*mesh, PlateModel::kVk, Constraints2D{});
  const Eigen::VectorXd res = sys.rows * sys.gather(f.dofs());
  CHECK(res.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + f.dofs().norm()));
}
