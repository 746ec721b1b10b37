#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "vkr/recovery.hpp"

using namespace vkr;

namespace {

// Zero-average smooth data on I = (-1/2, 1/2).
ProfilePtr w_sine() { return sine_profile(0.1, 2.0 * M_PI); }
ProfilePtr theta_cos() {
  return make_profile([](double x, int d) {
    const double a = 0.2, om = 2.0 * M_PI;
    return a * std::pow(om, d) * std::cos(om * x + d * M_PI_2);
  });
}

// Data in the determinant-free regime |w''| > |theta'|.
ProfilePtr w_bending() {
  return make_profile([](double x, int d) {
    const double om = 2.0 * M_PI;
    const double poly =
        d == 0 ? 1.5 * (x * x - 1.0 / 12.0) : (d == 1 ? 3.0 * x
                                                      : (d == 2 ? 3.0 : 0.0));
    return poly + 0.02 * std::pow(om, d) * std::cos(om * x + d * M_PI_2);
  });
}
ProfilePtr theta_small() { return sine_profile(0.03, 2.0 * M_PI); }

}  // namespace

TEST_CASE("lvk recovery collapses when gamma and theta vanish") {
  // lambda = 0 makes the Q1 argmin gamma identically zero.
  const QuadForm2 q = q2_isotropic(Material(1.0, 0.0));
  const RecoveryInput in =
      RecoveryInput::from_profiles(1.0, q, w_sine(), zero_profile());
  for (double eps : {0.5, 0.1}) {
    const AnsatzPtr a = lvk_recovery(in, eps);
    for (double x1 : {-0.4, 0.0, 0.33})
      for (double x2 : {-0.5, 0.2}) {
        const PlateAnsatz::WDerivs d = a->w_derivs(x1, x2);
        CHECK(d.w == doctest::Approx(in.w->eval(x1, 0)).epsilon(1e-12));
        CHECK(d.d2 == doctest::Approx(0.0));
        CHECK(d.d22 == doctest::Approx(0.0));
      }
  }
}

TEST_CASE("lvk recovery hessian approaches the relaxed matrix") {
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  const RecoveryInput in =
      RecoveryInput::from_profiles(1.0, q, w_sine(), theta_cos());
  const double eps = 1e-3;
  const AnsatzPtr a = lvk_recovery(in, eps);
  double max_err = 0.0;
  for (double x1 : {-0.37, -0.11, 0.02, 0.29, 0.46})
    for (double x2 : {-0.45, -0.1, 0.3, 0.5}) {
      const PlateAnsatz::WDerivs d = a->w_derivs(x1, x2);
      const double kappa = in.w->eval(x1, 2);
      const double tau = in.theta->eval(x1, 1);
      const double gam = in.gamma->eval(x1, 0);
      max_err = std::max({max_err, std::abs(d.d11 - kappa),
                          std::abs(d.d12 / eps - tau),
                          std::abs(d.d22 / (eps * eps) - gam)});
    }
  CHECK(max_err <= 50.0 * eps);
}

TEST_CASE("lvk recovery energies converge monotonically to the limit") {
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  const RecoveryInput in =
      RecoveryInput::from_profiles(1.0, q, w_sine(), theta_cos());
  GammaReportOptions opt;
  opt.final_error_bound = 0.005;
  opt.require_monotone = true;
  const auto rows =
      gamma_report(ModelKind::kLvk, in, {0.2, 0.1, 0.05, 0.025}, opt);
  CHECK(rows.size() == 4);
  CHECK(rows.back().rel_err <= 0.005);
}

TEST_CASE("lvk recovery with zero data gives an all-zero table") {
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  const RecoveryInput in =
      RecoveryInput::from_profiles(1.0, q, zero_profile(), zero_profile());
  const auto rows = gamma_report(ModelKind::kLvk, in, {0.2, 0.1});
  for (const auto& r : rows) {
    CHECK(r.j_eps == doctest::Approx(0.0));
    CHECK(r.j_limit == doctest::Approx(0.0));
    CHECK(r.rel_err == doctest::Approx(0.0));
  }
}

TEST_CASE("recovery fields satisfy the zero-average conditions") {
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  const RecoveryInput in = RecoveryInput::from_profiles(
      1.0, q, w_sine(), theta_cos(), sine_profile(0.05, 4.0 * M_PI),
      sine_profile(0.07, 2.0 * M_PI));
  for (double eps : {0.2, 0.05}) {
    CHECK(ansatz_average_residuals(*lvk_recovery(in, eps))
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
    CHECK(ansatz_average_residuals(*vk_recovery(in, eps))
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
  }
  const RecoveryInput inb = RecoveryInput::from_profiles(
      1.0, q, w_bending(), theta_small());
  const DevelopableChart chart = cvk_chart(inb);
  CHECK(ansatz_average_residuals(*cvk_recovery(chart, inb, 0.1))
            .cwiseAbs()
            .maxCoeff() <= 1e-8);
}

TEST_CASE("vk recovery: zero input, vanishing stretching, 1% convergence") {
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));

  const RecoveryInput zero = RecoveryInput::from_profiles(
      1.0, q, zero_profile(), zero_profile());
  const AnsatzPtr az = vk_recovery(zero, 0.1);
  CHECK(az->w_derivs(0.2, 0.3).w == doctest::Approx(0.0));
  CHECK(az->y_derivs(0.2, 0.3).y1 == doctest::Approx(0.0));
  CHECK(az->y_derivs(0.2, 0.3).y2 == doctest::Approx(0.0));

  // xi1' = -|w'|^2/2 kills the membrane argument in the limit.
  const double amp = 0.3, om = 2.0 * M_PI;
  ProfilePtr w = sine_profile(amp, om);
  ProfilePtr xi1 = make_profile([=](double x, int d) {
    const double c = 0.5 * amp * amp * om * om;
    switch (d) {
      case 0:
        return -c * (0.5 * x + std::sin(2.0 * om * x) / (4.0 * om));
      case 1:
        return -c * 0.5 * (1.0 + std::cos(2.0 * om * x));
      case 2:
        return c * 0.5 * 2.0 * om * std::sin(2.0 * om * x);
      case 3:
        return c * 2.0 * om * om * std::cos(2.0 * om * x);
      default:
        return 0.0;
    }
  });
  const RecoveryInput inm =
      RecoveryInput::from_profiles(1.0, q, w, zero_profile(), xi1);
  double first = 0.0, prev = 1e30;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    const double je = energy_ext_ansatz(*vk_recovery(inm, eps), q);
    CHECK(je < prev);
    if (first == 0.0) first = je;
    prev = je;
  }
  CHECK(prev <= 0.05 * first);

  const RecoveryInput generic = RecoveryInput::from_profiles(
      1.0, q, w_sine(), theta_cos(), sine_profile(0.05, 4.0 * M_PI),
      sine_profile(0.07, 2.0 * M_PI));
  GammaReportOptions opt;
  opt.final_error_bound = 0.01;
  const auto rows =
      gamma_report(ModelKind::kVk, generic, {0.2, 0.1, 0.05, 0.025}, opt);
  CHECK(rows.back().rel_err <= 0.01);
}

TEST_CASE("cvk chart: pure bending, explicit eigen check, eps_max cap") {
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));

  const RecoveryInput pure = RecoveryInput::from_profiles(
      1.0, q, poly_profile({-1.0 / 12.0, 0.0, 1.0}), zero_profile());
  const DevelopableChart cpure = cvk_chart(pure);
  CHECK(cpure.beta(0.2) == doctest::Approx(0.0));
  CHECK(cpure.lambda(0.2) == doctest::Approx(2.0));
  CHECK(std::isinf(cpure.eps_max()));

  // w'' = 2, theta' = 1: M = (2, 1; 1, 1/2), rank one.
  const RecoveryInput lin = RecoveryInput::from_profiles(
      1.0, q, poly_profile({-1.0 / 12.0, 0.0, 1.0}), poly_profile({0.0, 1.0}));
  const DevelopableChart clin = cvk_chart(lin);
  CHECK(clin.lambda(0.1) == doctest::Approx(2.5).epsilon(1e-12));
  Eigen::Matrix2d m;
  m << 2.0, 1.0, 1.0, 0.5;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  const Eigen::Vector2d v = es.eigenvectors().col(1);  // largest eigenvalue
  const double beta_ref = std::atan2(v[1], v[0]);
  CHECK(clin.beta(0.3) == doctest::Approx(beta_ref).epsilon(1e-12));
  CHECK(std::isinf(clin.eps_max()));

  // Varying beta gives a finite admissible width.
  const RecoveryInput vary = RecoveryInput::from_profiles(
      1.0, q, w_bending(), theta_small());
  const DevelopableChart cvary = cvk_chart(vary);
  CHECK(std::isfinite(cvary.eps_max()));
  CHECK(cvary.eps_max() > 0.0);
  for (double x : {-0.4, 0.0, 0.4})
    CHECK(cvary.det_grad_phi(x, 0.5 * cvary.eps_max() *
                                    (cvary.beta(x, 1) > 0 ? 1.0 : -1.0)) >=
          0.1 - 1e-12);
}

TEST_CASE("cvk chart rejects data whose relaxed minimizer has det != 0") {
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  // |kappa| < |tau| over most of I: torsion-dominated regime.
  const RecoveryInput in = RecoveryInput::from_profiles(
      1.0, q, sine_profile(0.001, 2.0 * M_PI), poly_profile({0.0, 1.0}));
  CHECK_THROWS_AS(cvk_chart(in), Error);
}

TEST_CASE("cvk recovery: pure bending is x2-independent") {
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  const RecoveryInput in = RecoveryInput::from_profiles(
      1.0, q, poly_profile({-1.0 / 12.0, 0.0, 1.0}), zero_profile());
  const DevelopableChart chart = cvk_chart(in);
  const auto a = cvk_recovery(chart, in, 0.2);
  for (double x1 : {-0.3, 0.1, 0.44})
    for (double x2 : {-0.5, 0.0, 0.37}) {
      const PlateAnsatz::WDerivs d = a->w_derivs(x1, x2);
      CHECK(d.w == doctest::Approx(in.w->eval(x1, 0)).epsilon(1e-10));
      CHECK(d.d2 == doctest::Approx(0.0));
      CHECK(d.d12 == doctest::Approx(0.0));
      CHECK(d.d22 == doctest::Approx(0.0));
    }
}

TEST_CASE("cvk recovery: determinant, kernel, gradient, centerline") {
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  const RecoveryInput in = RecoveryInput::from_profiles(
      1.0, q, w_bending(), theta_small());
  const DevelopableChart chart = cvk_chart(in);
  const double eps = 0.05;
  REQUIRE(eps <= chart.eps_max());
  const auto a = cvk_recovery(chart, in, eps);

  for (double x1 : {-0.49, -0.21, 0.0, 0.17, 0.38, 0.49})
    for (double x2 : {-0.5, -0.23, 0.04, 0.31, 0.5}) {
      const PlateAnsatz::WDerivs d = a->w_derivs(x1, x2);
      // Scaled determinant vanishes.
      const double det =
          d.d11 * d.d22 / (eps * eps) - (d.d12 / eps) * (d.d12 / eps);
      CHECK(std::abs(det) <= 1e-8);
      // Kernel identity on the unscaled hessian of z.
      const Eigen::Vector2d xi =
          chart.invert(Eigen::Vector2d(x1, eps * x2));
      Eigen::Matrix2d hz;
      hz << d.d11, d.d12 / eps, d.d12 / eps, d.d22 / (eps * eps);
      CHECK((hz * chart.b_tilde(xi[0])).norm() <= 1e-8);
      // Gradient identity, via finite differences of the raw chart function.
      const double h = 1e-6;
      const double dz1 = (a->z_uncorrected(x1 + h, eps * x2) -
                          a->z_uncorrected(x1 - h, eps * x2)) /
                         (2.0 * h);
      const double dz2 = (a->z_uncorrected(x1, eps * x2 + h) -
                          a->z_uncorrected(x1, eps * x2 - h)) /
                         (2.0 * h);
      CHECK(dz1 == doctest::Approx(in.w->eval(xi[0], 1)).epsilon(2e-5));
      CHECK(dz2 == doctest::Approx(in.theta->eval(xi[0], 0))
                       .epsilon(2e-5)
                       .scale(1.0));
    }

  // Centerline identity z(. , 0) = w.
  for (double x1 : {-0.45, -0.08, 0.26, 0.47})
    CHECK(std::abs(a->z_uncorrected(x1, 0.0) - in.w->eval(x1, 0)) <= 1e-10);
}

TEST_CASE("cvk recovery energies converge to the relaxed limit") {
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  const RecoveryInput in = RecoveryInput::from_profiles(
      1.0, q, w_bending(), theta_small());
  GammaReportOptions opt;
  opt.final_error_bound = 0.01;
  const auto rows =
      gamma_report(ModelKind::kCvk, in, {0.2, 0.1, 0.05, 0.025}, opt);
  CHECK(rows.back().rel_err <= 0.01);
  // In the determinant-free regime the relaxed and the linearized limits of
  // this data agree.
  CHECK(rows.back().j_limit ==
        doctest::Approx(limit_energy(ModelKind::kCvk, in)).epsilon(1e-12));
}

TEST_CASE("cvk recovery rejects eps beyond the chart bound") {
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  const RecoveryInput in = RecoveryInput::from_profiles(
      1.0, q, w_bending(), theta_small());
  const DevelopableChart chart = cvk_chart(in);
  if (std::isfinite(chart.eps_max()))
    CHECK_THROWS_AS(cvk_recovery(chart, in, 2.0 * chart.eps_max()), Error);
}

TEST_CASE("sampling a recovery ansatz yields an admissible discrete field") {
  const QuadForm2 q = q2_isotropic(Material(1.0, 1.0));
  const RecoveryInput in = RecoveryInput::from_profiles(
      1.0, q, w_sine(), theta_cos(), sine_profile(0.05, 4.0 * M_PI),
      sine_profile(0.07, 2.0 * M_PI));
  const double eps = 0.1;
  const AnsatzPtr a = vk_recovery(in, eps);
  const auto mesh = std::make_shared<RectMesh>(1.0, 96, 8);
  const ScaledPlateField f = sample_to_field(*a, mesh);

  const ReducedSystem sys =
      build_reduced_system_2d(*mesh, PlateModel::kVk, Constraints2D{});
  CHECK((sys.rows * sys.gather(f.dofs())).cwiseAbs().maxCoeff() <= 1e-12);

  // The bilinear interpolation of the oscillatory in-plane corrector sets
  // the accuracy floor here.
  const double fe = energy_ben(f, q) + energy_ext(f, q);
  const double an = energy_ben_ansatz(*a, q) + energy_ext_ansatz(*a, q);
  CHECK(fe == doctest::Approx(an).epsilon(2e-3));
}
