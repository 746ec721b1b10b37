#include "vkr/recovery.hpp"

#include <cmath>
#include <sstream>

#include "vkr/gauss.hpp"

namespace vkr {

namespace {

constexpr int kMeanCells = 2048;
constexpr int kMeanPts = 8;

double interval_mean(const Profile& p, double ell, int deriv = 0) {
  return integrate([&](double x) { return p.eval(x, deriv); }, -0.5 * ell,
                   0.5 * ell, kMeanCells, kMeanPts) /
         ell;
}

}  // namespace

RecoveryInput RecoveryInput::from_profiles(double ell, const QuadForm2& q,
                                           ProfilePtr w, ProfilePtr theta,
                                           ProfilePtr xi1, ProfilePtr xi2) {
  RecoveryInput in{ell, q, alpha_pm(q), std::move(w), std::move(theta),
                   xi1 ? std::move(xi1) : zero_profile(),
                   xi2 ? std::move(xi2) : zero_profile(),
                   nullptr, nullptr, nullptr, nullptr, nullptr};
  const auto q1c = q.q1_argmin_coeffs();
  in.gamma = lincomb_profile(q1c[0], deriv_profile(in.w, 2), q1c[1],
                             deriv_profile(in.theta, 1));
  // Strain g0 = xi1' + |w'|^2/2 and its first two derivatives.
  ProfilePtr wp = in.w, x1p = in.xi1;
  ProfilePtr g0 = make_profile([wp, x1p](double x, int d) {
    switch (d) {
      case 0:
        return x1p->eval(x, 1) + 0.5 * wp->eval(x, 1) * wp->eval(x, 1);
      case 1:
        return x1p->eval(x, 2) + wp->eval(x, 1) * wp->eval(x, 2);
      case 2:
        return x1p->eval(x, 3) + wp->eval(x, 2) * wp->eval(x, 2) +
               wp->eval(x, 1) * wp->eval(x, 3);
      default:
        return 0.0;
    }
  });
  const auto q0c = q.q0_argmin_coeffs();
  in.zeta1 = lincomb_profile(q0c[0], g0, 0.0, zero_profile());
  in.zeta2 = lincomb_profile(q0c[1], g0, 0.0, zero_profile());
  in.eta1 = lincomb_profile(-q0c[0], deriv_profile(in.xi2, 2), 0.0,
                            zero_profile());
  in.eta2 = lincomb_profile(-q0c[1], deriv_profile(in.xi2, 2), 0.0,
                            zero_profile());
  return in;
}

RecoveryInput RecoveryInput::from_field(const Field1D& f, const QuadForm2& q) {
  return from_profiles(f.mesh().ell, q, f.profile_w(), f.profile_theta(),
                       f.profile_xi1(), f.profile_xi2());
}

namespace {

// w + eps x2 theta + (eps^2/2)(x2^2 gamma - <x2^2 gamma> - x1 <x2^2 gamma'>)
class LvkAnsatz : public PlateAnsatz {
 public:
  LvkAnsatz(const RecoveryInput& in, double eps)
      : PlateAnsatz(eps, in.ell), w_(in.w), th_(in.theta), ga_(in.gamma) {
    m_gamma_ = interval_mean(*ga_, in.ell) / 12.0;
    m_gamma_p_ =
        (ga_->eval(0.5 * in.ell, 0) - ga_->eval(-0.5 * in.ell, 0)) /
        (12.0 * in.ell);
  }

  WDerivs w_derivs(double x1, double x2) const override {
    WDerivs d;
    const double e = eps_, e2h = 0.5 * eps_ * eps_;
    d.w = w_->eval(x1, 0) + e * x2 * th_->eval(x1, 0) +
          e2h * (x2 * x2 * ga_->eval(x1, 0) - m_gamma_ - x1 * m_gamma_p_);
    d.d1 = w_->eval(x1, 1) + e * x2 * th_->eval(x1, 1) +
           e2h * (x2 * x2 * ga_->eval(x1, 1) - m_gamma_p_);
    d.d2 = e * th_->eval(x1, 0) + 2.0 * e2h * x2 * ga_->eval(x1, 0);
    d.d11 = w_->eval(x1, 2) + e * x2 * th_->eval(x1, 2) +
            e2h * x2 * x2 * ga_->eval(x1, 2);
    d.d12 = e * th_->eval(x1, 1) + 2.0 * e2h * x2 * ga_->eval(x1, 1);
    d.d22 = 2.0 * e2h * ga_->eval(x1, 0);
    return d;
  }

 private:
  ProfilePtr w_, th_, ga_;
  double m_gamma_ = 0.0, m_gamma_p_ = 0.0;
};

class VkAnsatz final : public LvkAnsatz {
 public:
  VkAnsatz(const RecoveryInput& in, double eps)
      : LvkAnsatz(in, eps), in_(in),
        antider_(
            [this](double s) {
              return 2.0 * in_.zeta1->eval(s, 0) -
                     in_.w->eval(s, 1) * in_.theta->eval(s, 0);
            },
            -0.5 * in.ell, 0.5 * in.ell, kMeanCells, kMeanPts) {
    f_at_origin_ = antider_(0.0);
    m_f_ = (antider_.integral_of_antiderivative() / in.ell) - f_at_origin_;
    m_eta1_ = interval_mean(*in.eta1, in.ell) / 12.0;
    m_eta2_ = interval_mean(*in.eta2, in.ell) / 12.0;
  }

  bool has_y() const override { return true; }

  YDerivs y_derivs(double x1, double x2) const override {
    YDerivs d;
    const double e = eps_, e2h = 0.5 * eps_ * eps_;
    const RecoveryInput& in = in_;
    const double big_f = antider_(x1) - f_at_origin_;
    d.y1 = in.xi1->eval(x1, 0) - x2 * in.xi2->eval(x1, 1) +
           e * (x2 * x2 * in.eta1->eval(x1, 0) - m_eta1_);
    d.d1y1 = in.xi1->eval(x1, 1) - x2 * in.xi2->eval(x1, 2) +
             e * x2 * x2 * in.eta1->eval(x1, 1);
    d.d2y1 = -in.xi2->eval(x1, 1) + 2.0 * e * x2 * in.eta1->eval(x1, 0);
    const double th = in.theta->eval(x1, 0);
    d.y2 = in.xi2->eval(x1, 0) + e * (big_f - m_f_) +
           e2h * x2 * (2.0 * in.zeta2->eval(x1, 0) - th * th) +
           e2h * (x2 * x2 * in.eta2->eval(x1, 0) - m_eta2_);
    d.d1y2 = in.xi2->eval(x1, 1) +
             e * (2.0 * in.zeta1->eval(x1, 0) - in.w->eval(x1, 1) * th) +
             e2h * x2 *
                 (2.0 * in.zeta2->eval(x1, 1) -
                  2.0 * th * in.theta->eval(x1, 1)) +
             e2h * x2 * x2 * in.eta2->eval(x1, 1);
    d.d2y2 = e2h * (2.0 * in.zeta2->eval(x1, 0) - th * th) +
             2.0 * e2h * x2 * in.eta2->eval(x1, 0);
    return d;
  }

 private:
  RecoveryInput in_;
  CumulativeIntegral antider_;
  double f_at_origin_ = 0.0;
  double m_f_ = 0.0;
  double m_eta1_ = 0.0, m_eta2_ = 0.0;
};

}  // namespace

AnsatzPtr lvk_recovery(const RecoveryInput& in, double eps) {
  return std::make_shared<LvkAnsatz>(in, eps);
}

AnsatzPtr vk_recovery(const RecoveryInput& in, double eps) {
  return std::make_shared<VkAnsatz>(in, eps);
}

DevelopableChart::DevelopableChart(ProfilePtr beta, ProfilePtr lambda,
                                   double ell, double eps_max)
    : beta_(std::move(beta)), lambda_(std::move(lambda)), ell_(ell),
      eps_max_(eps_max) {}

Eigen::Vector2d DevelopableChart::phi(double xi1, double xi2) const {
  const double b = beta(xi1);
  return Eigen::Vector2d(xi1 - xi2 * std::sin(b), xi2 * std::cos(b));
}

Eigen::Matrix2d DevelopableChart::grad_phi(double xi1, double xi2) const {
  const double b = beta(xi1);
  const double bp = beta(xi1, 1);
  Eigen::Matrix2d g;
  g << 1.0 - xi2 * bp * std::cos(b), -std::sin(b), -xi2 * bp * std::sin(b),
      std::cos(b);
  return g;
}

double DevelopableChart::det_grad_phi(double xi1, double xi2) const {
  return std::cos(beta(xi1)) - xi2 * beta(xi1, 1);
}

Eigen::Vector2d DevelopableChart::invert(const Eigen::Vector2d& p, double tol,
                                         int max_iters) const {
  Eigen::Vector2d xi(p[0], p[1] / std::cos(beta(p[0])));
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::Vector2d r = phi(xi[0], xi[1]) - p;
    if (r.cwiseAbs().maxCoeff() <= tol * (1.0 + p.norm())) return xi;
    xi -= grad_phi(xi[0], xi[1]).inverse() * r;
  }
  std::ostringstream os;
  os << "DevelopableChart::invert: Newton failed at point (" << p[0] << ", "
     << p[1] << ")";
  throw NewtonError(os.str());
}

DevelopableChart cvk_chart(const RecoveryInput& in) {
  const int n_check = 2048;
  for (int i = 0; i <= n_check; ++i) {
    const double x = -0.5 * in.ell + in.ell * i / n_check;
    const double kappa = in.w->eval(x, 2);
    const double tau = in.theta->eval(x, 1);
    const QbarResult r = qbar(in.q, in.alpha, kappa, tau);
    const SymMat2 m{kappa, tau, r.gamma_star};
    if (std::abs(m.det()) > 1e-10 * (1.0 + m.norm2())) {
      std::ostringstream os;
      os << "cvk_chart: the relaxed minimizer has nonzero determinant at x1 = "
         << x << " (det = " << m.det()
         << "); inputs in this regime need the oscillating relaxation "
            "construction, which is out of scope";
      throw Error(os.str());
    }
  }

  ProfilePtr w = in.w, th = in.theta;
  ProfilePtr beta = make_profile([w, th](double x, int d) {
    const double kappa = w->eval(x, 2);
    const double tau = th->eval(x, 1);
    const double r2 = kappa * kappa + tau * tau;
    if (r2 < 1e-28) return 0.0;
    if (d == 0) return std::atan(tau / kappa);
    if (d == 1) {
      const double kp = w->eval(x, 3);
      const double tp = th->eval(x, 2);
      return (tp * kappa - tau * kp) / r2;
    }
    return 0.0;
  });
  ProfilePtr lambda = make_profile([w, th](double x, int d) {
    if (d != 0) return 0.0;
    const double kappa = w->eval(x, 2);
    if (std::abs(kappa) < 1e-14) return 0.0;
    const double tau = th->eval(x, 1);
    return kappa + tau * tau / kappa;
  });

  // Largest eps with cos(beta) - (eps/2)|beta'| >= margin on I.
  const double margin = 0.1;
  double eps_max = std::numeric_limits<double>::infinity();
  const int n_grid = 4096;
  for (int i = 0; i <= n_grid; ++i) {
    const double x = -0.5 * in.ell + in.ell * i / n_grid;
    const double cb = std::cos(beta->eval(x, 0));
    const double bp = std::abs(beta->eval(x, 1));
    if (bp > 1e-13)
      eps_max = std::min(eps_max, 2.0 * (cb - margin) / bp);
  }
  return DevelopableChart(beta, lambda, in.ell, eps_max);
}

CvkAnsatz::CvkAnsatz(const DevelopableChart& chart, const RecoveryInput& in,
                     double eps)
    : PlateAnsatz(eps, in.ell), chart_(chart), w_(in.w), theta_(in.theta) {
  // Average normalization: subtract the affine field matching the means of
  // the raw construction over S.
  const GaussRule rule = gauss_legendre_01(kMeanPts);
  const int cx = 256, cy = 8;
  const double ell = chart_.ell();
  double sum_v = 0.0, sum_d1 = 0.0, sum_d2 = 0.0;
  for (int a = 0; a < cx; ++a)
    for (int b = 0; b < cy; ++b)
      for (int ia = 0; ia < rule.size(); ++ia)
        for (int ib = 0; ib < rule.size(); ++ib) {
          const double x1 = -0.5 * ell + (a + rule.x[ia]) * ell / cx;
          const double x2 = -0.5 + (b + rule.x[ib]) / cy;
          const double wq = (ell / cx) * (1.0 / cy) * rule.w[ia] * rule.w[ib];
          const Eigen::Vector2d xi =
              chart_.invert(Eigen::Vector2d(x1, eps_ * x2));
          const double bt1 = -std::sin(chart_.beta(xi[0]));
          const double bt2 = std::cos(chart_.beta(xi[0]));
          const double wp = w_->eval(xi[0], 1);
          const double th = theta_->eval(xi[0], 0);
          sum_v += wq * (w_->eval(xi[0], 0) + xi[1] * (bt1 * wp + bt2 * th));
          sum_d1 += wq * wp;
          sum_d2 += wq * th;
        }
  f_corr_ = Eigen::Vector2d(sum_d1 / ell, sum_d2 / ell);
  c_corr_ = sum_v / ell;
}

double CvkAnsatz::z_uncorrected(double x1, double x2_physical) const {
  const Eigen::Vector2d xi =
      chart_.invert(Eigen::Vector2d(x1, x2_physical));
  const double b = chart_.beta(xi[0]);
  const double val = w_->eval(xi[0], 0) +
                     xi[1] * (-std::sin(b) * w_->eval(xi[0], 1) +
                              std::cos(b) * theta_->eval(xi[0], 0));
  return val;
}

PlateAnsatz::WDerivs CvkAnsatz::w_derivs(double x1, double x2) const {
  const Eigen::Vector2d p(x1, eps_ * x2);
  const Eigen::Vector2d xi = chart_.invert(p);
  const double b = chart_.beta(xi[0]);
  const double sb = std::sin(b), cb = std::cos(b);
  const double wp = w_->eval(xi[0], 1);
  const double th = theta_->eval(xi[0], 0);
  const double kappa = w_->eval(xi[0], 2);
  const double tau = theta_->eval(xi[0], 1);
  const double det = chart_.det_grad_phi(xi[0], xi[1]);

  WDerivs d;
  const double raw = w_->eval(xi[0], 0) + xi[1] * (-sb * wp + cb * th);
  d.w = raw - f_corr_[0] * x1 - f_corr_[1] * (eps_ * x2) - c_corr_;
  d.d1 = wp - f_corr_[0];
  d.d2 = eps_ * (th - f_corr_[1]);
  // Hessian of z: rank one along (kappa, tau) (x) (cos b, sin b) / det.
  d.d11 = kappa * cb / det;
  d.d22 = eps_ * eps_ * tau * sb / det;
  d.d12 = eps_ * 0.5 * (kappa * sb + tau * cb) / det;
  return d;
}

std::shared_ptr<const CvkAnsatz> cvk_recovery(const DevelopableChart& chart,
                                              const RecoveryInput& in,
                                              double eps) {
  if (!(eps > 0.0) || eps > chart.eps_max()) {
    std::ostringstream os;
    os << "cvk_recovery: eps = " << eps << " exceeds eps_max = "
       << chart.eps_max();
    throw Error(os.str());
  }
  return std::shared_ptr<const CvkAnsatz>(new CvkAnsatz(chart, in, eps));
}

namespace {

template <typename Fn>
double dense_quadrature_s(double ell, int cells_x, int cells_y, int pts,
                          Fn&& density) {
  const GaussRule rule = gauss_legendre_01(pts);
  const double hx = ell / cells_x, hy = 1.0 / cells_y;
  double total = 0.0;
  for (int a = 0; a < cells_x; ++a)
    for (int b = 0; b < cells_y; ++b)
      for (int ia = 0; ia < rule.size(); ++ia)
        for (int ib = 0; ib < rule.size(); ++ib) {
          const double x1 = -0.5 * ell + (a + rule.x[ia]) * hx;
          const double x2 = -0.5 + (b + rule.x[ib]) * hy;
          total += hx * hy * rule.w[ia] * rule.w[ib] * density(x1, x2);
        }
  return total;
}

}  // namespace

double energy_ben_ansatz(const PlateAnsatz& a, const QuadForm2& q, int cells_x,
                         int cells_y, int pts) {
  const double eps = a.eps();
  return dense_quadrature_s(a.ell(), cells_x, cells_y, pts,
                            [&](double x1, double x2) {
    const PlateAnsatz::WDerivs d = a.w_derivs(x1, x2);
    const SymMat2 h{d.d11, d.d12 / eps, d.d22 / (eps * eps)};
    return eval_q2(q, h) / 24.0;
  });
}

double energy_ext_ansatz(const PlateAnsatz& a, const QuadForm2& q, int cells_x,
                         int cells_y, int pts) {
  const double eps = a.eps();
  return dense_quadrature_s(a.ell(), cells_x, cells_y, pts,
                            [&](double x1, double x2) {
    const PlateAnsatz::WDerivs d = a.w_derivs(x1, x2);
    const PlateAnsatz::YDerivs y = a.y_derivs(x1, x2);
    const double p1 = d.d1, p2 = d.d2 / eps;
    const SymMat2 g{y.d1y1 + 0.5 * p1 * p1,
                    (y.d1y2 + y.d2y1) / (2.0 * eps) + 0.5 * p1 * p2,
                    y.d2y2 / (eps * eps) + 0.5 * p2 * p2};
    return 0.5 * eval_q2(q, g);
  });
}

Eigen::Vector3d ansatz_average_residuals(const PlateAnsatz& a, int cells_x,
                                         int cells_y, int pts) {
  Eigen::Vector3d r;
  r[0] = dense_quadrature_s(a.ell(), cells_x, cells_y, pts,
                            [&](double x1, double x2) {
    return a.w_derivs(x1, x2).w;
  });
  r[1] = dense_quadrature_s(a.ell(), cells_x, cells_y, pts,
                            [&](double x1, double x2) {
    return a.w_derivs(x1, x2).d1;
  });
  r[2] = dense_quadrature_s(a.ell(), cells_x, cells_y, pts,
                            [&](double x1, double x2) {
    return a.w_derivs(x1, x2).d2;
  });
  return r;
}

ScaledPlateField sample_to_field(const PlateAnsatz& a,
                                 std::shared_ptr<const RectMesh> mesh) {
  if (std::abs(mesh->ell - a.ell()) > 1e-12)
    throw Error("sample_to_field: mesh length does not match the ansatz");
  ScaledPlateField f(mesh, a.eps());
  f.set_w_nodal([&](double x1, double x2) {
    const PlateAnsatz::WDerivs d = a.w_derivs(x1, x2);
    return std::array<double, 4>{d.w, d.d1, d.d2, d.d12};
  });
  if (a.has_y())
    f.set_y_nodal([&](double x1, double x2) {
      const PlateAnsatz::YDerivs y = a.y_derivs(x1, x2);
      return std::array<double, 2>{y.y1, y.y2};
    });
  recenter(&f, a.has_y());
  return f;
}

double limit_energy(ModelKind kind, const RecoveryInput& in, int cells,
                    int pts) {
  const Eigen::Matrix2d q1m = in.q.q1_matrix();
  const double e0 = in.q.q0_coeff();
  const auto density = [&](double x) {
    const double kappa = in.w->eval(x, 2);
    const double tau = in.theta->eval(x, 1);
    switch (kind) {
      case ModelKind::kLvk:
        return (q1m(0, 0) * kappa * kappa + 2.0 * q1m(0, 1) * kappa * tau +
                q1m(1, 1) * tau * tau) /
               24.0;
      case ModelKind::kVk: {
        const double wp = in.w->eval(x, 1);
        const double g0 = in.xi1->eval(x, 1) + 0.5 * wp * wp;
        const double xi2pp = in.xi2->eval(x, 2);
        return 0.5 * e0 * g0 * g0 +
               (e0 * xi2pp * xi2pp + q1m(0, 0) * kappa * kappa +
                2.0 * q1m(0, 1) * kappa * tau + q1m(1, 1) * tau * tau) /
                   24.0;
      }
      case ModelKind::kCvk:
        return qbar(in.q, in.alpha, kappa, tau).value / 24.0;
    }
    return 0.0;
  };
  return integrate(density, -0.5 * in.ell, 0.5 * in.ell, cells, pts);
}

std::vector<GammaReportRow> gamma_report(ModelKind kind,
                                         const RecoveryInput& in,
                                         const std::vector<double>& eps_list,
                                         const GammaReportOptions& opt) {
  if (eps_list.empty()) throw Error("gamma_report: empty eps list");
  const double j_limit = limit_energy(kind, in);

  std::vector<GammaReportRow> rows;
  std::unique_ptr<DevelopableChart> chart;
  if (kind == ModelKind::kCvk)
    chart = std::make_unique<DevelopableChart>(cvk_chart(in));

  for (double eps : eps_list) {
    AnsatzPtr a;
    switch (kind) {
      case ModelKind::kLvk:
        a = lvk_recovery(in, eps);
        break;
      case ModelKind::kVk:
        a = vk_recovery(in, eps);
        break;
      case ModelKind::kCvk:
        a = cvk_recovery(*chart, in, eps);
        break;
    }
    double j_eps = energy_ben_ansatz(*a, in.q, opt.cells_x, opt.cells_y,
                                     opt.pts);
    if (kind == ModelKind::kVk)
      j_eps += energy_ext_ansatz(*a, in.q, opt.cells_x, opt.cells_y, opt.pts);
    const double denom = std::max(std::abs(j_limit), 1e-30);
    rows.push_back({eps, j_eps, j_limit,
                    std::abs(j_eps - j_limit) / denom});
  }

  if (opt.require_monotone)
    for (size_t i = 1; i < rows.size(); ++i)
      if (rows[i].rel_err > rows[i - 1].rel_err + 1e-12)
        throw CheckError("gamma_report: recovery error is not decreasing "
                         "between eps = " + std::to_string(rows[i - 1].eps) +
                         " and eps = " + std::to_string(rows[i].eps));
  if (rows.back().rel_err > opt.final_error_bound)
    throw CheckError("gamma_report: final relative error " +
                     std::to_string(rows.back().rel_err) +
                     " exceeds the bound " +
                     std::to_string(opt.final_error_bound));
  return rows;
}

}  // namespace vkr
