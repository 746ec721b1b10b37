#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "vkr/errors.hpp"

namespace vkr {

// Gauss-Legendre rule mapped to [0,1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;

  int size() const { return static_cast<int>(x.size()); }
};

inline GaussRule gauss_legendre_01(int n) {
  if (n < 1 || n > 64) throw Error("gauss_legendre_01: order out of range");
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  // Roots of P_n on [-1,1] by Newton from Chebyshev initial guesses.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (t * p0 - p1) / (t * t - 1.0);
      double dt = p0 / pp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double weight = 2.0 / ((1.0 - t * t) * pp * pp);
    rule.x[i] = 0.5 * (1.0 - t);  // descending t -> ascending x
    rule.x[n - 1 - i] = 0.5 * (1.0 + t);
    rule.w[i] = 0.5 * weight;
    rule.w[n - 1 - i] = 0.5 * weight;
  }
  return rule;
}

// Integral of f over [a,b] by a composite rule.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, int cells = 64, int pts = 8) {
  const GaussRule rule = gauss_legendre_01(pts);
  const double h = (b - a) / cells;
  double sum = 0.0;
  for (int c = 0; c < cells; ++c) {
    const double xa = a + c * h;
    for (int k = 0; k < rule.size(); ++k)
      sum += h * rule.w[k] * f(xa + h * rule.x[k]);
  }
  return sum;
}

// Antiderivative F(x) = int_a^x f, precomputed on a fine composite grid so
// that queries are cheap and deterministic.
class CumulativeIntegral {
 public:
  CumulativeIntegral(std::function<double(double)> f, double a, double b,
                     int cells = 1024, int pts = 8)
      : f_(std::move(f)), a_(a), b_(b), cells_(cells),
        rule_(gauss_legendre_01(pts)) {
    h_ = (b - a) / cells;
    cum_.resize(cells + 1);
    cum_[0] = 0.0;
    for (int c = 0; c < cells; ++c) {
      double s = 0.0;
      const double xa = a_ + c * h_;
      for (int k = 0; k < rule_.size(); ++k)
        s += h_ * rule_.w[k] * f_(xa + h_ * rule_.x[k]);
      cum_[c + 1] = cum_[c] + s;
    }
  }

  // int_a^x f  (x clamped to [a,b])
  double operator()(double x) const {
    if (x <= a_) return 0.0;
    if (x >= b_) return cum_.back();
    int c = static_cast<int>((x - a_) / h_);
    if (c >= cells_) c = cells_ - 1;
    const double xa = a_ + c * h_;
    double s = cum_[c];
    const double len = x - xa;
    for (int k = 0; k < rule_.size(); ++k)
      s += len * rule_.w[k] * f_(xa + len * rule_.x[k]);
    return s;
  }

  double total() const { return cum_.back(); }

  // int_a^b F(x) dx with F the antiderivative above.
  double integral_of_antiderivative() const {
    double s = 0.0;
    for (int c = 0; c < cells_; ++c) {
      const double xa = a_ + c * h_;
      for (int k = 0; k < rule_.size(); ++k)
        s += h_ * rule_.w[k] * (*this)(xa + h_ * rule_.x[k]);
    }
    return s;
  }

 private:
  std::function<double(double)> f_;
  double a_, b_, h_;
  int cells_;
  GaussRule rule_;
  std::vector<double> cum_;
};

}  // namespace vkr
