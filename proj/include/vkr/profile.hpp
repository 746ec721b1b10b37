#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "vkr/errors.hpp"

namespace vkr {

// A scalar function of one variable together with its derivatives. Used for
// smooth ribbon data (analytic test profiles or piecewise-polynomial fields
// lifted from a discretization).
class Profile {
 public:
  virtual ~Profile() = default;
  virtual double eval(double x, int deriv = 0) const = 0;
  double operator()(double x) const { return eval(x, 0); }
};

using ProfilePtr = std::shared_ptr<const Profile>;

class FnProfile final : public Profile {
 public:
  explicit FnProfile(std::function<double(double, int)> f) : f_(std::move(f)) {}
  double eval(double x, int deriv) const override { return f_(x, deriv); }

 private:
  std::function<double(double, int)> f_;
};

inline ProfilePtr make_profile(std::function<double(double, int)> f) {
  return std::make_shared<FnProfile>(std::move(f));
}

inline ProfilePtr zero_profile() {
  return make_profile([](double, int) { return 0.0; });
}

// c0 + c1 x + c2 x^2 + ...
inline ProfilePtr poly_profile(std::vector<double> coeffs) {
  return make_profile([c = std::move(coeffs)](double x, int deriv) {
    double sum = 0.0;
    for (int k = static_cast<int>(c.size()) - 1; k >= deriv; --k) {
      double fac = 1.0;
      for (int j = 0; j < deriv; ++j) fac *= (k - j);
      sum = sum * x + fac * c[k];
    }
    return sum;
  });
}

// amp * sin(omega x + phase)
inline ProfilePtr sine_profile(double amp, double omega, double phase = 0.0) {
  return make_profile([=](double x, int deriv) {
    return amp * std::pow(omega, deriv) *
           std::sin(omega * x + phase + deriv * M_PI_2);
  });
}

// a P + b Q
inline ProfilePtr lincomb_profile(double a, ProfilePtr p, double b,
                                  ProfilePtr q) {
  return make_profile([=](double x, int deriv) {
    return a * p->eval(x, deriv) + b * q->eval(x, deriv);
  });
}

// P^(shift), i.e. eval(x, k) = P(x, k + shift)
inline ProfilePtr deriv_profile(ProfilePtr p, int shift) {
  return make_profile(
      [=](double x, int deriv) { return p->eval(x, deriv + shift); });
}

}  // namespace vkr
