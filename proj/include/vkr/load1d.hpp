#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "vkr/field1d.hpp"

namespace vkr {

// Distributed and point loads on the ribbon fields. The limit functionals
// carry no loads; these exist so that minimizers are nontrivial.
struct PointLoad1D {
  enum class Comp { kW, kTheta, kXi1, kXi2 };
  Comp comp = Comp::kW;
  double x = 0.0;
  double magnitude = 0.0;
};

struct Load1D {
  std::function<double(double)> q_w;     // force per length on w
  std::function<double(double)> q_xi2;   // force per length on xi2
  std::function<double(double)> q_xi1;   // force per length on xi1
  std::function<double(double)> m_theta; // torque per length on theta
  std::vector<PointLoad1D> point_loads;

  bool empty() const {
    return !q_w && !q_xi2 && !q_xi1 && !m_theta && point_loads.empty();
  }
};

// Load vector over the full DOF layout; load work = f . dofs.
Eigen::VectorXd load_vector(const IntervalMesh& mesh, const Load1D& load);

inline double load_work(const Eigen::VectorXd& load_vec, const Field1D& f) {
  return load_vec.dot(f.dofs());
}

}  // namespace vkr
