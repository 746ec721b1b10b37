#pragma once

#include <memory>
#include <vector>

#include "vkr/constraints.hpp"
#include "vkr/energy1d.hpp"
#include "vkr/load1d.hpp"

namespace vkr {

// Per-field boundary treatment. kZeroAverage imposes the mean conditions of
// the limit spaces (for w both the mean and the mean slope vanish); kClamped
// eliminates the end DOFs. xi2_mean_slope additionally pins the mean of
// xi2', removing the in-plane rotation that the energies do not control.
struct Constraints1D {
  Bc w = Bc::kZeroAverage;
  Bc theta = Bc::kZeroAverage;
  Bc xi1 = Bc::kZeroAverage;
  Bc xi2 = Bc::kZeroAverage;
  bool xi2_mean_slope = true;
};

struct SolveOptions1D {
  double tol = 1e-9;
  int max_iters = 500;
  enum class Start { kZero, kLvk, kField } start = Start::kZero;
  const Field1D* start_field = nullptr;
};

struct SolveResult1D {
  Field1D field;
  EnergyReport report;
  double objective = 0.0;  // energy - load work
  int iterations = 0;
  double grad_norm = 0.0;
  std::vector<double> history;  // accepted objective values
};

// Fields entering the model: (w, theta) for LvK/CvK, all four for vK.
bool field_active(ModelKind kind, int field);  // field: 0=w,1=theta,2=xi1,3=xi2

// Reduced system (active + unclamped DOFs, zero-average rows) for a model.
ReducedSystem build_reduced_system(const IntervalMesh& mesh, ModelKind kind,
                                   const Constraints1D& bc);

SolveResult1D minimize(ModelKind kind, std::shared_ptr<const IntervalMesh> mesh,
                       const QuadForm2& q, const RelaxConstants* c,
                       const Load1D& loads, const Constraints1D& bc,
                       const SolveOptions1D& opt = {});

}  // namespace vkr
