#pragma once

#include <Eigen/Dense>

#include "vkr/field1d.hpp"
#include "vkr/quadform.hpp"

namespace vkr {

enum class ModelKind { kLvk, kVk, kCvk };

// Term-by-term energy split. For the relaxed (CvK) model the bending and
// torsion contributions are not separable, so the whole density is reported
// under bending_out; for quadratic forms with a kappa-tau cross term the
// coupling is accounted to the torsion bucket.
struct EnergyReport {
  double total = 0.0;
  double stretching = 0.0;
  double bending_out = 0.0;
  double bending_in = 0.0;
  double torsion = 0.0;
  double load_work = 0.0;
};

// Number of Gauss points per element for every 1D energy.
inline constexpr int kQuad1D = 4;

EnergyReport energy_lvk(const Field1D& f, const QuadForm2& q);
EnergyReport energy_vk(const Field1D& f, const QuadForm2& q);
EnergyReport energy_cvk(const Field1D& f, const QuadForm2& q,
                        const RelaxConstants& c);

// The stretching functional written over the strip S = I x (-1/2, 1/2) with
// the Bernoulli-Navier in-plane field, plus the Q1 bending term. Agrees with
// energy_vk(...).total up to roundoff; energy_vk cross-checks against it.
double energy_vk_strip(const Field1D& f, const QuadForm2& q);

EnergyReport energy(ModelKind kind, const Field1D& f, const QuadForm2& q,
                    const RelaxConstants* c = nullptr);

// First variation of the discrete energy with respect to all coefficients
// (full DOF layout; fields not entering the chosen model get zeros).
Eigen::VectorXd gradient(ModelKind kind, const Field1D& f, const QuadForm2& q,
                         const RelaxConstants* c = nullptr);

}  // namespace vkr
