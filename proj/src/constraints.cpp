#include "vkr/constraints.hpp"

#include <Eigen/SparseLU>
#include <cmath>

namespace vkr {

struct KktOperator::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

KktOperator::KktOperator(const Eigen::SparseMatrix<double>& k,
                         const Eigen::MatrixXd& rows)
    : impl_(std::make_unique<Impl>()),
      n_(static_cast<int>(k.rows())),
      m_(static_cast<int>(rows.rows())) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(k.nonZeros() + 2 * m_ * n_);
  for (int c = 0; c < k.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(k, c); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()),
                         static_cast<int>(it.col()), it.value());
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < n_; ++j) {
      const double v = rows(i, j);
      if (v != 0.0) {
        trips.emplace_back(n_ + i, j, v);
        trips.emplace_back(j, n_ + i, v);
      }
    }
  Eigen::SparseMatrix<double> kkt(n_ + m_, n_ + m_);
  kkt.setFromTriplets(trips.begin(), trips.end());

  impl_->lu.analyzePattern(kkt);
  impl_->lu.factorize(kkt);
  if (impl_->lu.info() != Eigen::Success)
    throw SolveError(
        "KktOperator: singular constrained system (insufficient "
        "constraints?)");
}

KktOperator::~KktOperator() = default;
KktOperator::KktOperator(KktOperator&&) noexcept = default;

Eigen::VectorXd KktOperator::solve(const Eigen::VectorXd& f) const {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_ + m_);
  rhs.head(n_) = f;
  const Eigen::VectorXd sol = impl_->lu.solve(rhs);
  Eigen::VectorXd x = sol.head(n_);
  if (!x.allFinite())
    throw SolveError("KktOperator: solution is not finite");
  return x;
}

}  // namespace vkr
