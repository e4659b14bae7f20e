#ifndef SUPERRES_SOLVERS_LEAST_SQUARES_HPP
#define SUPERRES_SOLVERS_LEAST_SQUARES_HPP

#include "superres/model.hpp"
#include "superres/solvers/recovered_signal.hpp"

namespace superres {

/// argmin ||Phi_S c - y|| over complex c, by a complete orthogonal
/// decomposition of the m x |S| column block. A rank-deficient block gets
/// the least-norm solution and the rank_deficient flag.
template <typename Real>
RecoveredSignal<Real> least_squares_on_support(const SensingMatrix<Real>& phi, const CVector<Real>& y,
                                               const SupportSet& support) {
  require(y.size() == phi.rows(), ErrorCode::invalid_argument, "least_squares_on_support: y has wrong length");
  require(support.size() <= phi.rows(), ErrorCode::invalid_argument,
          "least_squares_on_support: support larger than the number of measurements");
  RecoveredSignal<Real> out;
  out.coefficients = CVector<Real>::Zero(phi.cols());
  out.support = support;
  if (support.empty()) {
    out.residual_norm = y.norm();
    return out;
  }
  const CMatrix<Real> a = phi.columns(support);
  Eigen::CompleteOrthogonalDecomposition<CMatrix<Real>> cod(a);
  const CVector<Real> c = cod.solve(y);
  if (cod.rank() < support.size()) out.flags |= SolverFlag::rank_deficient;
  out.coefficients(support.indices()) = c;
  out.residual_norm = (y - a * c).norm();
  return out;
}

namespace detail {

/// Orthonormal basis of the column space of a (thin Householder Q).
template <typename Real>
CMatrix<Real> orthonormal_basis(const CMatrix<Real>& a) {
  if (a.cols() == 0) return CMatrix<Real>(a.rows(), 0);
  Eigen::HouseholderQR<CMatrix<Real>> qr(a);
  return qr.householderQ() * CMatrix<Real>::Identity(a.rows(), a.cols());
}

}  // namespace detail

}  // namespace superres

#endif  // SUPERRES_SOLVERS_LEAST_SQUARES_HPP
