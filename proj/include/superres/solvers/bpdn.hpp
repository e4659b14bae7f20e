#ifndef SUPERRES_SOLVERS_BPDN_HPP
#define SUPERRES_SOLVERS_BPDN_HPP

// Basis pursuit denoising,
//
//     min ||z||_1   subject to   ||Phi z - y||_2 <= epsilon,
//
// by over-relaxed ADMM on the split x = z, where x carries the l1 term and z the
// constraint. The rows of Phi are distinct rows of the N-point DFT, so
// Phi Phi^H = N I and the projection onto the constraint set is closed
// form: move only the row-space component of z onto the ball around y.

#include "superres/model.hpp"
#include "superres/solvers/least_squares.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace superres {

template <typename Real>
struct BpdnSettings {
  Real epsilon = 0;
  int max_iterations = 5000;
  Real primal_tol = Real(1e-6);
  Real dual_tol = Real(1e-6);
  Real penalty = 1;
  // Over-relaxation factor in (0, 2); 1 is plain ADMM.
  Real relaxation = Real(1.6);
  // Phi / Phi^H through FFTs; false uses the dense matrix.
  bool use_fft = true;

  void validate() const {
    require(epsilon >= 0, ErrorCode::invalid_argument, "bpdn: epsilon must be >= 0");
    require(max_iterations >= 1, ErrorCode::invalid_argument, "bpdn: max_iterations must be >= 1");
    require(primal_tol > 0 && dual_tol > 0, ErrorCode::invalid_argument, "bpdn: tolerances must be > 0");
    require(penalty > 0, ErrorCode::invalid_argument, "bpdn: penalty must be > 0");
    require(relaxation > 0 && relaxation < 2, ErrorCode::invalid_argument, "bpdn: relaxation must be in (0, 2)");
  }
};

/// Slack allowed on the data-fidelity constraint: relative 1e-6 on epsilon
/// plus a rounding floor proportional to ||y|| (needed when epsilon = 0).
template <typename Real>
Real bpdn_feasibility_bound(Real epsilon, Real y_norm) {
  return epsilon * Real(1 + 1e-6) + Real(64) * std::numeric_limits<Real>::epsilon() * y_norm;
}

namespace detail {

template <typename Real>
class PhiProducts {
 public:
  PhiProducts(const SensingMatrix<Real>& phi, bool use_fft) : phi_(phi) {
    if (use_fft) fft_.emplace(phi.grid());
  }
  CVector<Real> apply(const CVector<Real>& x) { return fft_ ? fft_->apply(x) : phi_.apply(x); }
  CVector<Real> adjoint(const CVector<Real>& r) { return fft_ ? fft_->apply_adjoint(r) : phi_.apply_adjoint(r); }

 private:
  const SensingMatrix<Real>& phi_;
  std::optional<FourierOperator<Real>> fft_;
};

template <typename Real>
CVector<Real> soft_threshold(const CVector<Real>& v, Real t) {
  CVector<Real> out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const Real a = std::abs(v(i));
    out(i) = a > t ? v(i) * ((a - t) / a) : Complex<Real>(0);
  }
  return out;
}

}  // namespace detail

template <typename Real>
RecoveredSignal<Real> bpdn(const SensingMatrix<Real>& phi, const CVector<Real>& y, const BpdnSettings<Real>& settings) {
  settings.validate();
  require(y.size() == phi.rows(), ErrorCode::invalid_argument, "bpdn: y has wrong length");
  const Index n = phi.cols();
  const Real scale = static_cast<Real>(n);  // Phi Phi^H = scale * I
  const Real eps = settings.epsilon;
  const Real y_norm = y.norm();
  detail::PhiProducts<Real> ops(phi, settings.use_fft);

  // Projection of v onto {z : ||Phi z - y|| <= eps}.
  auto project = [&](const CVector<Real>& v) -> CVector<Real> {
    const CVector<Real> r = ops.apply(v) - y;
    const Real rn = r.norm();
    if (rn <= eps) return v;
    const CVector<Real> target = y + r * (eps / rn);
    return v + ops.adjoint(target - ops.apply(v)) / scale;
  };

  RecoveredSignal<Real> out;
  CVector<Real> z = ops.adjoint(y) / scale;  // least-norm fit, always feasible
  CVector<Real> u = CVector<Real>::Zero(n);
  CVector<Real> x = z;
  Real rho = settings.penalty;
  bool converged = false;
  int it = 0;
  for (; it < settings.max_iterations && !converged; ++it) {
    x = detail::soft_threshold<Real>(z - u, Real(1) / rho);
    const CVector<Real> z_old = z;
    const CVector<Real> x_hat = settings.relaxation * x + (Real(1) - settings.relaxation) * z_old;
    z = project(x_hat + u);
    u += x_hat - z;

    const Real r_norm = (x - z).norm();
    const Real s_norm = rho * (z - z_old).norm();
    const Real eps_pri = settings.primal_tol * std::max(x.norm(), z.norm());
    const Real eps_dual = settings.dual_tol * rho * u.norm();
    converged = r_norm <= eps_pri && s_norm <= eps_dual;

    // Residual balancing; u is the scaled dual so it rescales with rho.
    if (r_norm > 10 * s_norm) {
      rho *= 2;
      u /= Real(2);
    } else if (s_norm > 10 * r_norm) {
      rho /= 2;
      u *= Real(2);
    }
  }
  out.iterations = it;
  if (!converged) out.flags |= SolverFlag::unconverged;

  // Candidate outputs, all feasible: x itself, x moved along the segment
  // toward the least-squares fit on its own support just far enough to
  // meet the constraint, and the dense projection of x. The smallest l1
  // norm wins; ties keep the sparser candidate.
  const Real bound = bpdn_feasibility_bound(eps, y_norm);
  const SupportSet t = nonzero_support(x);
  const CVector<Real> ax_minus_y = ops.apply(x) - y;
  std::optional<CVector<Real>> result;
  bool result_dense = false;
  auto offer = [&](const CVector<Real>& candidate, bool dense) {
    if ((ops.apply(candidate) - y).norm() > bound) return false;
    if (!result || candidate.template lpNorm<1>() < result->template lpNorm<1>()) {
      result = candidate;
      result_dense = dense;
    }
    return true;
  };
  if (!offer(x, false) && !t.empty() && t.size() <= phi.rows()) {
    const RecoveredSignal<Real> ls = least_squares_on_support(phi, y, t);
    const CVector<Real> dir = ls.coefficients - x;
    const CVector<Real> d = ops.apply(dir);
    // Smallest step with ||(Phi x - y) + step * d|| = eps.
    const Real a2 = d.squaredNorm();
    const Real b1 = std::real(ax_minus_y.dot(d));
    const Real c0 = ax_minus_y.squaredNorm() - eps * eps;
    if (a2 > 0) {
      const Real disc = b1 * b1 - a2 * c0;
      const Real step = disc >= 0 ? std::clamp((-b1 - std::sqrt(disc)) / a2, Real(0), Real(1)) : Real(1);
      for (Real candidate : {step, std::min<Real>(Real(1), step * Real(1 + 1e-9) + Real(1e-15)), Real(1)})
        if (offer(x + candidate * dir, false)) break;
    }
  }
  const CVector<Real> projected = project(x);
  if (!offer(projected, true) && !result) {
    result = projected;  // feasible up to rounding beyond the bound
    result_dense = true;
  }
  if (result_dense) out.flags |= SolverFlag::dense_fallback;
  out.coefficients = std::move(*result);
  out.support = nonzero_support(out.coefficients);
  out.residual_norm = (phi.apply(out.coefficients) - y).norm();
  return out;
}

}  // namespace superres

#endif  // SUPERRES_SOLVERS_BPDN_HPP
