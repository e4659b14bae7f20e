#ifndef SUPERRES_SOLVERS_GREEDY_HPP
#define SUPERRES_SOLVERS_GREEDY_HPP

// Orthogonal matching pursuit, local optimization of a support within
// coherence bands, and the band-excluded locally optimized OMP built from
// the two.

#include "superres/bands.hpp"
#include "superres/solvers/least_squares.hpp"

#include <limits>

namespace superres {

struct LocalOptimizationOptions {
  // Repeat the sweep until no swap is accepted instead of a single pass.
  bool multi_pass = false;
  int max_passes = 50;
};

inline constexpr double kEarlyExitResidual = 1e-12;

namespace detail {

/// Index of the largest |c_i| among allowed entries; lowest index wins ties.
/// Returns -1 when nothing is allowed.
template <typename Real, typename Allowed>
Index argmax_abs(const CVector<Real>& c, Allowed allowed) {
  Index best = -1;
  Real best_val = -1;
  for (Index i = 0; i < c.size(); ++i) {
    if (!allowed(i)) continue;
    const Real v = std::norm(c(i));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  return best;
}

/// Single-swap search for one support element. Returns the accepted
/// support and its least-squares residual (unchanged when no swap helps).
template <typename Real>
std::pair<SupportSet, Real> optimize_element(const SensingMatrix<Real>& phi, const CVector<Real>& y,
                                             const SupportSet& current, Real current_residual, Index element,
                                             const BandRadius& radius) {
  const SupportSet others = current.without(element);
  std::vector<Index> candidates;
  for (Index j : band(element, radius, phi.cols()))
    if (!others.contains(j)) candidates.push_back(j);

  // Residual of others + {j} is ||r0||^2 - |c_j'^H r0|^2 / ||c_j'||^2 with
  // r0, c_j' the components of y, column j orthogonal to span(others).
  const CMatrix<Real> q = orthonormal_basis<Real>(phi.columns(others));
  CVector<Real> r0 = y;
  if (q.cols() > 0) r0 -= q * (q.adjoint() * y);
  CMatrix<Real> c = phi.dense()(Eigen::all, candidates);
  if (q.cols() > 0) c -= q * (q.adjoint() * c);
  const CVector<Real> corr = c.adjoint() * r0;
  const Real r0_sq = r0.squaredNorm();

  Index best = element;
  Real best_score = std::numeric_limits<Real>::infinity();
  for (std::size_t n = 0; n < candidates.size(); ++n) {
    const Real col_sq = c.col(static_cast<Index>(n)).squaredNorm();
    const Real score =
        col_sq > Real(1e-12) * static_cast<Real>(phi.rows()) ? r0_sq - std::norm(corr(n)) / col_sq : r0_sq;
    if (score < best_score) {
      best_score = score;
      best = candidates[n];
    }
  }
  if (best == element) return {current, current_residual};

  // Confirm with a full refit so the accepted residual never increases.
  const SupportSet trial = others.with(best);
  const Real trial_residual = least_squares_on_support(phi, y, trial).residual_norm;
  if (trial_residual <= current_residual) return {trial, trial_residual};
  return {current, current_residual};
}

}  // namespace detail

/// Standard OMP: pick the column most correlated with the residual, refit
/// on the enlarged support, repeat s times.
template <typename Real>
RecoveredSignal<Real> omp(const SensingMatrix<Real>& phi, const CVector<Real>& y, Index s) {
  require(s >= 0 && s <= phi.rows(), ErrorCode::invalid_argument, "omp: need 0 <= s <= m");
  const Real y_norm = y.norm();
  RecoveredSignal<Real> fit = least_squares_on_support(phi, y, SupportSet{});
  CVector<Real> residual = y;
  for (Index n = 0; n < s; ++n) {
    if (fit.residual_norm <= Real(kEarlyExitResidual) * y_norm) {
      fit.flags |= SolverFlag::early_exit;
      break;
    }
    const CVector<Real> corr = phi.apply_adjoint(residual);
    const SupportSet& chosen = fit.support;
    const Index pick = detail::argmax_abs<Real>(corr, [&](Index i) { return !chosen.contains(i); });
    const SolverFlag flags = fit.flags;
    fit = least_squares_on_support(phi, y, chosen.with(pick));
    fit.flags |= flags;
    fit.iterations = n + 1;
    residual = y - phi.apply(fit.coefficients);
  }
  return fit;
}

/// For each element of S0 in ascending order, try swapping it for every
/// index in its band and keep the swap with the smallest least-squares
/// residual. The identity swap is always a candidate, so the residual is
/// non-increasing step to step.
template <typename Real>
SupportSet local_optimization(const SensingMatrix<Real>& phi, const CVector<Real>& y, const SupportSet& s0,
                              const BandRadius& radius, const LocalOptimizationOptions& options = {},
                              SolverTrace<Real>* trace = nullptr) {
  require(!s0.empty(), ErrorCode::invalid_argument, "local_optimization: empty initial support");
  require(s0.size() <= phi.rows(), ErrorCode::invalid_argument, "local_optimization: |S0| > m");
  SupportSet current = s0;
  Real residual = least_squares_on_support(phi, y, current).residual_norm;
  std::vector<Real> steps{residual};

  for (int pass = 0; pass < (options.multi_pass ? options.max_passes : 1); ++pass) {
    bool changed = false;
    // Elements in the order they held at the start of the pass; a swap
    // never lands on another element, so each is still present when visited.
    const std::vector<Index> order = current.indices();
    for (Index element : order) {
      auto [next, next_residual] = detail::optimize_element(phi, y, current, residual, element, radius);
      changed = changed || !(next == current);
      current = std::move(next);
      residual = next_residual;
      steps.push_back(residual);
    }
    if (!changed) break;
  }
  if (trace) trace->lo_residuals.push_back(std::move(steps));
  return current;
}

/// Band-excluded, locally optimized OMP. Each selection is restricted to
/// columns outside the bands of the current support and followed by a
/// local-optimization pass and a refit.
template <typename Real>
RecoveredSignal<Real> bloomp(const SensingMatrix<Real>& phi, const CVector<Real>& y, Index s, const BandRadius& radius,
                             const LocalOptimizationOptions& lo = {}, SolverTrace<Real>* trace = nullptr) {
  require(s >= 0 && s <= phi.rows(), ErrorCode::invalid_argument, "bloomp: need 0 <= s <= m");
  const Real y_norm = y.norm();
  RecoveredSignal<Real> fit = least_squares_on_support(phi, y, SupportSet{});
  CVector<Real> residual = y;
  for (Index n = 0; n < s; ++n) {
    if (fit.residual_norm <= Real(kEarlyExitResidual) * y_norm) {
      fit.flags |= SolverFlag::early_exit;
      break;
    }
    const SupportSet previous = fit.support;
    const std::vector<bool> excluded = band_mask(previous, radius, phi.cols());
    const CVector<Real> corr = phi.apply_adjoint(residual);
    const Index pick = detail::argmax_abs<Real>(corr, [&](Index i) { return !excluded[static_cast<std::size_t>(i)]; });
    require(pick >= 0, ErrorCode::band_pool_exhausted,
            "bloomp: every column lies in an excluded band after " + std::to_string(n) +
                " selections; band radius too large for s=" + std::to_string(s));
    if (trace) trace->selections.push_back({pick, previous});

    const SupportSet optimized = local_optimization(phi, y, previous.with(pick), radius, lo, trace);
    const SolverFlag flags = fit.flags;
    fit = least_squares_on_support(phi, y, optimized);
    fit.flags |= flags;
    fit.iterations = n + 1;
    residual = y - phi.apply(fit.coefficients);
  }
  return fit;
}

}  // namespace superres

#endif  // SUPERRES_SOLVERS_GREEDY_HPP
