#ifndef SUPERRES_SOLVERS_BLOT_HPP
#define SUPERRES_SOLVERS_BLOT_HPP

#include "superres/solvers/bpdn.hpp"
#include "superres/solvers/greedy.hpp"

namespace superres {

/// Band-excluded, locally optimized thresholding of a dense estimate:
/// pick the s largest entries of x_in with each pick outside the bands of
/// the earlier ones, locally optimize that support against y, then refit.
/// When no nonzero entry remains outside the bands, the largest remaining
/// entries are taken regardless of band and the result is flagged.
template <typename Real>
RecoveredSignal<Real> blot(const CVector<Real>& x_in, const SensingMatrix<Real>& phi, const CVector<Real>& y, Index s,
                           const BandRadius& radius, const LocalOptimizationOptions& lo = {},
                           SolverTrace<Real>* trace = nullptr) {
  require(x_in.size() == phi.cols(), ErrorCode::invalid_argument, "blot: x_in must have length N");
  require(s >= 0 && s <= phi.rows(), ErrorCode::invalid_argument, "blot: need 0 <= s <= m");
  SolverFlag flags = SolverFlag::none;
  SupportSet chosen;
  for (Index n = 0; n < s; ++n) {
    const std::vector<bool> excluded = band_mask(chosen, radius, phi.cols());
    Index pick = detail::argmax_abs<Real>(
        x_in, [&](Index i) { return !excluded[static_cast<std::size_t>(i)] && x_in(i) != Complex<Real>(0); });
    if (pick < 0) {
      flags |= SolverFlag::band_padded;
      pick = detail::argmax_abs<Real>(x_in, [&](Index i) { return !chosen.contains(i); });
    } else if (trace) {
      trace->selections.push_back({pick, chosen});
    }
    chosen.insert(pick);
  }
  if (chosen.empty()) {
    RecoveredSignal<Real> out = least_squares_on_support(phi, y, chosen);
    out.flags |= flags;
    return out;
  }
  const SupportSet optimized = local_optimization(phi, y, chosen, radius, lo, trace);
  RecoveredSignal<Real> out = least_squares_on_support(phi, y, optimized);
  out.flags |= flags;
  out.iterations = s;
  return out;
}

/// BPDN followed by BLOT on its output.
template <typename Real>
RecoveredSignal<Real> bp_blot(const SensingMatrix<Real>& phi, const CVector<Real>& y, Index s,
                              const BpdnSettings<Real>& settings, const BandRadius& radius,
                              const LocalOptimizationOptions& lo = {}) {
  const RecoveredSignal<Real> bp = bpdn(phi, y, settings);
  RecoveredSignal<Real> out = blot(bp.coefficients, phi, y, s, radius, lo);
  out.flags |= bp.flags;
  return out;
}

}  // namespace superres

#endif  // SUPERRES_SOLVERS_BLOT_HPP
