#ifndef SUPERRES_SOLVERS_RECOVERED_SIGNAL_HPP
#define SUPERRES_SOLVERS_RECOVERED_SIGNAL_HPP

#include "superres/support_set.hpp"
#include "superres/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace superres {

/// Non-fatal conditions a solver reports alongside its result.
enum class SolverFlag : std::uint32_t {
  none = 0,
  rank_deficient = 1u << 0,  // least-norm solution on a rank-deficient column set
  early_exit = 1u << 1,      // residual vanished before s selections
  unconverged = 1u << 2,     // BPDN hit max_iterations
  band_padded = 1u << 3,     // BLOT ran out of candidates outside the bands
  dense_fallback = 1u << 4,  // BPDN returned the projected (dense) iterate
};

constexpr SolverFlag operator|(SolverFlag a, SolverFlag b) {
  return static_cast<SolverFlag>(static_cast<std::uint32_t>(a) | static_cast<std::uint32_t>(b));
}
constexpr SolverFlag& operator|=(SolverFlag& a, SolverFlag b) { return a = a | b; }
constexpr bool has_flag(SolverFlag set, SolverFlag f) {
  return (static_cast<std::uint32_t>(set) & static_cast<std::uint32_t>(f)) != 0;
}

inline std::vector<std::string> flag_names(SolverFlag set) {
  std::vector<std::string> out;
  if (has_flag(set, SolverFlag::rank_deficient)) out.emplace_back("rank_deficient");
  if (has_flag(set, SolverFlag::early_exit)) out.emplace_back("early_exit");
  if (has_flag(set, SolverFlag::unconverged)) out.emplace_back("unconverged");
  if (has_flag(set, SolverFlag::band_padded)) out.emplace_back("band_padded");
  if (has_flag(set, SolverFlag::dense_fallback)) out.emplace_back("dense_fallback");
  return out;
}

template <typename Real>
struct RecoveredSignal {
  CVector<Real> coefficients;
  SupportSet support;
  Real residual_norm = 0;
  SolverFlag flags = SolverFlag::none;
  Index iterations = 0;
};

/// Optional instrumentation filled in by the greedy solvers.
template <typename Real>
struct SolverTrace {
  struct Selection {
    Index index;
    SupportSet previous;  // support before this selection
  };
  // Residual after every local-optimization step, including the start.
  std::vector<std::vector<Real>> lo_residuals;
  std::vector<Selection> selections;
};

}  // namespace superres

#endif  // SUPERRES_SOLVERS_RECOVERED_SIGNAL_HPP
