#ifndef SUPERRES_BANDS_HPP
#define SUPERRES_BANDS_HPP

// Coherence bands around fine-grid columns, the Rayleigh index of a
// support, and the band-radius rule for well- and sub-Rayleigh-separated
// spikes.

#include "superres/support_set.hpp"
#include "superres/types.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace superres {

struct BandRadius {
  enum class Origin { rayleigh, half_min_sep, explicit_steps };

  Index radius_fine = 0;
  Origin origin = Origin::explicit_steps;
  // Periodic bands on the fine grid instead of clamping at 0 and N-1.
  bool wrap = false;

  static BandRadius rayleigh(Index F) { return {F, Origin::rayleigh, false}; }
  static BandRadius steps(Index r) { return {r, Origin::explicit_steps, false}; }

  friend bool operator==(const BandRadius&, const BandRadius&) = default;
};

/// Indices within radius_fine of j.
inline SupportSet band(Index j, const BandRadius& r, Index n) {
  require(j >= 0 && j < n, ErrorCode::invalid_argument, "band: index outside [0, N)");
  if (!r.wrap) return SupportSet::interval(std::max<Index>(0, j - r.radius_fine), std::min(n - 1, j + r.radius_fine));
  if (2 * r.radius_fine + 1 >= n) return SupportSet::interval(0, n - 1);
  std::vector<Index> idx;
  for (Index d = -r.radius_fine; d <= r.radius_fine; ++d) idx.push_back(((j + d) % n + n) % n);
  return SupportSet(std::move(idx));
}

inline SupportSet band_of_set(const SupportSet& s, const BandRadius& r, Index n) {
  SupportSet out;
  for (Index j : s) out = out.united(band(j, r, n));
  return out;
}

/// Membership mask of band_of_set(s), for O(1) exclusion tests.
inline std::vector<bool> band_mask(const SupportSet& s, const BandRadius& r, Index n) {
  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  for (Index j : s) {
    for (Index d = -r.radius_fine; d <= r.radius_fine; ++d) {
      Index i = j + d;
      if (r.wrap) {
        i = ((i % n) + n) % n;
      } else if (i < 0 || i >= n) {
        continue;
      }
      mask[static_cast<std::size_t>(i)] = true;
    }
  }
  return mask;
}

/// Smallest r >= 1 such that every window [t, t + 4r) holds at most r of
/// the positions (Rayleigh units). Windows anchored at each point realize
/// the supremum over t.
inline Index rayleigh_index(const std::vector<double>& positions) {
  require(!positions.empty(), ErrorCode::invalid_argument, "rayleigh_index: empty position list");
  for (std::size_t i = 1; i < positions.size(); ++i)
    require(positions[i] > positions[i - 1], ErrorCode::invalid_argument,
            "rayleigh_index: positions must be sorted and distinct");
  constexpr double tol = 1e-9;
  const auto n = static_cast<Index>(positions.size());
  for (Index r = 1; r < n; ++r) {
    const double width = 4.0 * static_cast<double>(r);
    Index worst = 0;
    std::size_t hi = 0;
    for (std::size_t lo = 0; lo < positions.size(); ++lo) {
      hi = std::max(hi, lo);
      while (hi < positions.size() && positions[hi] < positions[lo] + width - tol) ++hi;
      worst = std::max<Index>(worst, static_cast<Index>(hi - lo));
    }
    if (worst <= r) return r;
  }
  return n;
}

/// One Rayleigh length (F steps) for spikes at least 1 apart, otherwise
/// half the minimum separation, floored to whole fine-grid steps.
inline BandRadius default_band_radius(double min_sep, Index F) {
  require(min_sep > 0, ErrorCode::invalid_argument, "default_band_radius: min_sep must be > 0");
  require(F >= 1, ErrorCode::invalid_argument, "default_band_radius: F must be >= 1");
  if (min_sep >= 1.0) return BandRadius::rayleigh(F);
  const auto r = static_cast<Index>(std::floor(min_sep * static_cast<double>(F) / 2.0 + 1e-9));
  require(r >= 1, ErrorCode::invalid_argument,
          "default_band_radius: half of min_sep " + std::to_string(min_sep) +
              " is below one fine step at F=" + std::to_string(F));
  return {r, BandRadius::Origin::half_min_sep, false};
}

}  // namespace superres

#endif  // SUPERRES_BANDS_HPP
