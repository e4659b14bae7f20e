#ifndef SUPERRES_MODEL_HPP
#define SUPERRES_MODEL_HPP

// Grid-bound spike trains, partial Fourier sensing matrices and noisy
// measurements y = Phi x + e.

#include "superres/support_set.hpp"
#include "superres/types.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace superres {

/// Coarse measurement grid (m frequencies) refined by an integer factor F.
/// The fine grid has N = m * F points, the Rayleigh length is 1/m.
struct GridSpec {
  Index m = 150;
  Index F = 1;

  GridSpec() = default;
  GridSpec(Index m_, Index F_) : m(m_), F(F_) {
    require(m >= 1, ErrorCode::invalid_argument, "grid: m must be >= 1");
    require(F >= 1, ErrorCode::invalid_argument, "grid: F must be >= 1");
    require(m <= std::numeric_limits<Index>::max() / F, ErrorCode::too_large, "grid: m*F overflows");
  }

  Index N() const { return m * F; }
  double ell() const { return 1.0 / static_cast<double>(m); }
  double fine_spacing() const { return 1.0 / static_cast<double>(N()); }

  /// Position in Rayleigh units of a fine-grid index.
  double to_ell(Index i) const { return static_cast<double>(i) / static_cast<double>(F); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

template <typename Real>
struct Spike {
  Index index = 0;
  Complex<Real> amplitude{};
};

/// Sparse signal on the fine grid. Entries are kept sorted by index and
/// every amplitude is nonzero.
template <typename Real>
class SpikeTrain {
 public:
  SpikeTrain() = default;
  SpikeTrain(GridSpec grid, std::vector<Spike<Real>> entries) : grid_(grid), entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    for (std::size_t n = 0; n < entries_.size(); ++n) {
      const auto& e = entries_[n];
      require(e.index >= 0 && e.index < grid_.N(), ErrorCode::invalid_argument,
              "spike index " + std::to_string(e.index) + " outside [0, N)");
      require(e.amplitude != Complex<Real>(0), ErrorCode::invalid_argument, "spike amplitude must be nonzero");
      require(n == 0 || entries_[n - 1].index != e.index, ErrorCode::invalid_argument,
              "duplicate spike index " + std::to_string(e.index));
    }
  }

  const GridSpec& grid() const { return grid_; }
  const std::vector<Spike<Real>>& entries() const { return entries_; }
  Index sparsity() const { return static_cast<Index>(entries_.size()); }

  SupportSet support() const {
    std::vector<Index> idx;
    idx.reserve(entries_.size());
    for (const auto& e : entries_) idx.push_back(e.index);
    return SupportSet(std::move(idx));
  }

  CVector<Real> dense() const {
    CVector<Real> x = CVector<Real>::Zero(grid_.N());
    for (const auto& e : entries_) x(e.index) = e.amplitude;
    return x;
  }

  std::vector<double> positions_ell() const {
    std::vector<double> out;
    for (const auto& e : entries_) out.push_back(grid_.to_ell(e.index));
    return out;
  }

 private:
  GridSpec grid_;
  std::vector<Spike<Real>> entries_;
};

inline constexpr Index kDefaultMaxMatrixEntries = Index(1) << 26;

/// Dense m x N partial DFT matrix, Phi(k, l) = exp(-2 pi i k l / N).
template <typename Real>
class SensingMatrix {
 public:
  explicit SensingMatrix(GridSpec grid, Index max_entries = kDefaultMaxMatrixEntries) : grid_(grid) {
    require(grid.N() <= max_entries / grid.m, ErrorCode::too_large,
            "sensing matrix " + std::to_string(grid.m) + "x" + std::to_string(grid.N()) +
                " exceeds the dense storage limit of " + std::to_string(max_entries) + " entries");
    const Index n = grid.N();
    dense_.resize(grid.m, n);
    for (Index l = 0; l < n; ++l) dense_.col(l) = column(l);
  }

  const GridSpec& grid() const { return grid_; }
  Index rows() const { return grid_.m; }
  Index cols() const { return grid_.N(); }
  const CMatrix<Real>& dense() const { return dense_; }

  /// Column l generated from the closed form. The phase k*l is reduced
  /// modulo N before scaling so large products keep full accuracy.
  CVector<Real> column(Index l) const {
    const Index n = grid_.N();
    CVector<Real> c(grid_.m);
    for (Index k = 0; k < grid_.m; ++k) {
      const Index q = (k * l) % n;
      const Real angle = -Real(2) * std::numbers::pi_v<Real> * static_cast<Real>(q) / static_cast<Real>(n);
      c(k) = std::polar(Real(1), angle);
    }
    return c;
  }

  template <typename Derived>
  CVector<Real> apply(const Eigen::MatrixBase<Derived>& x) const {
    return dense_ * x;
  }

  template <typename Derived>
  CVector<Real> apply_adjoint(const Eigen::MatrixBase<Derived>& r) const {
    return dense_.adjoint() * r;
  }

  /// Phi x for a spike train, summed column by column in index order.
  CVector<Real> apply(const SpikeTrain<Real>& x) const {
    CVector<Real> y = CVector<Real>::Zero(grid_.m);
    for (const auto& e : x.entries()) y += e.amplitude * dense_.col(e.index);
    return y;
  }

  /// Columns restricted to a support, in ascending index order.
  CMatrix<Real> columns(const SupportSet& s) const { return dense_(Eigen::all, s.indices()); }

 private:
  GridSpec grid_;
  CMatrix<Real> dense_;
};

/// Phi and Phi^H applied through length-N FFTs. Not thread-safe (the FFT
/// object caches plans); build one per solve.
template <typename Real>
class FourierOperator {
 public:
  explicit FourierOperator(GridSpec grid) : grid_(grid) { fft_.SetFlag(Eigen::FFT<Real>::Unscaled); }

  CVector<Real> apply(const CVector<Real>& x) {
    fft_.fwd(spectrum_, x);
    return spectrum_.head(grid_.m);
  }

  CVector<Real> apply_adjoint(const CVector<Real>& r) {
    padded_.setZero(grid_.N());
    padded_.head(grid_.m) = r;
    CVector<Real> out;
    fft_.inv(out, padded_);
    return out;
  }

 private:
  GridSpec grid_;
  Eigen::FFT<Real> fft_;
  CVector<Real> spectrum_;
  CVector<Real> padded_;
};

/// How spike amplitudes are drawn. Magnitudes are uniform on
/// [min_magnitude, max_magnitude]; phases uniform on [0, 2 pi) or, for
/// positive_real, on (-pi/2, pi/2).
struct AmplitudeModel {
  enum class Phase { random, positive_real };
  Phase phase = Phase::random;
  double min_magnitude = 1.0;
  double max_magnitude = 2.0;

  void validate() const {
    require(min_magnitude > 0 && max_magnitude >= min_magnitude, ErrorCode::invalid_argument,
            "amplitude model: need 0 < min_magnitude <= max_magnitude");
  }

  template <typename Real, typename Rng>
  Complex<Real> draw(Rng& rng) const {
    std::uniform_real_distribution<double> mag(min_magnitude, max_magnitude);
    const double r = mag(rng);
    double theta = 0;
    if (phase == Phase::random) {
      theta = std::uniform_real_distribution<double>(0.0, 2 * std::numbers::pi)(rng);
    } else {
      std::uniform_real_distribution<double> half(-std::numbers::pi / 2, std::numbers::pi / 2);
      do {
        theta = half(rng);
      } while (theta == -std::numbers::pi / 2);
    }
    return std::polar(static_cast<Real>(r), static_cast<Real>(theta));
  }
};

using Rng = std::mt19937_64;

inline constexpr int kPlacementAttempts = 10000;

namespace detail {

inline Index circular_gap(Index a, Index b, Index n) {
  const Index d = a > b ? a - b : b - a;
  return std::min(d, n - d);
}

inline double circular_gap(double a, double b, double span) {
  const double d = std::abs(a - b);
  return std::min(d, span - d);
}

}  // namespace detail

/// Fine-grid indices for s spikes, pairwise (and circularly) at least
/// min_sep_steps apart. Uniform rejection sampling with a bounded number
/// of draws, then a deterministic first-fit / evenly-spaced fallback.
inline std::vector<Index> place_indices(Index n, Index s, Index min_sep_steps, Rng& rng) {
  require(s >= 0, ErrorCode::invalid_argument, "placement: negative spike count");
  require(min_sep_steps >= 0, ErrorCode::invalid_argument, "placement: negative separation");
  std::vector<Index> placed;
  if (s == 0) return placed;
  auto fits = [&](Index c) {
    for (Index p : placed)
      if (detail::circular_gap(p, c, n) < min_sep_steps || p == c) return false;
    return true;
  };
  std::uniform_int_distribution<Index> pick(0, n - 1);
  for (int attempt = 0; attempt < kPlacementAttempts && static_cast<Index>(placed.size()) < s; ++attempt) {
    const Index c = pick(rng);
    if (fits(c)) placed.push_back(c);
  }
  for (Index c = 0; c < n && static_cast<Index>(placed.size()) < s; ++c) {
    if (fits(c)) placed.push_back(c);
  }
  if (static_cast<Index>(placed.size()) < s) {
    const Index spacing = n / s;
    require(spacing >= std::max<Index>(min_sep_steps, 1), ErrorCode::infeasible_packing,
            "placement: cannot fit " + std::to_string(s) + " spikes " + std::to_string(min_sep_steps) +
                " steps apart on " + std::to_string(n) + " points");
    placed.clear();
    for (Index i = 0; i < s; ++i) placed.push_back(i * spacing);
  }
  std::sort(placed.begin(), placed.end());
  return placed;
}

/// Continuous positions on the circle [0, span) separated by at least
/// min_sep. Same sampling scheme as place_indices.
inline std::vector<double> place_positions(double span, Index s, double min_sep, Rng& rng) {
  require(s >= 0 && min_sep > 0 && span > 0, ErrorCode::invalid_argument, "placement: invalid arguments");
  require(static_cast<double>(s) * min_sep < span, ErrorCode::infeasible_packing,
          "placement: " + std::to_string(s) + " spikes at separation " + std::to_string(min_sep) +
              " do not fit in span " + std::to_string(span));
  std::vector<double> placed;
  std::uniform_real_distribution<double> pick(0.0, span);
  for (int attempt = 0; attempt < kPlacementAttempts && static_cast<Index>(placed.size()) < s; ++attempt) {
    const double c = pick(rng);
    bool ok = true;
    for (double p : placed) ok = ok && detail::circular_gap(p, c, span) >= min_sep;
    if (ok) placed.push_back(c);
  }
  if (static_cast<Index>(placed.size()) < s) {
    placed.clear();
    for (Index i = 0; i < s; ++i) placed.push_back(static_cast<double>(i) * span / static_cast<double>(s));
  }
  std::sort(placed.begin(), placed.end());
  return placed;
}

/// Fine-grid index nearest to a position given in Rayleigh units.
inline Index snap_to_grid(const GridSpec& grid, double position_ell) {
  const auto i = static_cast<Index>(std::llround(position_ell * static_cast<double>(grid.F)));
  return ((i % grid.N()) + grid.N()) % grid.N();
}

/// Random spike train: s spikes at least min_sep (Rayleigh units) apart,
/// amplitudes per the model. Deterministic in the seed.
template <typename Real = double>
SpikeTrain<Real> synthesize_spikes(const GridSpec& grid, Index s, double min_sep, const AmplitudeModel& amplitudes,
                                   std::uint64_t seed) {
  require(min_sep > 0, ErrorCode::invalid_argument, "synthesize_spikes: min_sep must be > 0");
  amplitudes.validate();
  const double steps = min_sep * static_cast<double>(grid.F);
  require(static_cast<double>(s) * steps < static_cast<double>(grid.N()), ErrorCode::infeasible_packing,
          "synthesize_spikes: s * min_sep * F must be < N");
  const auto sep_steps = static_cast<Index>(std::ceil(steps - 1e-9));
  Rng rng(seed);
  const auto idx = place_indices(grid.N(), s, sep_steps, rng);
  std::vector<Spike<Real>> entries;
  for (Index i : idx) entries.push_back({i, amplitudes.draw<Real>(rng)});
  return SpikeTrain<Real>(grid, std::move(entries));
}

/// Spikes at explicit positions (Rayleigh units), snapped to the fine grid.
template <typename Real = double>
SpikeTrain<Real> spikes_at(const GridSpec& grid, const std::vector<double>& positions_ell,
                           const AmplitudeModel& amplitudes, std::uint64_t seed) {
  amplitudes.validate();
  std::vector<double> sorted = positions_ell;
  std::sort(sorted.begin(), sorted.end());
  Rng rng(seed);
  std::vector<Spike<Real>> entries;
  for (double p : sorted) entries.push_back({snap_to_grid(grid, p), amplitudes.draw<Real>(rng)});
  return SpikeTrain<Real>(grid, std::move(entries));
}

template <typename Real>
struct Measurement {
  CVector<Real> y;
  Real noise_norm = 0;
  Real snr = std::numeric_limits<Real>::infinity();
};

/// y = Phi x + e, with e circular complex Gaussian rescaled so that
/// ||e|| = ||Phi x|| / snr exactly. snr = inf gives e = 0.
template <typename Real>
Measurement<Real> measure(const SensingMatrix<Real>& phi, const SpikeTrain<Real>& x, Real snr, std::uint64_t seed) {
  require(phi.grid() == x.grid(), ErrorCode::invalid_argument, "measure: sensing matrix and signal grids differ");
  require(snr > 0, ErrorCode::invalid_argument, "measure: snr must be positive");
  Measurement<Real> out;
  out.snr = snr;
  const CVector<Real> clean = phi.apply(x);
  if (std::isinf(snr)) {
    out.y = clean;
    out.noise_norm = 0;
    return out;
  }
  const Real clean_norm = clean.norm();
  require(clean_norm > 0, ErrorCode::zero_signal, "measure: Phi x is zero, noise scale undefined");
  Rng rng(seed);
  std::normal_distribution<Real> gauss(0, 1);
  CVector<Real> e(clean.size());
  for (Index k = 0; k < e.size(); ++k) {
    const Real re = gauss(rng);
    const Real im = gauss(rng);
    e(k) = Complex<Real>(re, im);
  }
  e *= (clean_norm / snr) / e.norm();
  out.y = clean + e;
  out.noise_norm = (out.y - clean).norm();
  return out;
}

}  // namespace superres

#endif  // SUPERRES_MODEL_HPP
