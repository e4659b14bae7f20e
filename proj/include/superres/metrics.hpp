#ifndef SUPERRES_METRICS_HPP
#define SUPERRES_METRICS_HPP

// Error measures for spike recovery: relative l2 error before and after
// smoothing with an approximate delta of half-width eta, data residual,
// and Bottleneck / Hausdorff distances between supports.

#include "superres/model.hpp"
#include "superres/support_set.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace superres {

/// Approximate delta function of half-width eta (Rayleigh units),
/// discretized on a fine grid as eta_fine = round(eta * F) steps.
struct FilterSpec {
  enum class Kernel { tent, boxcar };

  double eta = 0;
  Kernel kernel = Kernel::tent;
  Index eta_fine = 0;

  static FilterSpec make(double eta, Index F, Kernel kernel = Kernel::tent) {
    require(eta >= 0, ErrorCode::invalid_argument, "filter: eta must be >= 0");
    // Round half up; the offset absorbs representation error in eta * F.
    const auto fine = static_cast<Index>(std::floor(eta * static_cast<double>(F) + 0.5 + 1e-9));
    return {eta, kernel, fine};
  }

  /// Positive eta that rounded to the identity kernel.
  bool collapsed() const { return eta > 0 && eta_fine == 0; }
};

/// Normalized kernel weights at offsets -eta_fine..eta_fine.
template <typename Real = double>
RVector<Real> kernel_weights(const FilterSpec& f) {
  require(f.eta_fine >= 0, ErrorCode::invalid_argument, "filter: eta_fine must be >= 0");
  const Index h = f.eta_fine;
  RVector<Real> w(2 * h + 1);
  for (Index d = -h; d <= h; ++d)
    w(d + h) = f.kernel == FilterSpec::Kernel::tent ? static_cast<Real>(h + 1 - std::abs(d)) : Real(1);
  w /= w.sum();
  return w;
}

/// Zero-padded convolution with the filter kernel.
template <typename Real>
CVector<Real> filter_signal(const CVector<Real>& x, const FilterSpec& f) {
  if (f.eta_fine == 0) return x;
  const RVector<Real> w = kernel_weights<Real>(f);
  const Index h = f.eta_fine;
  const Index n = x.size();
  CVector<Real> out = CVector<Real>::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (x(i) == Complex<Real>(0)) continue;
    const Index lo = std::max<Index>(0, i - h);
    const Index hi = std::min<Index>(n - 1, i + h);
    for (Index j = lo; j <= hi; ++j) out(j) += w(j - i + h) * x(i);
  }
  return out;
}

/// ||filter(x_hat) - filter(x)|| / ||filter(x)||.
template <typename Real>
Real filtered_error(const CVector<Real>& x_hat, const CVector<Real>& x, const FilterSpec& f) {
  require(x_hat.size() == x.size(), ErrorCode::invalid_argument, "filtered_error: length mismatch");
  const CVector<Real> fx = filter_signal(x, f);
  const Real denom = fx.norm();
  require(denom > 0, ErrorCode::zero_signal, "filtered_error: reference signal is zero");
  return (filter_signal(x_hat, f) - fx).norm() / denom;
}

template <typename Real>
Real unfiltered_error(const CVector<Real>& x_hat, const CVector<Real>& x) {
  return filtered_error(x_hat, x, FilterSpec{});
}

/// ||Phi x_hat - y|| / ||y||.
template <typename Real>
Real relative_residual(const SensingMatrix<Real>& phi, const CVector<Real>& x_hat, const CVector<Real>& y) {
  require(x_hat.size() == phi.cols() && y.size() == phi.rows(), ErrorCode::invalid_argument,
          "relative_residual: shape mismatch");
  const Real y_norm = y.norm();
  require(y_norm > 0, ErrorCode::zero_signal, "relative_residual: y is zero");
  return (phi.apply(x_hat) - y).norm() / y_norm;
}

/// Minimum over perfect matchings of the largest matched distance, in
/// Rayleigh units. On a line the order-preserving matching is optimal.
inline double bottleneck_distance(const SupportSet& a, const SupportSet& b, const GridSpec& grid) {
  require(a.size() == b.size(), ErrorCode::invalid_argument,
          "bottleneck_distance: cardinalities differ (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
              ")");
  require(!a.empty(), ErrorCode::invalid_argument, "bottleneck_distance: empty sets");
  Index worst = 0;
  for (Index n = 0; n < a.size(); ++n) worst = std::max(worst, std::abs(a[n] - b[n]));
  return grid.to_ell(worst);
}

inline double hausdorff_distance(const SupportSet& a, const SupportSet& b, const GridSpec& grid) {
  require(!a.empty() && !b.empty(), ErrorCode::invalid_argument, "hausdorff_distance: empty set");
  auto directed = [](const SupportSet& from, const SupportSet& to) {
    Index worst = 0;
    for (Index p : from) {
      auto it = std::lower_bound(to.begin(), to.end(), p);
      Index nearest = std::numeric_limits<Index>::max();
      if (it != to.end()) nearest = *it - p;
      if (it != to.begin()) nearest = std::min(nearest, p - *std::prev(it));
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return grid.to_ell(std::max(directed(a, b), directed(b, a)));
}

struct EvaluationRecord {
  double unfiltered_rel_error = 0;
  std::map<double, double> filtered_rel_errors;  // eta -> error
  double relative_residual = 0;
  std::optional<double> bottleneck;  // defined when support sizes match
  double hausdorff = 0;
  double runtime_ms = 0;
};

/// Every metric for one recovery against the planted spike train.
template <typename Real>
EvaluationRecord evaluate(const SensingMatrix<Real>& phi, const SpikeTrain<Real>& truth, const CVector<Real>& x_hat,
                          const CVector<Real>& y, const std::vector<double>& eta_list,
                          FilterSpec::Kernel kernel = FilterSpec::Kernel::tent) {
  const CVector<Real> x = truth.dense();
  EvaluationRecord rec;
  rec.unfiltered_rel_error = static_cast<double>(unfiltered_error(x_hat, x));
  for (double eta : eta_list)
    rec.filtered_rel_errors[eta] =
        static_cast<double>(filtered_error(x_hat, x, FilterSpec::make(eta, truth.grid().F, kernel)));
  rec.relative_residual = static_cast<double>(relative_residual(phi, x_hat, y));
  const SupportSet est = nonzero_support(x_hat);
  const SupportSet ref = truth.support();
  if (!est.empty() && est.size() == ref.size()) rec.bottleneck = bottleneck_distance(est, ref, truth.grid());
  rec.hausdorff = est.empty() ? std::numeric_limits<double>::infinity() : hausdorff_distance(est, ref, truth.grid());
  return rec;
}

}  // namespace superres

#endif  // SUPERRES_METRICS_HPP
