#ifndef SUPERRES_SUPPORT_SET_HPP
#define SUPERRES_SUPPORT_SET_HPP

#include "superres/types.hpp"

#include <algorithm>
#include <initializer_list>
#include <vector>

namespace superres {

/// Sorted, duplicate-free set of fine-grid column indices.
class SupportSet {
 public:
  SupportSet() = default;
  SupportSet(std::initializer_list<Index> indices) : indices_(indices) { normalize(); }
  explicit SupportSet(std::vector<Index> indices) : indices_(std::move(indices)) { normalize(); }

  /// Contiguous range [first, last], inclusive.
  static SupportSet interval(Index first, Index last) {
    SupportSet out;
    if (last >= first) {
      out.indices_.resize(static_cast<std::size_t>(last - first + 1));
      for (Index i = first; i <= last; ++i) out.indices_[static_cast<std::size_t>(i - first)] = i;
    }
    return out;
  }

  bool contains(Index i) const { return std::binary_search(indices_.begin(), indices_.end(), i); }

  void insert(Index i) {
    auto it = std::lower_bound(indices_.begin(), indices_.end(), i);
    if (it == indices_.end() || *it != i) indices_.insert(it, i);
  }

  void erase(Index i) {
    auto it = std::lower_bound(indices_.begin(), indices_.end(), i);
    if (it != indices_.end() && *it == i) indices_.erase(it);
  }

  SupportSet without(Index i) const {
    SupportSet out = *this;
    out.erase(i);
    return out;
  }

  SupportSet with(Index i) const {
    SupportSet out = *this;
    out.insert(i);
    return out;
  }

  bool includes(const SupportSet& other) const {
    return std::includes(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end());
  }

  SupportSet united(const SupportSet& other) const {
    SupportSet out;
    out.indices_.reserve(indices_.size() + other.indices_.size());
    std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                   std::back_inserter(out.indices_));
    return out;
  }

  const std::vector<Index>& indices() const { return indices_; }
  Index size() const { return static_cast<Index>(indices_.size()); }
  bool empty() const { return indices_.empty(); }
  Index operator[](Index n) const { return indices_[static_cast<std::size_t>(n)]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  void normalize() {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  }

  std::vector<Index> indices_;
};

/// Indices of the nonzero entries of a coefficient vector.
template <typename Derived>
SupportSet nonzero_support(const Eigen::MatrixBase<Derived>& x) {
  std::vector<Index> idx;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) != typename Derived::Scalar(0)) idx.push_back(i);
  }
  return SupportSet(std::move(idx));
}

}  // namespace superres

#endif  // SUPERRES_SUPPORT_SET_HPP
