#ifndef SUPERRES_TYPES_HPP
#define SUPERRES_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace superres {

using Index = Eigen::Index;

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

enum class ErrorCode {
  invalid_argument,
  too_large,
  infeasible_packing,
  zero_signal,
  band_pool_exhausted,
  io_error,
  config_error,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
      return "invalid_argument";
    case ErrorCode::too_large:
      return "too_large";
    case ErrorCode::infeasible_packing:
      return "infeasible_packing";
    case ErrorCode::zero_signal:
      return "zero_signal";
    case ErrorCode::band_pool_exhausted:
      return "band_pool_exhausted";
    case ErrorCode::io_error:
      return "io_error";
    case ErrorCode::config_error:
      return "config_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace superres

#endif  // SUPERRES_TYPES_HPP
