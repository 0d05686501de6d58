#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace inertdrift {

/// Largest spatial dimension supported by the fixed-capacity vector types.
inline constexpr int kMaxDim = 3;

/// Point or vector in R^d, d <= kMaxDim. Stack allocated.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
/// d x d matrix, d <= kMaxDim. Stack allocated.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point is outside the region where a geometric query is defined.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Iterative solve failed or a value left floating-point range.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration. `field()` names the offending path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

std::string format_point(const Vec& x);

}  // namespace inertdrift
