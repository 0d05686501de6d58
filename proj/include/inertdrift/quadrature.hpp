#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "inertdrift/geometry.hpp"

namespace inertdrift::quadrature {

/// Gauss-Legendre rule on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point Gauss-Legendre rule.
const Rule& gauss_legendre(int n);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      carry_ += (sum_ - t) + v;
    else
      carry_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Point in the joint (x, y) space, up to 2 * kMaxDim coordinates.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2 * kMaxDim, 1>;

/// Composite tensor Gauss-Legendre over an axis-aligned box.
double integrate_box(const Point& lower, const Point& upper,
                     const std::function<double(const Point&)>& f, int nodes, int panels = 1);

struct DomainRule {
  int nodes = 48;
  int panels = 2;
  /// Samples for the Monte Carlo fallback (level sets in 3D).
  long long mc_samples = 1 << 20;
};

/// Integral of f over D.
///
/// Convex kinds use iterated slices: each axis range comes from
/// Domain::slice_range and is mapped by x = m - h cos(theta), which absorbs the
/// square-root endpoint behaviour of curved slices. `caps`, when given,
/// truncates each axis from above (x_j <= caps[j]). Level sets fall back to an
/// indicator-weighted tensor rule over the bounding box (d <= 2) or antithetic
/// Monte Carlo (d = 3).
double integrate_domain(const Domain& domain, const std::function<double(const Vec&)>& f,
                        const DomainRule& rule = {}, const Vec* caps = nullptr);

}  // namespace inertdrift::quadrature
