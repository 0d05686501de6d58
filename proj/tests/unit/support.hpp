#pragma once

#include <cmath>
#include <random>

#include "inertdrift/types.hpp"

namespace testing {

using inertdrift::Vec;

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline inertdrift::Mat mat1(double a) { return inertdrift::Mat::Constant(1, 1, a); }

inline inertdrift::Mat diag(std::initializer_list<double> v) {
  const Vec d = vec(v);
  return d.asDiagonal();
}

/// Uniform point in the box [lo, hi].
inline Vec uniform_in(std::mt19937_64& rng, const Vec& lo, const Vec& hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec x(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
  return x;
}

}  // namespace testing
