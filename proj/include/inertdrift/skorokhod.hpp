#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "inertdrift/geometry.hpp"

namespace inertdrift {

/// Piecewise-linear free path f sampled at strictly increasing times.
struct DrivingPath {
  std::vector<double> times;
  std::vector<Vec> values;
};

/// Solution (g, l) of the Skorokhod problem at the driving path's sample times.
///
/// `pushes[i]` is the boundary push n(xi) * dl applied on the step ending at
/// times[i] (zero for i = 0 and for steps without boundary contact), so that
/// g[i] = f[i] + sum_{j <= i} pushes[j].
struct ConstrainedPath {
  std::vector<double> times;
  std::vector<Vec> g;
  std::vector<double> ell;
  std::vector<Vec> pushes;
};

/// Direction of the boundary push at a boundary point.
using PushField = std::function<Vec(const Vec& boundary_point)>;

struct ReflectResult {
  Vec x_new;
  double dl = 0.0;
  Vec contact;  ///< boundary point where the push was applied (x_new when dl > 0)
};

/// Largest increment accepted by a single reflect step: 0.25 * inradius.
double feature_size_guard(const Domain& domain);

/// One discrete reflection: x_new = x + increment + dl * push(xi) in the closure
/// of D with the smallest dl >= 0. The push direction is taken at the boundary
/// projection xi of x + increment; dl comes from a bracketed root solve on the
/// signed distance along that direction.
///
/// Throws GeometryError when the increment exceeds the feature-size guard or
/// the push points outward, NumericalError when the root bracket fails.
ReflectResult reflect_step(const Domain& domain, const Vec& x, const Vec& increment,
                           const PushField& push);

/// Same with the inward unit normal as push field.
ReflectResult reflect_step(const Domain& domain, const Vec& x, const Vec& increment);

/// Solve g = f + int n(g) dl by chaining normal reflect steps along f.
ConstrainedPath solve_skorokhod(const Domain& domain, const DrivingPath& f);

/// CSV `t,x1,...,xd`.
DrivingPath read_path_csv(std::istream& in);
void write_path_csv(std::ostream& out, const DrivingPath& path);
/// CSV `t,x1,...,xd,ell`.
void write_constrained_path_csv(std::ostream& out, const ConstrainedPath& path);

}  // namespace inertdrift
