#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "inertdrift/types.hpp"

namespace inertdrift {

enum class DomainKind { interval, ball, box, ellipsoid, level_set };

const char* to_string(DomainKind kind);

/// Scalar level function phi with D = {phi > 0} and its gradient.
struct LevelFunction {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

/// A bounded open domain D in R^d.
///
/// Containment agrees with the sign of `signed_distance`. Signed distance is
/// exact for intervals, balls and boxes; ellipsoids use a bisection on the
/// closest-point multiplier, which is exact to rounding; level sets use a damped
/// Newton projection on the Lagrange system and throw `NumericalError` when it
/// fails to converge.
///
/// Box edges and corners: within `tol_bd()` of several faces the inward normal
/// is the normalized sum of the active face normals.
///
/// Immutable after construction.
class Domain {
 public:
  static Domain interval(double lower, double upper);
  static Domain ball(const Vec& center, double radius);
  static Domain box(const Vec& lower, const Vec& upper);
  static Domain ellipsoid(const Vec& center, const Vec& semi_axes);
  /// D = {phi > 0} inside the given bounding box. `inradius_hint` <= 0 means
  /// estimate it from a grid scan.
  static Domain level_set(LevelFunction phi, const Vec& bbox_lower, const Vec& bbox_upper,
                          double inradius_hint = 0.0);

  DomainKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }

  double signed_distance(const Vec& x) const;
  /// signed_distance(x) > 0, evaluated without a projection where possible.
  bool inside(const Vec& x) const;
  /// signed_distance(x) >= -tol_bd().
  bool in_closure(const Vec& x) const;

  /// Closest point of the boundary to x (x may be inside or outside).
  Vec project_to_boundary(const Vec& x) const;
  /// Unit inward normal at a point within tol_bd() of the boundary.
  Vec inward_normal(const Vec& x_boundary) const;
  /// Inward normal at the boundary projection of an arbitrary point.
  Vec normal_at_projection(const Vec& x) const;

  double diameter() const noexcept { return diameter_; }
  double inradius() const noexcept { return inradius_; }
  double tol_bd() const noexcept { return 1e-9 * diameter_; }
  Vec centroid() const;
  const Vec& bbox_lower() const noexcept { return bbox_lo_; }
  const Vec& bbox_upper() const noexcept { return bbox_hi_; }

  /// Range of x[axis] over {x in D : x[0..axis) = prefix[0..axis)}; empty
  /// (first > second) when the slice misses D. Not available for level sets.
  std::pair<double, double> slice_range(const Vec& prefix, int axis) const;
  bool supports_slicing() const noexcept { return kind_ != DomainKind::level_set; }

  /// Level function for ellipsoid and level-set domains (phi > 0 inside).
  double level_value(const Vec& x) const;
  Vec level_gradient(const Vec& x) const;

  // Parameters, by kind.
  const Vec& lower() const noexcept { return a_; }
  const Vec& upper() const noexcept { return b_; }
  const Vec& center() const noexcept { return a_; }
  double radius() const noexcept { return radius_; }
  const Vec& semi_axes() const noexcept { return b_; }

 private:
  Domain() = default;
  void finish_construction();
  Vec ellipsoid_closest_point(const Vec& x) const;
  Vec level_set_closest_point(const Vec& x) const;
  std::vector<int> active_box_faces(const Vec& x) const;

  DomainKind kind_ = DomainKind::interval;
  int dim_ = 1;
  Vec a_;  // lower / center
  Vec b_;  // upper / semi-axes
  double radius_ = 0.0;
  LevelFunction phi_;
  Vec bbox_lo_, bbox_hi_;
  double diameter_ = 0.0;
  double inradius_ = 0.0;
};

/// Parameters for the per-domain regularized distance constructions.
struct RegularizationParams {
  /// Interval and ball: radius of the smoothed central cap as a fraction of
  /// the inradius. Outside the cap the regularized distance is exact.
  double cap_fraction = 0.2;
  /// Box: exponent p of the power-mean soft minimum (sum d_i^-p)^(-1/p).
  double sharpness = 8.0;
};

/// Smooth interior function delta with c_lower * dist <= delta <= c_upper * dist.
///
/// Interval and ball use the exact distance to the boundary outside a central
/// cap, where a C^3 even polynomial in the radial coordinate replaces it. Boxes
/// use a power-mean soft minimum of the face distances. Ellipsoids and level
/// sets use the level function divided by the largest gradient norm seen on a
/// grid scan; their sandwich constants are measured on that scan.
class RegularizedDistance {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradientFn = std::function<Vec(const Vec&)>;

  explicit RegularizedDistance(Domain domain, RegularizationParams params = {});
  /// A user-provided construction with declared sandwich constants.
  static RegularizedDistance custom(Domain domain, ValueFn value, GradientFn gradient,
                                    double c_lower, double c_upper);

  /// Throws GeometryError outside the closure of D.
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  std::pair<double, Vec> value_and_gradient(const Vec& x) const;

  double c_lower() const noexcept { return c_lower_; }
  double c_upper() const noexcept { return c_upper_; }
  const Domain& domain() const noexcept { return domain_; }
  const RegularizationParams& params() const noexcept { return params_; }

 private:
  RegularizedDistance(Domain domain, ValueFn value, GradientFn gradient, double c_lower,
                      double c_upper);
  std::pair<double, Vec> evaluate(const Vec& x) const;
  void measure_constants_by_scan();

  Domain domain_;
  RegularizationParams params_;
  ValueFn custom_value_;
  GradientFn custom_gradient_;
  double level_scale_ = 1.0;
  double c_lower_ = 1.0;
  double c_upper_ = 1.0;
};

}  // namespace inertdrift
