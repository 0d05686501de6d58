#include "inertdrift/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace inertdrift {

std::string format_point(const Vec& x) {
  std::ostringstream out;
  out.precision(17);
  out << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i > 0) out << ", ";
    out << x[i];
  }
  out << ')';
  return out.str();
}

const char* to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::interval: return "interval";
    case DomainKind::ball: return "ball";
    case DomainKind::box: return "box";
    case DomainKind::ellipsoid: return "ellipsoid";
    case DomainKind::level_set: return "level_set";
  }
  return "unknown";
}

namespace {

void check_dimension(Eigen::Index d) {
  if (d < 1 || d > kMaxDim) {
    throw GeometryError("dimension " + std::to_string(d) + " outside [1, " +
                        std::to_string(kMaxDim) + "]");
  }
}

// Closest point on the ellipsoid sum (x_i/e_i)^2 = 1 to z, with z_i >= 0.
// Enumerates the Lagrange candidates x_i = e_i^2 z_i / (e_i^2 + t) that stay in
// the closed first orthant and keeps the nearest.
Vec closest_on_ellipsoid(const Vec& e, const Vec& z) {
  const int n = static_cast<int>(e.size());
  std::vector<int> positive, zero;
  for (int i = 0; i < n; ++i) (z[i] > 0.0 ? positive : zero).push_back(i);

  Vec best = Vec::Zero(n);
  double best_dist = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vec& x) {
    const double dist = (x - z).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = x;
    }
  };

  if (positive.empty()) {
    int k = 0;
    for (int i = 1; i < n; ++i)
      if (e[i] < e[k]) k = i;
    Vec x = Vec::Zero(n);
    x[k] = e[k];
    return x;
  }

  // Root of sum_P (e_j z_j / (t + e_j^2))^2 = 1 on t > -min_P e_j^2, x_Z = 0.
  {
    int m = positive.front();
    for (int j : positive)
      if (e[j] < e[m]) m = j;
    double norm_ez = 0.0;
    for (int j : positive) norm_ez += (e[j] * z[j]) * (e[j] * z[j]);
    double lo = -e[m] * e[m] + e[m] * z[m];
    double hi = -e[m] * e[m] + std::sqrt(norm_ez);
    auto f = [&](double t) {
      double s = 0.0;
      for (int j : positive) {
        const double r = e[j] * z[j] / (t + e[j] * e[j]);
        s += r * r;
      }
      return s - 1.0;
    };
    for (int it = 0; it < 300; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (f(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    const double t = 0.5 * (lo + hi);
    Vec x = Vec::Zero(n);
    for (int j : positive) x[j] = e[j] * e[j] * z[j] / (t + e[j] * e[j]);
    consider(x);
  }

  // Degenerate multiplier t = -e_k^2 for a zero coordinate k.
  for (int k : zero) {
    bool admissible = true;
    for (int j : positive) admissible = admissible && e[j] > e[k];
    if (!admissible) continue;
    Vec x = Vec::Zero(n);
    double used = 0.0;
    for (int j : positive) {
      x[j] = e[j] * e[j] * z[j] / (e[j] * e[j] - e[k] * e[k]);
      used += (x[j] / e[j]) * (x[j] / e[j]);
    }
    if (used >= 1.0) continue;
    x[k] = e[k] * std::sqrt(1.0 - used);
    consider(x);
  }
  return best;
}

// C^3 even polynomial replacing the radial coordinate inside the central cap:
// p(1) = 1, p'(1) = 1, p''(1) = p'''(1) = 0, with p(t) >= t on [0, 1].
constexpr double kCap0 = 5.0 / 16.0;
constexpr double kCap2 = 15.0 / 16.0;
constexpr double kCap4 = -5.0 / 16.0;
constexpr double kCap6 = 1.0 / 16.0;

double cap_poly(double t) {
  const double t2 = t * t;
  return kCap0 + t2 * (kCap2 + t2 * (kCap4 + t2 * kCap6));
}

// p'(t) / t.
double cap_poly_slope_over_t(double t) {
  const double t2 = t * t;
  return 2.0 * kCap2 + t2 * (4.0 * kCap4 + t2 * 6.0 * kCap6);
}

std::vector<Vec> interior_scan_grid(const Domain& domain, int target_points) {
  const int d = domain.dim();
  const int per_axis = std::max(4, static_cast<int>(std::ceil(std::pow(target_points, 1.0 / d))));
  std::vector<Vec> points;
  Vec x(d);
  std::vector<int> idx(d, 0);
  const Vec& lo = domain.bbox_lower();
  const Vec& hi = domain.bbox_upper();
  while (true) {
    for (int i = 0; i < d; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * (idx[i] + 0.5) / per_axis;
    if (domain.inside(x)) points.push_back(x);
    int axis = 0;
    while (axis < d && ++idx[axis] == per_axis) idx[axis++] = 0;
    if (axis == d) break;
  }
  return points;
}

}  // namespace

Domain Domain::interval(double lower, double upper) {
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper))
    throw GeometryError("interval requires finite lower < upper");
  Domain d;
  d.kind_ = DomainKind::interval;
  d.dim_ = 1;
  d.a_ = Vec::Constant(1, lower);
  d.b_ = Vec::Constant(1, upper);
  d.finish_construction();
  return d;
}

Domain Domain::ball(const Vec& center, double radius) {
  check_dimension(center.size());
  if (!(radius > 0.0)) throw GeometryError("ball radius must be positive");
  Domain d;
  d.kind_ = DomainKind::ball;
  d.dim_ = static_cast<int>(center.size());
  d.a_ = center;
  d.radius_ = radius;
  d.finish_construction();
  return d;
}

Domain Domain::box(const Vec& lower, const Vec& upper) {
  check_dimension(lower.size());
  if (lower.size() != upper.size()) throw GeometryError("box bounds differ in dimension");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i])) throw GeometryError("box requires lower < upper on every axis");
  Domain d;
  d.kind_ = DomainKind::box;
  d.dim_ = static_cast<int>(lower.size());
  d.a_ = lower;
  d.b_ = upper;
  d.finish_construction();
  return d;
}

Domain Domain::ellipsoid(const Vec& center, const Vec& semi_axes) {
  check_dimension(center.size());
  if (center.size() != semi_axes.size()) throw GeometryError("ellipsoid axes differ in dimension");
  if ((semi_axes.array() <= 0.0).any()) throw GeometryError("ellipsoid semi-axes must be positive");
  Domain d;
  d.kind_ = DomainKind::ellipsoid;
  d.dim_ = static_cast<int>(center.size());
  d.a_ = center;
  d.b_ = semi_axes;
  d.finish_construction();
  return d;
}

Domain Domain::level_set(LevelFunction phi, const Vec& bbox_lower, const Vec& bbox_upper,
                         double inradius_hint) {
  check_dimension(bbox_lower.size());
  if (!phi.value || !phi.gradient) throw GeometryError("level set needs value and gradient");
  Domain d;
  d.kind_ = DomainKind::level_set;
  d.dim_ = static_cast<int>(bbox_lower.size());
  d.phi_ = std::move(phi);
  d.bbox_lo_ = bbox_lower;
  d.bbox_hi_ = bbox_upper;
  d.diameter_ = (bbox_upper - bbox_lower).norm();
  if (inradius_hint > 0.0) {
    d.inradius_ = inradius_hint;
  } else {
    double best = 0.0;
    for (const Vec& x : interior_scan_grid(d, 400)) best = std::max(best, d.signed_distance(x));
    if (best <= 0.0) throw GeometryError("level set has no interior grid point in its bounding box");
    d.inradius_ = best;
  }
  return d;
}

void Domain::finish_construction() {
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::box:
      bbox_lo_ = a_;
      bbox_hi_ = b_;
      diameter_ = (b_ - a_).norm();
      inradius_ = 0.5 * (b_ - a_).minCoeff();
      break;
    case DomainKind::ball:
      bbox_lo_ = a_.array() - radius_;
      bbox_hi_ = a_.array() + radius_;
      diameter_ = 2.0 * radius_;
      inradius_ = radius_;
      break;
    case DomainKind::ellipsoid:
      bbox_lo_ = a_ - b_;
      bbox_hi_ = a_ + b_;
      diameter_ = 2.0 * b_.maxCoeff();
      inradius_ = b_.minCoeff();
      break;
    case DomainKind::level_set:
      break;
  }
}

double Domain::level_value(const Vec& x) const {
  if (kind_ == DomainKind::ellipsoid) return 1.0 - ((x - a_).array() / b_.array()).square().sum();
  if (kind_ == DomainKind::level_set) return phi_.value(x);
  throw GeometryError(std::string("no level function for domain kind ") + to_string(kind_));
}

Vec Domain::level_gradient(const Vec& x) const {
  if (kind_ == DomainKind::ellipsoid)
    return (-2.0 * (x - a_).array() / b_.array().square()).matrix();
  if (kind_ == DomainKind::level_set) return phi_.gradient(x);
  throw GeometryError(std::string("no level function for domain kind ") + to_string(kind_));
}

bool Domain::inside(const Vec& x) const {
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::box:
      return (x.array() > a_.array()).all() && (x.array() < b_.array()).all();
    case DomainKind::ball:
      return (x - a_).squaredNorm() < radius_ * radius_;
    case DomainKind::ellipsoid:
    case DomainKind::level_set:
      return level_value(x) > 0.0;
  }
  return false;
}

bool Domain::in_closure(const Vec& x) const {
  if (inside(x)) return true;
  return signed_distance(x) >= -tol_bd();
}

Vec Domain::centroid() const {
  if (kind_ == DomainKind::interval || kind_ == DomainKind::box) return 0.5 * (a_ + b_);
  if (kind_ == DomainKind::level_set) return 0.5 * (bbox_lo_ + bbox_hi_);
  return a_;
}

double Domain::signed_distance(const Vec& x) const {
  if (x.size() != dim_) throw GeometryError("point dimension does not match domain");
  if (!x.allFinite()) throw GeometryError("non-finite point " + format_point(x));
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::box: {
      if (inside(x) || ((x.array() >= a_.array()).all() && (x.array() <= b_.array()).all())) {
        return std::min((x - a_).minCoeff(), (b_ - x).minCoeff());
      }
      const Vec clamped = x.cwiseMax(a_).cwiseMin(b_);
      return -(x - clamped).norm();
    }
    case DomainKind::ball:
      return radius_ - (x - a_).norm();
    case DomainKind::ellipsoid: {
      const double dist = (x - ellipsoid_closest_point(x)).norm();
      return level_value(x) >= 0.0 ? dist : -dist;
    }
    case DomainKind::level_set: {
      const double dist = (x - level_set_closest_point(x)).norm();
      return phi_.value(x) >= 0.0 ? dist : -dist;
    }
  }
  return 0.0;
}

Vec Domain::ellipsoid_closest_point(const Vec& x) const {
  const Vec y = x - a_;
  const Vec z = y.cwiseAbs();
  Vec p = closest_on_ellipsoid(b_, z);
  for (int i = 0; i < dim_; ++i)
    if (y[i] < 0.0) p[i] = -p[i];
  return a_ + p;
}

Vec Domain::level_set_closest_point(const Vec& x) const {
  const int d = dim_;
  const double tol = 1e-12 * diameter_;
  const double fd = 1e-6 * diameter_;

  // Newton onto the zero level set along the gradient.
  Vec p = x;
  for (int it = 0; it < 100; ++it) {
    const double f = phi_.value(p);
    const Vec g = phi_.gradient(p);
    const double g2 = g.squaredNorm();
    if (g2 == 0.0) break;
    Vec step = -f / g2 * g;
    double scale = 1.0;
    while (scale > 1e-8 && std::abs(phi_.value(p + scale * step)) >= std::abs(f) && f != 0.0)
      scale *= 0.5;
    p += scale * step;
    if (std::abs(phi_.value(p)) / std::sqrt(g2) < tol) break;
  }

  // Lagrange system: p - x - lambda grad phi(p) = 0, phi(p) = 0.
  Vec g = phi_.gradient(p);
  double lambda = g.squaredNorm() > 0.0 ? (p - x).dot(g) / g.squaredNorm() : 0.0;
  auto residual = [&](const Vec& q, double lam) {
    Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim + 1, 1> r(d + 1);
    r.head(d) = q - x - lam * phi_.gradient(q);
    r[d] = phi_.value(q);
    return r;
  };
  auto r = residual(p, lambda);
  for (int it = 0; it < 100 && r.norm() > tol; ++it) {
    g = phi_.gradient(p);
    Mat hess(d, d);
    for (int j = 0; j < d; ++j) {
      Vec e = Vec::Zero(d);
      e[j] = fd;
      hess.col(j) = (phi_.gradient(p + e) - phi_.gradient(p - e)) / (2.0 * fd);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim + 1, kMaxDim + 1> jac(d + 1,
                                                                                         d + 1);
    jac.setZero();
    jac.topLeftCorner(d, d) = Mat::Identity(d, d) - lambda * hess;
    jac.block(0, d, d, 1) = -g;
    jac.block(d, 0, 1, d) = g.transpose();
    const auto delta = jac.fullPivLu().solve(-r).eval();
    double scale = 1.0;
    auto trial = residual(p + scale * delta.head(d), lambda + scale * delta[d]);
    while (trial.norm() >= r.norm() && scale > 1e-6) {
      scale *= 0.5;
      trial = residual(p + scale * delta.head(d), lambda + scale * delta[d]);
    }
    p += scale * delta.head(d);
    lambda += scale * delta[d];
    r = trial;
  }
  if (!(r.norm() <= tol)) {
    std::ostringstream msg;
    msg << "level-set projection did not converge at " << format_point(x) << " (residual "
        << r.norm() << ")";
    throw NumericalError(msg.str());
  }
  return p;
}

std::vector<int> Domain::active_box_faces(const Vec& x) const {
  // Face code: 2*i for the lower face on axis i, 2*i+1 for the upper face.
  std::vector<int> faces;
  const double tol = tol_bd();
  for (int i = 0; i < dim_; ++i) {
    if (std::abs(x[i] - a_[i]) <= tol) faces.push_back(2 * i);
    if (std::abs(b_[i] - x[i]) <= tol) faces.push_back(2 * i + 1);
  }
  return faces;
}

Vec Domain::project_to_boundary(const Vec& x) const {
  if (x.size() != dim_) throw GeometryError("point dimension does not match domain");
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::box: {
      Vec clamped = x.cwiseMax(a_).cwiseMin(b_);
      if (clamped != x) return clamped;
      // Interior (or on the boundary): move to the nearest face.
      int best_axis = 0;
      bool upper = false;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < dim_; ++i) {
        if (x[i] - a_[i] < best) {
          best = x[i] - a_[i];
          best_axis = i;
          upper = false;
        }
        if (b_[i] - x[i] < best) {
          best = b_[i] - x[i];
          best_axis = i;
          upper = true;
        }
      }
      Vec p = x;
      p[best_axis] = upper ? b_[best_axis] : a_[best_axis];
      return p;
    }
    case DomainKind::ball: {
      Vec r = x - a_;
      const double norm = r.norm();
      if (norm == 0.0) {
        r = Vec::Zero(dim_);
        r[0] = 1.0;
        return a_ + radius_ * r;
      }
      return a_ + (radius_ / norm) * r;
    }
    case DomainKind::ellipsoid:
      return ellipsoid_closest_point(x);
    case DomainKind::level_set:
      return level_set_closest_point(x);
  }
  return x;
}

Vec Domain::inward_normal(const Vec& x_boundary) const {
  const double dist = std::abs(signed_distance(x_boundary));
  if (dist > tol_bd()) {
    std::ostringstream msg;
    msg << "inward_normal: point " << format_point(x_boundary) << " is " << dist
        << " from the boundary (tolerance " << tol_bd() << ")";
    throw GeometryError(msg.str());
  }
  return normal_at_projection(x_boundary);
}

Vec Domain::normal_at_projection(const Vec& x) const {
  const Vec p = project_to_boundary(x);
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::box: {
      Vec n = Vec::Zero(dim_);
      for (int face : active_box_faces(p)) n[face / 2] += (face % 2 == 0) ? 1.0 : -1.0;
      const double norm = n.norm();
      if (norm == 0.0) throw GeometryError("no active face at " + format_point(p));
      return n / norm;
    }
    case DomainKind::ball:
      return (a_ - p) / radius_;
    case DomainKind::ellipsoid:
    case DomainKind::level_set: {
      const Vec g = level_gradient(p);
      const double norm = g.norm();
      if (norm == 0.0) throw GeometryError("vanishing level gradient at " + format_point(p));
      return g / norm;
    }
  }
  return Vec::Zero(dim_);
}

std::pair<double, double> Domain::slice_range(const Vec& prefix, int axis) const {
  if (axis < 0 || axis >= dim_) throw GeometryError("slice axis out of range");
  constexpr std::pair<double, double> kEmpty{1.0, 0.0};
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::box:
      for (int i = 0; i < axis; ++i)
        if (prefix[i] < a_[i] || prefix[i] > b_[i]) return kEmpty;
      return {a_[axis], b_[axis]};
    case DomainKind::ball: {
      double r2 = radius_ * radius_;
      for (int i = 0; i < axis; ++i) r2 -= (prefix[i] - a_[i]) * (prefix[i] - a_[i]);
      if (r2 < 0.0) return kEmpty;
      const double h = std::sqrt(r2);
      return {a_[axis] - h, a_[axis] + h};
    }
    case DomainKind::ellipsoid: {
      double s = 1.0;
      for (int i = 0; i < axis; ++i) {
        const double u = (prefix[i] - a_[i]) / b_[i];
        s -= u * u;
      }
      if (s < 0.0) return kEmpty;
      const double h = b_[axis] * std::sqrt(s);
      return {a_[axis] - h, a_[axis] + h};
    }
    case DomainKind::level_set:
      break;
  }
  throw GeometryError("slice_range is not available for level-set domains");
}

// ---------------------------------------------------------------------------
// RegularizedDistance

RegularizedDistance::RegularizedDistance(Domain domain, RegularizationParams params)
    : domain_(std::move(domain)), params_(params) {
  if (!(params_.cap_fraction > 0.0 && params_.cap_fraction < 1.0))
    throw GeometryError("cap_fraction must lie in (0, 1)");
  if (!(params_.sharpness >= 1.0)) throw GeometryError("sharpness must be >= 1");
  switch (domain_.kind()) {
    case DomainKind::interval:
    case DomainKind::ball: {
      // c_upper = 1 since p(t) >= t; c_lower is the minimum of
      // (R - w p(t)) / (R - w t) over the cap, found by a dense scan.
      const double big_r = domain_.inradius();
      const double w = params_.cap_fraction * big_r;
      double lowest = 1.0;
      for (int i = 0; i <= 4000; ++i) {
        const double t = i / 4000.0;
        lowest = std::min(lowest, (big_r - w * cap_poly(t)) / (big_r - w * t));
      }
      c_lower_ = lowest * (1.0 - 1e-6);
      c_upper_ = 1.0;
      break;
    }
    case DomainKind::box:
      c_lower_ = std::pow(2.0 * domain_.dim(), -1.0 / params_.sharpness);
      c_upper_ = 1.0;
      break;
    case DomainKind::ellipsoid:
      level_scale_ = 2.0 / domain_.semi_axes().minCoeff();
      measure_constants_by_scan();
      break;
    case DomainKind::level_set: {
      double g_max = 0.0;
      for (const Vec& x : interior_scan_grid(domain_, 2000)) {
        if (domain_.signed_distance(x) < 0.05 * domain_.inradius())
          g_max = std::max(g_max, domain_.level_gradient(domain_.project_to_boundary(x)).norm());
      }
      if (g_max <= 0.0) throw GeometryError("level set: could not sample boundary gradients");
      level_scale_ = g_max;
      measure_constants_by_scan();
      break;
    }
  }
}

RegularizedDistance::RegularizedDistance(Domain domain, ValueFn value, GradientFn gradient,
                                         double c_lower, double c_upper)
    : domain_(std::move(domain)),
      custom_value_(std::move(value)),
      custom_gradient_(std::move(gradient)),
      c_lower_(c_lower),
      c_upper_(c_upper) {}

RegularizedDistance RegularizedDistance::custom(Domain domain, ValueFn value, GradientFn gradient,
                                                double c_lower, double c_upper) {
  if (!value || !gradient) throw GeometryError("custom regularized distance needs two callbacks");
  if (!(c_lower > 0.0 && c_lower <= c_upper))
    throw GeometryError("custom regularized distance needs 0 < c_lower <= c_upper");
  return RegularizedDistance(std::move(domain), std::move(value), std::move(gradient), c_lower,
                             c_upper);
}

void RegularizedDistance::measure_constants_by_scan() {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const Vec& x : interior_scan_grid(domain_, 10000)) {
    const double exact = domain_.signed_distance(x);
    if (exact <= 0.0) continue;
    const double ratio = evaluate(x).first / exact;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  // Random points between scan nodes can do slightly better or worse.
  c_lower_ = 0.9 * lo;
  c_upper_ = 1.1 * hi;
}

std::pair<double, Vec> RegularizedDistance::evaluate(const Vec& x) const {
  if (custom_value_) return {custom_value_(x), custom_gradient_(x)};
  const int d = domain_.dim();
  switch (domain_.kind()) {
    case DomainKind::interval:
    case DomainKind::ball: {
      const double big_r = domain_.inradius();
      const double w = params_.cap_fraction * big_r;
      const Vec r = x - domain_.centroid();
      const double s = r.norm();
      if (s >= w) return {big_r - s, -r / s};
      const double t = s / w;
      return {big_r - w * cap_poly(t), -cap_poly_slope_over_t(t) / w * r};
    }
    case DomainKind::box: {
      const double p = params_.sharpness;
      const Vec& lo = domain_.lower();
      const Vec& hi = domain_.upper();
      double m = std::numeric_limits<double>::infinity();
      for (int i = 0; i < d; ++i) m = std::min({m, x[i] - lo[i], hi[i] - x[i]});
      if (m <= 0.0) {
        Vec g = Vec::Zero(d);
        for (int i = 0; i < d; ++i) {
          if (x[i] - lo[i] <= 0.0) g[i] += 1.0;
          if (hi[i] - x[i] <= 0.0) g[i] -= 1.0;
        }
        return {0.0, g};
      }
      double sum = 0.0;
      for (int i = 0; i < d; ++i) sum += std::pow(m / (x[i] - lo[i]), p) + std::pow(m / (hi[i] - x[i]), p);
      const double delta = m * std::pow(sum, -1.0 / p);
      Vec g = Vec::Zero(d);
      for (int i = 0; i < d; ++i) {
        g[i] += std::pow(delta / (x[i] - lo[i]), p + 1.0);
        g[i] -= std::pow(delta / (hi[i] - x[i]), p + 1.0);
      }
      return {delta, g};
    }
    case DomainKind::ellipsoid:
    case DomainKind::level_set:
      return {domain_.level_value(x) / level_scale_, domain_.level_gradient(x) / level_scale_};
  }
  return {0.0, Vec::Zero(d)};
}

std::pair<double, Vec> RegularizedDistance::value_and_gradient(const Vec& x) const {
  if (!domain_.in_closure(x))
    throw GeometryError("regularized distance: point " + format_point(x) +
                        " is outside the closure of the domain");
  return evaluate(x);
}

double RegularizedDistance::value(const Vec& x) const { return value_and_gradient(x).first; }

Vec RegularizedDistance::gradient(const Vec& x) const { return value_and_gradient(x).second; }

}  // namespace inertdrift
