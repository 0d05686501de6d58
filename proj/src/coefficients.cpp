#include "inertdrift/coefficients.hpp"

#include <cmath>
#include <sstream>

namespace inertdrift {

const char* to_string(ConormalConvention c) {
  return c == ConormalConvention::half ? "half" : "full";
}

const char* to_string(InertField::Kind k) {
  switch (k) {
    case InertField::Kind::gamma_normal: return "gamma_normal";
    case InertField::Kind::scaled_conormal: return "scaled_conormal";
    case InertField::Kind::custom: return "custom";
  }
  return "unknown";
}

namespace {

Mat symmetric_sqrt(const Mat& a, bool inverse) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(a);
  Vec ev = eig.eigenvalues();
  if ((ev.array() <= 0.0).any()) throw NumericalError("diffusion matrix is not positive definite");
  ev = inverse ? ev.cwiseSqrt().cwiseInverse().eval() : ev.cwiseSqrt().eval();
  return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

CoefficientSet::CoefficientSet(Domain domain, MatrixField diffusion, ScalarField density,
                               const Mat& gamma, CoefficientOptions options)
    : domain_(std::move(domain)),
      a_(std::move(diffusion)),
      rho_(std::move(density)),
      gamma_(gamma),
      options_(std::move(options)) {
  if (!a_ || !rho_) throw ConfigError("coefficients", "diffusion and density callbacks required");
  validate();
}

void CoefficientSet::validate() {
  const int d = dim();
  if (gamma_.rows() != d || gamma_.cols() != d)
    throw ConfigError("coefficients.gamma", "expected a " + std::to_string(d) + "x" +
                                                std::to_string(d) + " matrix");
  const double scale = std::max(1.0, gamma_.cwiseAbs().maxCoeff());
  if ((gamma_ - gamma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ConfigError("coefficients.gamma", "matrix is not symmetric");
  Eigen::LLT<Mat> llt(gamma_);
  if (llt.info() != Eigen::Success)
    throw ConfigError("coefficients.gamma", "matrix is not positive definite");
  gamma_chol_ = llt.matrixL();
  if (options_.inert_field.kind == InertField::Kind::custom && !options_.inert_field.custom)
    throw ConfigError("coefficients.inert_field", "custom field requires a callback");

  // Sample A and rho on a grid over the closure.
  lambda_min_ = std::numeric_limits<double>::infinity();
  lambda_max_ = 0.0;
  rho_min_ = std::numeric_limits<double>::infinity();
  rho_max_ = 0.0;
  const int per_axis = std::max(2, options_.validation_grid);
  const Vec& lo = domain_.bbox_lower();
  const Vec& hi = domain_.bbox_upper();
  std::vector<int> idx(d, 0);
  Vec x(d);
  int sampled = 0;
  while (true) {
    for (int i = 0; i < d; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (per_axis - 1);
    if (domain_.in_closure(x)) {
      const Mat a = a_(x);
      if (a.rows() != d || a.cols() != d)
        throw ConfigError("coefficients.diffusion", "callback returned a matrix of wrong size");
      if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()))
        throw ConfigError("coefficients.diffusion", "A(x) is not symmetric at " + format_point(x));
      const Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(a, Eigen::EigenvaluesOnly).eigenvalues();
      lambda_min_ = std::min(lambda_min_, ev.minCoeff());
      lambda_max_ = std::max(lambda_max_, ev.maxCoeff());
      const double r = rho_(x);
      rho_min_ = std::min(rho_min_, r);
      rho_max_ = std::max(rho_max_, r);
      ++sampled;
    }
    int axis = 0;
    while (axis < d && ++idx[axis] == per_axis) idx[axis++] = 0;
    if (axis == d) break;
  }
  if (sampled == 0) throw ConfigError("coefficients", "validation grid missed the domain");
  if (!(lambda_min_ > 0.0))
    throw ConfigError("coefficients.diffusion", "A(x) is not uniformly positive definite");
  if (!(rho_min_ > 0.0) || !std::isfinite(rho_max_))
    throw ConfigError("coefficients.density", "rho must stay in (0, inf) on the domain");
}

CoefficientSet CoefficientSet::identity(Domain domain, const Mat& gamma, CoefficientOptions options) {
  const int d = domain.dim();
  if (!options.drift) options.drift = [d](const Vec&) { return Vec(Vec::Zero(d)); };
  CoefficientSet cs(
      std::move(domain), [d](const Vec&) { return Mat(Mat::Identity(d, d)); },
      [](const Vec&) { return 1.0; }, gamma, std::move(options));
  cs.preset_ = "identity";
  cs.constant_ = true;
  cs.const_sigma_ = Mat::Identity(d, d);
  cs.const_sigma_inv_ = Mat::Identity(d, d);
  return cs;
}

CoefficientSet CoefficientSet::exp_density(Domain domain, const Mat& gamma,
                                           CoefficientOptions options) {
  const int d = domain.dim();
  if (!options.drift) {
    options.drift = [d](const Vec&) {
      Vec b = Vec::Zero(d);
      b[0] = 0.5;
      return b;
    };
  }
  CoefficientSet cs(
      std::move(domain), [d](const Vec&) { return Mat(Mat::Identity(d, d)); },
      [](const Vec& x) { return std::exp(x[0]); }, gamma, std::move(options));
  cs.preset_ = "exp_density";
  cs.constant_ = true;
  cs.const_sigma_ = Mat::Identity(d, d);
  cs.const_sigma_inv_ = Mat::Identity(d, d);
  return cs;
}

CoefficientSet CoefficientSet::anisotropic(Domain domain, const Vec& diagonal, const Mat& gamma,
                                           CoefficientOptions options) {
  const int d = domain.dim();
  if (diagonal.size() != d)
    throw ConfigError("coefficients.diagonal", "length does not match the dimension");
  if ((diagonal.array() <= 0.0).any())
    throw ConfigError("coefficients.diagonal", "entries must be positive");
  if (!options.drift) options.drift = [d](const Vec&) { return Vec(Vec::Zero(d)); };
  const Mat a = diagonal.asDiagonal();
  CoefficientSet cs(
      std::move(domain), [a](const Vec&) { return a; }, [](const Vec&) { return 1.0; }, gamma,
      std::move(options));
  cs.preset_ = "anisotropic";
  cs.constant_ = true;
  cs.const_sigma_ = diagonal.cwiseSqrt().asDiagonal();
  cs.const_sigma_inv_ = diagonal.cwiseSqrt().cwiseInverse().asDiagonal();
  return cs;
}

Mat CoefficientSet::diffusion_matrix(const Vec& x) const { return a_(x); }

Mat CoefficientSet::sigma(const Vec& x) const {
  return constant_ ? const_sigma_ : symmetric_sqrt(a_(x), false);
}

Mat CoefficientSet::sigma_inverse(const Vec& x) const {
  return constant_ ? const_sigma_inv_ : symmetric_sqrt(a_(x), true);
}

DriftVector CoefficientSet::drift_b(const Vec& x) const {
  if (options_.drift) return {options_.drift(x), false};
  const int d = dim();
  const double h = options_.fd_step_fraction * domain_.diameter();
  auto weighted_column = [&](const Vec& p, int i) -> Vec {
    return rho_(p) * a_(p).row(i).transpose();  // rho * a_{i,.}
  };
  DriftVector out{Vec::Zero(d), false};
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = h;
    const bool fwd = domain_.in_closure(x + e);
    const bool bwd = domain_.in_closure(x - e);
    Vec deriv;
    if (fwd && bwd) {
      deriv = (weighted_column(x + e, i) - weighted_column(x - e, i)) / (2.0 * h);
    } else if (fwd) {
      out.one_sided_stencil = true;
      deriv = (-3.0 * weighted_column(x, i) + 4.0 * weighted_column(x + e, i) -
               weighted_column(x + 2.0 * e, i)) /
              (2.0 * h);
    } else if (bwd) {
      out.one_sided_stencil = true;
      deriv = (3.0 * weighted_column(x, i) - 4.0 * weighted_column(x - e, i) +
               weighted_column(x - 2.0 * e, i)) /
              (2.0 * h);
    } else {
      throw GeometryError("drift_b: no finite-difference stencil fits at " + format_point(x));
    }
    out.value += deriv;
  }
  out.value /= 2.0 * rho_(x);
  return out;
}

Vec CoefficientSet::conormal_u(const Vec& x_boundary, ConormalConvention convention) const {
  const Vec n = domain_.inward_normal(x_boundary);
  const Vec u = a_(x_boundary) * n;
  return convention == ConormalConvention::half ? Vec(0.5 * u) : u;
}

Vec CoefficientSet::conormal_at_projection(const Vec& x) const {
  const Vec n = domain_.normal_at_projection(x);
  const Vec u = (constant_ ? a_(x) : a_(domain_.project_to_boundary(x))) * n;
  return options_.convention == ConormalConvention::half ? Vec(0.5 * u) : u;
}

Vec CoefficientSet::inert_field(const Vec& x_boundary) const {
  switch (options_.inert_field.kind) {
    case InertField::Kind::gamma_normal:
      return gamma_ * domain_.normal_at_projection(x_boundary);
    case InertField::Kind::scaled_conormal:
      return options_.inert_field.a0 * conormal_at_projection(x_boundary);
    case InertField::Kind::custom:
      return options_.inert_field.custom(x_boundary);
  }
  return Vec::Zero(dim());
}

Vec CoefficientSet::gamma_solve(const Vec& y) const {
  return gamma_chol_.transpose().triangularView<Eigen::Upper>().solve(
      gamma_chol_.triangularView<Eigen::Lower>().solve(y));
}

// ---------------------------------------------------------------------------
// Potential

namespace {
// exp(u) * u^2 * n stays finite for u <= 650 and any practical n.
constexpr double kMaxExponent = 650.0;
}  // namespace

Potential Potential::regularized_vn(RegularizedDistance delta, int n) {
  if (n < 1) throw ConfigError("potential.n", "must be a positive integer");
  Potential p;
  p.kind_ = Kind::regularized_vn;
  p.domain_ = delta.domain();
  p.n_ = n;
  p.delta_floor_ = std::max(1e-12 * p.domain_.diameter(), 1.0 / (n * kMaxExponent));
  p.delta_.emplace(std::move(delta));
  return p;
}

Potential Potential::user_supplied(Domain domain, ScalarField value, VectorField gradient) {
  if (!value || !gradient) throw ConfigError("potential", "user potential needs V and grad V");
  Potential p;
  p.kind_ = Kind::user_supplied;
  p.domain_ = std::move(domain);
  p.value_ = std::move(value);
  p.gradient_ = std::move(gradient);
  p.delta_floor_ = 1e-12 * p.domain_.diameter();
  return p;
}

std::pair<double, Vec> Potential::value_and_gradient(const Vec& x) const {
  if (kind_ == Kind::user_supplied) {
    const double v = value_(x);
    Vec g = gradient_(x);
    if (!std::isfinite(v) || !g.allFinite())
      throw NumericalError("potential overflow at " + format_point(x));
    return {v, g};
  }
  const auto [delta, grad_delta] = delta_->value_and_gradient(x);
  if (!(delta > delta_floor_)) {
    std::ostringstream msg;
    msg << "potential overflow at " << format_point(x) << ": delta = " << delta
        << " below floor " << delta_floor_;
    throw NumericalError(msg.str());
  }
  const double u = 1.0 / (n_ * delta);
  const double v = std::exp(u);
  return {v, (-v * u / delta) * grad_delta};
}

double Potential::value(const Vec& x) const { return value_and_gradient(x).first; }

Vec Potential::gradient(const Vec& x) const { return value_and_gradient(x).second; }

double Potential::boltzmann_factor(const Vec& x) const {
  if (!domain_.inside(x)) return 0.0;
  if (kind_ == Kind::user_supplied) {
    const double v = value_(x);
    return std::isfinite(v) ? std::exp(-v) : 0.0;
  }
  const double delta = delta_->value(x);
  if (!(delta > delta_floor_)) return 0.0;
  return std::exp(-std::exp(1.0 / (n_ * delta)));
}

bool Potential::finite_at(const Vec& x) const {
  if (!domain_.inside(x)) return false;
  if (kind_ == Kind::user_supplied) return std::isfinite(value_(x));
  return delta_->value(x) > delta_floor_;
}

}  // namespace inertdrift
