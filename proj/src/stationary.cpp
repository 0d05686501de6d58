#include "inertdrift/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/fpclassify.hpp>  // pchip.hpp in 1.74 needs isnan in scope
#include <boost/math/interpolators/pchip.hpp>

namespace inertdrift {

namespace {

std::vector<Vec> scan_points(const Domain& domain, int per_axis) {
  const int d = domain.dim();
  std::vector<Vec> pts;
  std::vector<int> idx(d, 0);
  Vec x(d);
  while (true) {
    for (int i = 0; i < d; ++i)
      x[i] = domain.bbox_lower()[i] +
             (domain.bbox_upper()[i] - domain.bbox_lower()[i]) * (idx[i] + 0.5) / per_axis;
    if (domain.inside(x)) pts.push_back(x);
    int axis = 0;
    while (axis < d && ++idx[axis] == per_axis) idx[axis++] = 0;
    if (axis == d) break;
  }
  pts.push_back(domain.centroid());
  return pts;
}

}  // namespace

StationaryMeasure::StationaryMeasure(CoefficientSet cs, std::optional<Potential> potential,
                                     StationaryOptions options)
    : cs_(std::move(cs)), potential_(std::move(potential)), options_(options) {
  const Domain& domain = cs_.domain();
  const int d = domain.dim();
  auto p = [this](const Vec& x) { return x_density_unnormalized(x); };

  // e^{-V} falls off steeply near the boundary; the normalizer gets a finer rule.
  quadrature::DomainRule mass_rule = options_.rule;
  mass_rule.panels *= 8;
  const double mass = quadrature::integrate_domain(domain, p, mass_rule);
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw NumericalError("stationary measure: x-density has no finite positive mass");
  c_x_ = 1.0 / mass;

  const Mat& gamma = cs_.gamma();
  c_y_ = 1.0 / std::sqrt((std::numbers::pi * gamma).determinant());

  x_mean_ = Vec::Zero(d);
  for (int j = 0; j < d; ++j)
    x_mean_[j] = c_x_ * quadrature::integrate_domain(
                            domain, [&](const Vec& x) { return x[j] * p(x); }, options_.rule);

  const int per_axis = d == 1 ? 4001 : (d == 2 ? 161 : 41);
  double scan_max = 0.0;
  for (const Vec& x : scan_points(domain, per_axis)) scan_max = std::max(scan_max, p(x));
  density_bound_ = is_gradient() ? 1.1 * scan_max : 1.05 * std::max(scan_max, cs_.rho_max());

  // Tabulated x-marginal CDFs.
  const int m = std::max(3, d == 1 ? options_.cdf_points : std::min(options_.cdf_points, 257));
  cdf_grid_.assign(d, {});
  cdf_values_.assign(d, {});
  for (int j = 0; j < d; ++j) {
    const double lo = domain.bbox_lower()[j];
    const double hi = domain.bbox_upper()[j];
    auto& grid = cdf_grid_[j];
    auto& values = cdf_values_[j];
    grid.resize(m);
    values.resize(m);
    for (int i = 0; i < m; ++i) grid[i] = lo + (hi - lo) * i / (m - 1);
    if (d == 1) {
      // Cumulative Gauss-Legendre on consecutive cells.
      const auto& rule = quadrature::gauss_legendre(10);
      values[0] = 0.0;
      quadrature::CompensatedSum acc;
      for (int i = 1; i < m; ++i) {
        const double a = grid[i - 1], b = grid[i];
        Vec x(1);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          x[0] = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q];
          acc.add(0.5 * (b - a) * rule.weights[q] * p(x));
        }
        values[i] = c_x_ * acc.value();
      }
    } else {
      quadrature::DomainRule rule = options_.rule;
      rule.nodes = std::min(rule.nodes, 24);
      Vec caps = Vec::Constant(d, std::numeric_limits<double>::infinity());
      for (int i = 0; i < m; ++i) {
        caps[j] = grid[i];
        values[i] = c_x_ * quadrature::integrate_domain(domain, p, rule, &caps);
      }
    }
    // Clean up rounding so the table is a CDF.
    for (int i = 0; i < m; ++i) values[i] = std::clamp(values[i], 0.0, 1.0);
    for (int i = 1; i < m; ++i) values[i] = std::max(values[i], values[i - 1]);
    values.back() = 1.0;
    cdf_interp_.push_back(boost::math::interpolators::pchip<std::vector<double>>(std::vector<double>(grid), std::vector<double>(values)));
  }
}

StationaryMeasure StationaryMeasure::reflected(const CoefficientSet& cs, StationaryOptions options) {
  return StationaryMeasure(cs, std::nullopt, options);
}

StationaryMeasure StationaryMeasure::gradient(const CoefficientSet& cs, const Potential& potential,
                                              StationaryOptions options) {
  if (potential.domain().dim() != cs.dim())
    throw ConfigError("potential", "dimension does not match the coefficients");
  return StationaryMeasure(cs, potential, options);
}

double StationaryMeasure::x_density_unnormalized(const Vec& x) const {
  const Domain& domain = cs_.domain();
  if (!domain.inside(x)) return 0.0;
  const double rho = cs_.density(x);
  if (!potential_) return rho;
  if (options_.potential_scale == 1.0) return rho * potential_->boltzmann_factor(x);
  if (!potential_->finite_at(x)) return 0.0;
  return rho * std::exp(-options_.potential_scale * potential_->value(x));
}

double StationaryMeasure::y_density(const Vec& y) const {
  return c_y_ * std::exp(-y.dot(cs_.gamma_solve(y)));
}

double StationaryMeasure::x_marginal_cdf(int j, double v) const {
  if (j < 0 || j >= dim()) throw Error("x_marginal_cdf: coordinate out of range");
  const auto& grid = cdf_grid_[j];
  if (v <= grid.front()) return 0.0;
  if (v >= grid.back()) return 1.0;
  return std::clamp(cdf_interp_[j](v), 0.0, 1.0);
}

double StationaryMeasure::x_marginal_density(int j, double v) const {
  const auto& grid = cdf_grid_[j];
  const double h = grid[1] - grid[0];
  return (x_marginal_cdf(j, v + 0.5 * h) - x_marginal_cdf(j, v - 0.5 * h)) / h;
}

// ---------------------------------------------------------------------------
// Test functions and the generator

namespace {

double bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double u = 1.0 - s * s;
  return u * u * u;
}
double bump_d1(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double u = 1.0 - s * s;
  return -6.0 * s * u * u;
}
double bump_d2(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double u = 1.0 - s * s;
  return u * (30.0 * s * s - 6.0);
}

}  // namespace

TestFunction bump_product(std::string id, const Vec& x_center, const Vec& x_halfwidth,
                          const Vec& y_center, const Vec& y_halfwidth) {
  const int d = static_cast<int>(x_center.size());
  if (x_halfwidth.size() != d || y_center.size() != d || y_halfwidth.size() != d)
    throw Error("bump_product: inconsistent dimensions");
  if ((x_halfwidth.array() <= 0.0).any() || (y_halfwidth.array() <= 0.0).any())
    throw Error("bump_product: half-widths must be positive");

  struct Factors {
    Vec s, t, fs, ft, ds, dt, d2s;
  };
  auto factors = [=](const Vec& x, const Vec& y) {
    Factors f{Vec(d), Vec(d), Vec(d), Vec(d), Vec(d), Vec(d), Vec(d)};
    for (int j = 0; j < d; ++j) {
      f.s[j] = (x[j] - x_center[j]) / x_halfwidth[j];
      f.t[j] = (y[j] - y_center[j]) / y_halfwidth[j];
      f.fs[j] = bump(f.s[j]);
      f.ft[j] = bump(f.t[j]);
      f.ds[j] = bump_d1(f.s[j]) / x_halfwidth[j];
      f.dt[j] = bump_d1(f.t[j]) / y_halfwidth[j];
      f.d2s[j] = bump_d2(f.s[j]) / (x_halfwidth[j] * x_halfwidth[j]);
    }
    return f;
  };
  // Product of entries of v except indices i and k.
  auto product_except = [d](const Vec& v, int i, int k) {
    double p = 1.0;
    for (int j = 0; j < d; ++j)
      if (j != i && j != k) p *= v[j];
    return p;
  };

  TestFunction f;
  f.id = std::move(id);
  f.value = [=](const Vec& x, const Vec& y) {
    const Factors q = factors(x, y);
    return q.fs.prod() * q.ft.prod();
  };
  f.grad_x = [=](const Vec& x, const Vec& y) {
    const Factors q = factors(x, y);
    const double ty = q.ft.prod();
    Vec g(d);
    for (int i = 0; i < d; ++i) g[i] = q.ds[i] * product_except(q.fs, i, -1) * ty;
    return g;
  };
  f.grad_y = [=](const Vec& x, const Vec& y) {
    const Factors q = factors(x, y);
    const double sx = q.fs.prod();
    Vec g(d);
    for (int i = 0; i < d; ++i) g[i] = q.dt[i] * product_except(q.ft, i, -1) * sx;
    return g;
  };
  f.hess_x = [=](const Vec& x, const Vec& y) {
    const Factors q = factors(x, y);
    const double ty = q.ft.prod();
    Mat h(d, d);
    for (int i = 0; i < d; ++i) {
      for (int k = 0; k < d; ++k) {
        h(i, k) = (i == k ? q.d2s[i] * product_except(q.fs, i, -1)
                          : q.ds[i] * q.ds[k] * product_except(q.fs, i, k)) *
                  ty;
      }
    }
    return h;
  };
  f.has_support = true;
  f.x_lower = x_center - x_halfwidth;
  f.x_upper = x_center + x_halfwidth;
  f.y_lower = y_center - y_halfwidth;
  f.y_upper = y_center + y_halfwidth;
  return f;
}

namespace {

bool box_strictly_inside(const Domain& domain, const Vec& lo, const Vec& hi) {
  const int d = domain.dim();
  for (int corner = 0; corner < (1 << d); ++corner) {
    Vec c(d);
    for (int j = 0; j < d; ++j) c[j] = (corner >> j) & 1 ? hi[j] : lo[j];
    if (!(domain.signed_distance(c) > 0.0)) return false;
  }
  return true;
}

}  // namespace

std::vector<TestFunction> default_test_basis(const Domain& domain, const Mat& gamma) {
  const int d = domain.dim();
  const double r = domain.inradius();
  const Vec c = domain.centroid();
  Vec sy(d);
  for (int j = 0; j < d; ++j) sy[j] = std::sqrt(0.5 * gamma(j, j));

  auto axis_vec = [d](int j, double v) {
    Vec e = Vec::Zero(d);
    e[std::min(j, d - 1)] = v;
    return e;
  };
  struct Spec {
    Vec xc;
    double xhw;
    Vec yc;
  };
  const Vec ones = Vec::Ones(d);
  std::vector<Spec> specs = {
      {c, 0.45 * r, Vec(0.5 * sy)},
      {Vec(c + axis_vec(0, 0.3 * r)), 0.35 * r, Vec(-0.6 * sy)},
      {Vec(c - axis_vec(0, 0.3 * r)), 0.35 * r, Vec(0.4 * sy + axis_vec(d - 1, 0.3 * sy[d - 1]))},
      {Vec(c + axis_vec(d - 1, 0.25 * r)), 0.3 * r, Vec(0.8 * sy.cwiseProduct(ones))},
      {Vec(c - 0.2 * r * ones / std::sqrt(double(d))), 0.3 * r, Vec(-0.3 * sy + axis_vec(0, 0.9 * sy[0]))},
      {c, 0.2 * r, Vec(0.2 * sy)},
  };
  std::vector<TestFunction> basis;
  int index = 0;
  for (auto& s : specs) {
    double hw = s.xhw;
    while (!box_strictly_inside(domain, Vec(s.xc.array() - hw), Vec(s.xc.array() + hw))) {
      hw *= 0.8;
      if (hw < 1e-3 * r) throw GeometryError("default_test_basis: cannot fit a support box");
    }
    basis.push_back(bump_product("f" + std::to_string(index++), s.xc, Vec::Constant(d, hw), s.yc,
                                 Vec(2.0 * sy)));
  }
  return basis;
}

double generator_apply(const CoefficientSet& cs, const Potential& potential, const TestFunction& f,
                       const Vec& x, const Vec& y) {
  if (!f.hess_x) throw Error("generator_apply: test function '" + f.id + "' has no Hessian callback");
  if (!f.grad_x || !f.grad_y) throw Error("generator_apply: test function '" + f.id + "' has no gradient callbacks");
  const Vec gx = f.grad_x(x, y);
  const Vec gy = f.grad_y(x, y);
  const Mat hx = f.hess_x(x, y);
  const Mat a = cs.diffusion_matrix(x);
  const Vec grad_v = potential.gradient(x);
  const Vec b = cs.drift_b(x).value;
  const double lx = 0.5 * (a * hx).trace() + (b - 0.5 * a * grad_v).dot(gx);
  return lx + y.dot(gx) - 0.5 * (cs.gamma() * grad_v).dot(gy);
}

ResidualResult stationarity_residual(const CoefficientSet& cs, const Potential& potential,
                                     const TestFunction& f, const StationaryMeasure& measure,
                                     const ResidualOptions& options) {
  const int d = cs.dim();
  if (!f.has_support)
    throw Error("stationarity_residual: test function '" + f.id + "' has no declared support");
  if (!box_strictly_inside(cs.domain(), f.x_lower, f.x_upper))
    throw GeometryError("stationarity_residual: support of '" + f.id +
                        "' is not strictly inside the domain");

  auto integrand = [&](const Vec& x, const Vec& y) {
    const double w = measure.x_density(x) * measure.y_density(y);
    if (w == 0.0) return 0.0;
    return generator_apply(cs, potential, f, x, y) * w;
  };

  ResidualResult out;
  quadrature::Point lo(2 * d), hi(2 * d);
  lo << f.x_lower, f.y_lower;
  hi << f.x_upper, f.y_upper;
  if (d <= 2) {
    const int nodes = options.nodes > 0 ? options.nodes : (d == 1 ? 24 : 12);
    const int panels = options.panels > 0 ? options.panels : (d == 1 ? 24 : 3);
    out.method = "gauss_legendre";
    out.value = quadrature::integrate_box(
        lo, hi,
        [&](const quadrature::Point& p) { return integrand(Vec(p.head(d)), Vec(p.tail(d))); },
        nodes, panels);
    return out;
  }
  out.method = "monte_carlo_antithetic";
  Rng rng = make_path_rng(options.mc_seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const quadrature::Point width = hi - lo;
  const double volume = width.prod();
  const long long pairs = std::max(2LL, options.mc_samples / 2);
  double mean = 0.0, m2 = 0.0;
  quadrature::Point u(2 * d);
  for (long long i = 0; i < pairs; ++i) {
    for (int j = 0; j < 2 * d; ++j) u[j] = unit(rng);
    const quadrature::Point p1 = lo.array() + u.array() * width.array();
    const quadrature::Point p2 = lo.array() + (1.0 - u.array()) * width.array();
    const double v = 0.5 * volume *
                     (integrand(Vec(p1.head(d)), Vec(p1.tail(d))) + integrand(Vec(p2.head(d)), Vec(p2.tail(d))));
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  out.value = mean;
  out.standard_error = std::sqrt(m2 / static_cast<double>(pairs - 1) / static_cast<double>(pairs));
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

Vec draw_x(const StationaryMeasure& sm, Rng& rng, long long& proposals) {
  const Domain& domain = sm.coefficients().domain();
  const int d = domain.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double bound = sm.x_density_bound();
  long long local = 0;
  Vec x(d);
  while (true) {
    ++local;
    ++proposals;
    for (int j = 0; j < d; ++j)
      x[j] = domain.bbox_lower()[j] + (domain.bbox_upper()[j] - domain.bbox_lower()[j]) * unit(rng);
    if (unit(rng) * bound < sm.x_density_unnormalized(x)) return x;
    if (local >= 100000) {
      throw NumericalError(
          "sample_stationary: rejection acceptance rate below 1e-4; use a better proposal");
    }
  }
}

}  // namespace

std::pair<Vec, Vec> sample_stationary_one(const StationaryMeasure& sm, Rng& rng) {
  long long proposals = 0;
  Vec x = draw_x(sm, rng, proposals);
  const Vec z = standard_normal(rng, sm.dim());
  Vec y = sm.coefficients().gamma_cholesky() * z / std::sqrt(2.0);
  return {x, y};
}

StationarySample sample_stationary(const StationaryMeasure& sm, std::size_t n, std::uint64_t seed) {
  StationarySample out;
  if (n == 0) return out;
  Rng rng = make_path_rng(seed, 0);
  out.x.reserve(n);
  out.y.reserve(n);
  long long proposals = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.x.push_back(draw_x(sm, rng, proposals));
    const Vec z = standard_normal(rng, sm.dim());
    out.y.push_back(sm.coefficients().gamma_cholesky() * z / std::sqrt(2.0));
    if (proposals > 10000 && static_cast<double>(i + 1) / static_cast<double>(proposals) < 1e-4)
      throw NumericalError("sample_stationary: rejection acceptance rate below 1e-4; use a better proposal");
  }
  return out;
}

InitialSampler stationary_initial_sampler(const StationaryMeasure& sm) {
  return [sm](Rng& rng) { return sample_stationary_one(sm, rng); };
}

}  // namespace inertdrift
