#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "inertdrift/coefficients.hpp"
#include "inertdrift/quadrature.hpp"
#include "inertdrift/simulate.hpp"

namespace inertdrift {

struct StationaryOptions {
  quadrature::DomainRule rule{};
  /// Grid points per coordinate for the tabulated x-marginal CDFs.
  int cdf_points = 1025;
  /// x-density proportional to rho * exp(-scale * V); scale != 1 gives the
  /// perturbed measures used for power checks.
  double potential_scale = 1.0;
};

/// Product measure pi(dx, dy) = c_x p(x) dx * c_y exp(-(Gamma^{-1} y, y)) dy with
/// p = rho (reflected case) or p = rho exp(-V) (gradient case).
///
/// c_x is computed by quadrature over D; c_y = (det(pi Gamma))^{-1/2} in closed
/// form. The y-marginal is the centered gaussian with covariance Gamma / 2.
class StationaryMeasure {
 public:
  static StationaryMeasure reflected(const CoefficientSet& cs, StationaryOptions options = {});
  static StationaryMeasure gradient(const CoefficientSet& cs, const Potential& potential,
                                    StationaryOptions options = {});

  int dim() const noexcept { return cs_.dim(); }
  bool is_gradient() const noexcept { return potential_.has_value(); }
  const CoefficientSet& coefficients() const noexcept { return cs_; }
  const std::optional<Potential>& potential() const noexcept { return potential_; }
  const StationaryOptions& options() const noexcept { return options_; }

  double x_density_unnormalized(const Vec& x) const;
  double x_density(const Vec& x) const { return c_x_ * x_density_unnormalized(x); }
  double y_density(const Vec& y) const;
  double density(const Vec& x, const Vec& y) const { return x_density(x) * y_density(y); }

  double x_normalizer() const noexcept { return c_x_; }
  double y_normalizer() const noexcept { return c_y_; }
  Mat y_covariance() const { return 0.5 * cs_.gamma(); }
  const Vec& x_mean() const noexcept { return x_mean_; }
  /// Upper bound on the unnormalized x-density used by rejection sampling.
  double x_density_bound() const noexcept { return density_bound_; }

  /// P(X_j <= v) under the x-marginal, interpolated from a quadrature table.
  double x_marginal_cdf(int j, double v) const;
  /// Marginal density of X_j at v (derivative of the tabulated CDF).
  double x_marginal_density(int j, double v) const;

 private:
  StationaryMeasure(CoefficientSet cs, std::optional<Potential> potential, StationaryOptions options);

  CoefficientSet cs_;
  std::optional<Potential> potential_;
  StationaryOptions options_;
  double c_x_ = 1.0;
  double c_y_ = 1.0;
  Vec x_mean_;
  double density_bound_ = 1.0;
  std::vector<std::vector<double>> cdf_grid_;
  std::vector<std::vector<double>> cdf_values_;
  // Monotone cubic through the table.
  std::vector<std::function<double(double)>> cdf_interp_;
};

/// Test function for the generator with analytic derivatives and an optional
/// support box (required by the stationarity residual).
struct TestFunction {
  std::string id;
  std::function<double(const Vec& x, const Vec& y)> value;
  std::function<Vec(const Vec& x, const Vec& y)> grad_x;
  std::function<Vec(const Vec& x, const Vec& y)> grad_y;
  std::function<Mat(const Vec& x, const Vec& y)> hess_x;
  bool has_support = false;
  Vec x_lower, x_upper, y_lower, y_upper;
};

/// prod_j bump((x_j - cx_j) / hx_j) * prod_j bump((y_j - cy_j) / hy_j) with
/// bump(s) = (1 - s^2)^3 on |s| < 1. C^2 with compact support.
TestFunction bump_product(std::string id, const Vec& x_center, const Vec& x_halfwidth,
                          const Vec& y_center, const Vec& y_halfwidth);

/// At least five bump products supported strictly inside D, with y-supports
/// scaled to Gamma and placed off-center so no term vanishes by symmetry.
std::vector<TestFunction> default_test_basis(const Domain& domain, const Mat& gamma);

/// G f = L_x f + y . grad_x f - (Gamma grad V / 2) . grad_y f where
/// L_x f = tr(A hess_x f) / 2 + (b - A grad V / 2) . grad_x f.
double generator_apply(const CoefficientSet& cs, const Potential& potential, const TestFunction& f,
                       const Vec& x, const Vec& y);

struct ResidualOptions {
  /// Gauss-Legendre nodes and panels per axis of the (x, y) support box;
  /// <= 0 picks 24 x 24 for d = 1 and 12 x 3 for d = 2. The regularized
  /// distance is only C^3 across its cap boundary, so convergence there is
  /// algebraic and the one-dimensional rule is deliberately fine.
  int nodes = 0;
  int panels = 0;
  long long mc_samples = 1 << 22;  ///< used when d >= 3
  std::uint64_t mc_seed = 17;
};

struct ResidualResult {
  double value = 0.0;
  double standard_error = 0.0;  ///< zero for the deterministic tensor rule
  std::string method;
};

/// int G f d(pi) over the support of f, with pi taken from `measure`
/// (normally StationaryMeasure::gradient of the same coefficients and potential).
ResidualResult stationarity_residual(const CoefficientSet& cs, const Potential& potential,
                                     const TestFunction& f, const StationaryMeasure& measure,
                                     const ResidualOptions& options = {});

struct StationarySample {
  std::vector<Vec> x;
  std::vector<Vec> y;
};

/// x by rejection from the bounding box, y = L z / sqrt(2) with L L^T = Gamma.
StationarySample sample_stationary(const StationaryMeasure& sm, std::size_t n, std::uint64_t seed);
/// One draw from the stationary law using the caller's stream.
std::pair<Vec, Vec> sample_stationary_one(const StationaryMeasure& sm, Rng& rng);
/// Sampler usable as an ensemble initial condition.
InitialSampler stationary_initial_sampler(const StationaryMeasure& sm);

}  // namespace inertdrift
