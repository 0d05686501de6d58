#pragma once

#include <functional>
#include <optional>
#include <string>

#include "inertdrift/geometry.hpp"
#include "inertdrift/types.hpp"

namespace inertdrift {

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;
using MatrixField = std::function<Mat(const Vec&)>;

/// u = A n / 2 (half) or u = A n (full).
enum class ConormalConvention { half, full };

const char* to_string(ConormalConvention c);

/// Boundary field v driving the inert drift, dK = v(X) dL.
struct InertField {
  enum class Kind { gamma_normal, scaled_conormal, custom };
  Kind kind = Kind::gamma_normal;
  double a0 = 1.0;      ///< scaled_conormal: v = a0 * u
  VectorField custom;   ///< custom: bounded field on the boundary

  static InertField gamma_normal() { return {}; }
  static InertField scaled_conormal(double a0) { return {Kind::scaled_conormal, a0, {}}; }
  static InertField user(VectorField v) { return {Kind::custom, 1.0, std::move(v)}; }
};

const char* to_string(InertField::Kind k);

/// b(x) together with whether a one-sided stencil had to be used.
struct DriftVector {
  Vec value;
  bool one_sided_stencil = false;
};

struct CoefficientOptions {
  /// Analytic drift b(x); when empty, central differences are used.
  VectorField drift;
  /// Finite-difference step as a fraction of the domain diameter.
  double fd_step_fraction = 1e-5;
  ConormalConvention convention = ConormalConvention::full;
  InertField inert_field;
  /// Points per axis of the validation grid for A and rho.
  int validation_grid = 11;
};

/// Diffusion data (A, sigma, rho, b) and inert-drift data (Gamma, v) on a domain.
///
/// sigma is the symmetric positive square root of A. Gamma is validated as
/// symmetric positive definite; A's eigenvalues and rho's range are sampled on a
/// grid over the domain at construction.
class CoefficientSet {
 public:
  CoefficientSet(Domain domain, MatrixField diffusion, ScalarField density, const Mat& gamma,
                 CoefficientOptions options = {});

  /// sigma = I, rho = 1.
  static CoefficientSet identity(Domain domain, const Mat& gamma, CoefficientOptions options = {});
  /// sigma = I, rho(x) = exp(x_1).
  static CoefficientSet exp_density(Domain domain, const Mat& gamma,
                                    CoefficientOptions options = {});
  /// Constant A = diag(diagonal), rho = 1.
  static CoefficientSet anisotropic(Domain domain, const Vec& diagonal, const Mat& gamma,
                                    CoefficientOptions options = {});

  int dim() const noexcept { return domain_.dim(); }
  const Domain& domain() const noexcept { return domain_; }
  const std::string& preset() const noexcept { return preset_; }

  Mat diffusion_matrix(const Vec& x) const;  ///< A(x)
  Mat sigma(const Vec& x) const;             ///< A(x)^{1/2}
  Mat sigma_inverse(const Vec& x) const;     ///< A(x)^{-1/2}
  double density(const Vec& x) const { return rho_(x); }

  /// b_k = (1 / 2 rho) sum_i d_i (rho a_ik).
  DriftVector drift_b(const Vec& x) const;
  /// Conormal u at a boundary point per the requested convention.
  Vec conormal_u(const Vec& x_boundary, ConormalConvention convention) const;
  Vec conormal_u(const Vec& x_boundary) const { return conormal_u(x_boundary, options_.convention); }
  /// Conormal at the boundary projection of x, without the boundary check.
  Vec conormal_at_projection(const Vec& x) const;
  /// v at a boundary point.
  Vec inert_field(const Vec& x_boundary) const;

  const Mat& gamma() const noexcept { return gamma_; }
  /// Lower-triangular Cholesky factor of Gamma.
  const Mat& gamma_cholesky() const noexcept { return gamma_chol_; }
  Vec gamma_solve(const Vec& y) const;

  double lambda_min() const noexcept { return lambda_min_; }
  double lambda_max() const noexcept { return lambda_max_; }
  double rho_min() const noexcept { return rho_min_; }
  double rho_max() const noexcept { return rho_max_; }
  bool constant_diffusion() const noexcept { return constant_; }
  const CoefficientOptions& options() const noexcept { return options_; }
  ConormalConvention convention() const noexcept { return options_.convention; }

 private:
  void validate();

  Domain domain_;
  MatrixField a_;
  ScalarField rho_;
  Mat gamma_;
  Mat gamma_chol_;
  CoefficientOptions options_;
  std::string preset_ = "custom";
  bool constant_ = false;
  Mat const_sigma_, const_sigma_inv_;
  double lambda_min_ = 0, lambda_max_ = 0, rho_min_ = 0, rho_max_ = 0;
};

/// Potential V on D with gradient: either the regularized family
/// V_n = exp(1 / (n delta)) or a user-supplied pair.
class Potential {
 public:
  enum class Kind { regularized_vn, user_supplied };

  static Potential regularized_vn(RegularizedDistance delta, int n);
  static Potential user_supplied(Domain domain, ScalarField value, VectorField gradient);

  Kind kind() const noexcept { return kind_; }
  int n() const noexcept { return n_; }
  const Domain& domain() const noexcept { return domain_; }
  const std::optional<RegularizedDistance>& distance() const noexcept { return delta_; }

  /// Throws NumericalError("potential overflow") when V is not representable.
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  std::pair<double, Vec> value_and_gradient(const Vec& x) const;

  /// exp(-V(x)); zero outside D or where V overflows.
  double boltzmann_factor(const Vec& x) const;
  /// True when x is in D and V, grad V are finite there.
  bool finite_at(const Vec& x) const;

  /// delta below which evaluation is refused: max(1e-12 diam, 1 / (650 n)).
  double delta_floor() const noexcept { return delta_floor_; }

 private:
  Potential() = default;

  Kind kind_ = Kind::user_supplied;
  Domain domain_ = Domain::interval(0.0, 1.0);
  std::optional<RegularizedDistance> delta_;
  int n_ = 0;
  ScalarField value_;
  VectorField gradient_;
  double delta_floor_ = 0.0;
};

}  // namespace inertdrift
