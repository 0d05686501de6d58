#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "inertdrift/coefficients.hpp"
#include "inertdrift/skorokhod.hpp"

namespace inertdrift {

using Rng = std::mt19937_64;

/// Per-path random stream: mt19937_64 seeded from
/// seed_seq{lo32(seed), hi32(seed), lo32(path), hi32(path)}.
Rng make_path_rng(std::uint64_t root_seed, std::uint64_t path_id);

/// Fills a d-vector of independent standard gaussians.
Vec standard_normal(Rng& rng, int d);

/// Position, inert drift, accumulated boundary local time, clock.
struct SystemState {
  Vec x;
  Vec k;
  double ell = 0.0;
  double t = 0.0;
};

/// Trajectory hit the potential wall even after maximal step subdivision.
class BoundaryOverflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct StepOutcome {
  SystemState state;
  double dl = 0.0;       ///< local time added on this step
  int substeps = 1;
  bool one_sided_drift = false;
};

struct GradientStepOptions {
  bool adaptive = true;
  /// Bound on |deterministic drift| * dt_sub; <= 0 means 0.05 * inradius.
  double h_max = 0.0;
  /// Halvings of a rejected sub-step before the path is declared overflowed.
  int max_halvings = 40;
};

/// Euler-Maruyama step of the gradient system
///   dX = sigma dB + (b - A grad V / 2 + K) dt,   dK = -Gamma grad V / 2 dt.
///
/// The deterministic displacement per sub-step is capped at h_max. The first
/// sub-step uses `noise`; later ones draw fresh gaussians from `rng`. A proposal
/// outside the region where V is finite is retried with half the sub-step.
StepOutcome step_gradient(const CoefficientSet& cs, const Potential& potential,
                          const SystemState& s, double dt, const Vec& noise, Rng& rng,
                          const GradientStepOptions& options = {});

/// Reflected step with inert drift:
///   free = sigma sqrt(dt) noise + (b + K) dt, reflect along the conormal,
///   L += dl, K += v(contact) dl.
/// With `k_in_drift = false`, K is carried as the local-time functional only
/// (the driftless reference process of the Girsanov construction).
StepOutcome step_reflected(const CoefficientSet& cs, const SystemState& s, double dt,
                           const Vec& noise, bool k_in_drift = true);

/// Running log M_t of the exponential martingale that adds drift K.
struct GirsanovWeight {
  double log_weight = 0.0;
  bool overflow = false;
  double weight() const { return std::exp(log_weight); }
};

/// log M += (sigma^{-1}(x) k) . dB - |sigma^{-1}(x) k|^2 dt / 2, evaluated at the
/// pre-step state.
GirsanovWeight girsanov_weight_step(const CoefficientSet& cs, const SystemState& s,
                                    const GirsanovWeight& w, const Vec& dB, double dt);

enum class Family { reflected, reflected_reweighted, gradient };

const char* to_string(Family f);

/// Draws an initial (x, k) from the path's random stream.
using InitialSampler = std::function<std::pair<Vec, Vec>(Rng&)>;

struct InitialCondition {
  Vec x;
  Vec k;
  /// When set, overrides x and k.
  InitialSampler sampler;
  std::string description = "fixed";
};

struct SimConfig {
  double dt_base = 1e-4;
  double t_end = 1.0;
  double burn_in = 0.0;
  int n_paths = 1;
  std::uint64_t seed = 0;
  /// Time between recorded snapshots after burn-in; <= 0 records every step.
  double snapshot_stride = 0.0;
  Family family = Family::reflected;
  GradientStepOptions gradient;
  InitialCondition initial;
  int n_threads = 1;

  void validate() const;
  long long total_steps() const;
  long long burn_in_steps() const;
  long long stride_steps() const;
};

struct Snapshot {
  int path_id = 0;
  double t = 0.0;
  Vec x;
  Vec k;
  double ell = 0.0;
  double log_weight = 0.0;
};

enum class PathStatus { ok, boundary_overflow, reflect_failure, weight_overflow };

const char* to_string(PathStatus s);

struct PathSummary {
  int path_id = 0;
  PathStatus status = PathStatus::ok;
  std::string message;
  SystemState initial;
  SystemState final_state;
  double log_weight = 0.0;
  double max_abs_k_first_half = 0.0;  ///< max |K| over [0, t_end / 2]
  double max_abs_k = 0.0;             ///< max |K| over [0, t_end]
  long long substeps = 0;
  long long contact_steps = 0;
  bool one_sided_drift = false;
};

struct BatchDiagnostics {
  int boundary_overflow = 0;
  int reflect_failure = 0;
  int weight_overflow = 0;
  int one_sided_drift_paths = 0;
  long long substeps = 0;
};

/// Ensemble output. Snapshots are ordered by path, then time; paths that were
/// flagged are counted in `diagnostics` and contribute no snapshots.
struct TrajectoryBatch {
  int dim = 1;
  Family family = Family::reflected;
  SimConfig config;
  std::vector<Snapshot> snapshots;
  std::vector<PathSummary> paths;
  BatchDiagnostics diagnostics;

  std::vector<double> x_coordinate(int j) const;
  std::vector<double> k_coordinate(int j) const;
  std::size_t size() const noexcept { return snapshots.size(); }
  bool empty() const noexcept { return snapshots.empty(); }

  /// Batch of independent samples, one snapshot per sample with path_id = index.
  static TrajectoryBatch from_samples(const std::vector<Vec>& xs, const std::vector<Vec>& ks);
};

/// Reflected or reweighted ensemble on cs.domain().
TrajectoryBatch run_ensemble(const CoefficientSet& cs, const SimConfig& cfg);
/// Gradient-family ensemble with potential V.
TrajectoryBatch run_ensemble(const CoefficientSet& cs, const Potential& potential,
                             const SimConfig& cfg);

/// CSV `path_id,t,x1..xd,k1..kd,ell` (plus `log_weight` for the reweighted family).
void write_batch_csv(std::ostream& out, const TrajectoryBatch& batch);
TrajectoryBatch read_batch_csv(std::istream& in);

}  // namespace inertdrift
