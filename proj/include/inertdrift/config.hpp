#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "inertdrift/analysis.hpp"
#include "inertdrift/coefficients.hpp"
#include "inertdrift/geometry.hpp"
#include "inertdrift/simulate.hpp"
#include "inertdrift/stationary.hpp"

namespace inertdrift {

struct DomainSpec {
  std::string kind;  ///< interval | ball | box | ellipsoid
  Vec lower, upper;  ///< interval, box
  Vec center;        ///< ball, ellipsoid
  double radius = 0.0;
  Vec semi_axes;
};

struct CoefficientSpec {
  std::string preset = "identity";  ///< identity | exp_density | anisotropic
  Vec diagonal;                     ///< anisotropic only
  Mat gamma;
  ConormalConvention convention = ConormalConvention::full;
  std::string inert_field = "gamma_normal";  ///< gamma_normal | scaled_conormal
  double a0 = 1.0;
};

struct PotentialSpec {
  bool enabled = false;
  int n = 1;
  RegularizationParams regularization{};
};

struct InitialSpec {
  std::string kind = "stationary";  ///< stationary | fixed
  Vec x, k;
};

struct ResidualSpec {
  double tolerance = 1e-5;
  ResidualOptions options{};
};

struct SweepSpec {
  std::vector<int> n_list{1, 2, 4, 8};
  double margin = 0.02;
};

/// Parsed run configuration. Every block is validated against `dimension`.
struct RunConfig {
  std::string config_id;
  int dimension = 1;
  DomainSpec domain;
  CoefficientSpec coefficients;
  PotentialSpec potential;
  SimConfig simulation;
  InitialSpec initial;
  std::vector<std::string> tests;
  ResidualSpec residual;
  SweepSpec sweep;
  std::filesystem::path output_directory;
  int histogram_bins = 20;
  bool strict = false;
  /// Canonical JSON echo of the parsed input, written to the manifest.
  std::string canonical_json;

  Domain build_domain() const;
  CoefficientSet build_coefficients() const;
  /// Requires `potential.enabled`.
  Potential build_potential() const;
  StationaryMeasure build_stationary() const;
};

/// Test names accepted in the `tests` list.
const std::vector<std::string>& known_tests();

/// Parses a JSON run configuration. Relative output directories resolve
/// against `output_root` (the INERTDRIFT_OUTPUT_ROOT variable, else ./runs).
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& output_root);
RunConfig load_run_config(const std::filesystem::path& path, const std::filesystem::path& output_root);

/// INERTDRIFT_OUTPUT_ROOT if set and non-empty, otherwise "runs".
std::filesystem::path default_output_root();

}  // namespace inertdrift
