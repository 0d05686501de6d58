#include "inertdrift/analysis.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "csv.hpp"

namespace inertdrift {

namespace {

void require_nonempty(const TrajectoryBatch& batch, const char* who) {
  if (batch.empty()) throw Error(std::string(who) + ": empty batch");
}

double mean_of(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  quadrature::CompensatedSum s;
  for (std::size_t i = begin; i < end; ++i) s.add(v[i]);
  return s.value() / static_cast<double>(end - begin);
}

double covariance_of(const std::vector<double>& a, const std::vector<double>& b, std::size_t begin,
                     std::size_t end) {
  const double ma = mean_of(a, begin, end);
  const double mb = mean_of(b, begin, end);
  quadrature::CompensatedSum s;
  for (std::size_t i = begin; i < end; ++i) s.add((a[i] - ma) * (b[i] - mb));
  return s.value() / static_cast<double>(end - begin - 1);
}

double correlation_of(const std::vector<double>& a, const std::vector<double>& b, std::size_t begin,
                      std::size_t end) {
  const double vab = covariance_of(a, b, begin, end);
  const double va = covariance_of(a, a, begin, end);
  const double vb = covariance_of(b, b, begin, end);
  if (va <= 0.0 || vb <= 0.0) return 0.0;
  return vab / std::sqrt(va * vb);
}

int effective_batches(std::size_t n, int batches) {
  if (batches < 2) throw Error("batch means: need at least two batches");
  if (n < 4) throw Error("batch means: need at least four samples");
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(batches), n / 2));
}

std::pair<std::size_t, std::size_t> batch_bounds(std::size_t n, int b, int batches) {
  return {n * static_cast<std::size_t>(b) / static_cast<std::size_t>(batches),
          n * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(batches)};
}

// Component check |estimate - target| <= sigmas * se, phrased as a standardized statistic.
TestReport standardized(std::string name, double estimate, double target, double se, double sigmas,
                        std::size_t n, double ess) {
  TestReport r;
  r.name = std::move(name);
  r.estimate = estimate;
  r.target = target;
  r.standard_error = se;
  r.sample_size = n;
  r.effective_sample_size = ess;
  r.threshold = sigmas;
  const double diff = std::abs(estimate - target);
  r.statistic = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  r.pass = r.statistic <= r.threshold;
  return r;
}

// Parent over components: statistic = max_i statistic_i / threshold_i, threshold 1.
void summarize(TestReport& parent) {
  parent.statistic = 0.0;
  parent.threshold = 1.0;
  for (const auto& c : parent.components) {
    const double ratio = c.threshold > 0.0 ? c.statistic / c.threshold : c.statistic;
    parent.statistic = std::max(parent.statistic, ratio);
    parent.inconclusive = parent.inconclusive || c.inconclusive;
  }
  parent.pass = parent.statistic <= parent.threshold;
}

double min_ess(const std::vector<std::vector<double>>& series, int batches) {
  double ess = std::numeric_limits<double>::infinity();
  for (const auto& s : series) ess = std::min(ess, batch_means(s, batches).effective_sample_size);
  return ess;
}

}  // namespace

BatchMeansResult batch_means(const std::vector<double>& values, int batches) {
  const std::size_t n = values.size();
  const int nb = effective_batches(n, batches);
  BatchMeansResult r;
  r.batches = nb;
  r.mean = mean_of(values, 0, n);
  const double naive_var = covariance_of(values, values, 0, n);
  quadrature::CompensatedSum ss;
  for (int b = 0; b < nb; ++b) {
    const auto [lo, hi] = batch_bounds(n, b, nb);
    const double m = mean_of(values, lo, hi);
    ss.add((m - r.mean) * (m - r.mean));
  }
  const double var_of_batch_means = ss.value() / (nb - 1);
  r.standard_error = std::sqrt(var_of_batch_means / nb);
  const double batch_size = static_cast<double>(n) / nb;
  if (var_of_batch_means > 0.0)
    r.effective_sample_size = std::min(static_cast<double>(n), n * naive_var / (batch_size * var_of_batch_means));
  else
    r.effective_sample_size = static_cast<double>(n);
  return r;
}

BatchStatistic batch_statistic(std::size_t n,
                               const std::function<double(std::size_t, std::size_t)>& stat,
                               int batches) {
  const int nb = effective_batches(n, batches);
  BatchStatistic r;
  r.batches = nb;
  r.estimate = stat(0, n);
  std::vector<double> per(nb);
  for (int b = 0; b < nb; ++b) {
    const auto [lo, hi] = batch_bounds(n, b, nb);
    per[b] = stat(lo, hi);
  }
  const double m = mean_of(per, 0, per.size());
  quadrature::CompensatedSum ss;
  for (double v : per) ss.add((v - m) * (v - m));
  r.standard_error = std::sqrt(ss.value() / (nb - 1) / nb);
  return r;
}

double kolmogorov_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("kolmogorov_critical_value: alpha must be in (0, 1)");
  auto tail = [](double x) {
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * x * x);
      s += (k % 2 == 1 ? 2.0 : -2.0) * term;
      if (term < 1e-18) break;
    }
    return s;
  };
  double lo = 0.3, hi = 5.0;  // tail(0.3) ~ 1, tail(5) ~ 0
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double chi_square_critical_value(double alpha, int dof) {
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

TestReport ks_uniformity(const TrajectoryBatch& batch, const StationaryMeasure& sm, int coordinate,
                         const AnalysisOptions& options) {
  require_nonempty(batch, "ks_uniformity");
  if (coordinate < 0 || coordinate >= batch.dim) throw Error("ks_uniformity: coordinate out of range");
  const std::vector<double> xs = batch.x_coordinate(coordinate);
  const std::size_t n = xs.size();
  const BatchMeansResult bm = batch_means(xs, options.batches);

  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = sm.x_marginal_cdf(coordinate, sorted[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }

  TestReport r;
  r.name = "ks_x" + std::to_string(coordinate + 1);
  r.statistic = d;
  r.sample_size = n;
  r.effective_sample_size = bm.effective_sample_size;
  r.threshold = kolmogorov_critical_value(options.alpha) / std::sqrt(bm.effective_sample_size);
  r.pass = r.statistic <= r.threshold;
  r.inconclusive = bm.effective_sample_size < options.min_effective_samples;
  if (r.inconclusive) r.detail = "effective sample size below " + csv::format_double(options.min_effective_samples);
  return r;
}

TestReport k_moment_tests(const TrajectoryBatch& batch, const StationaryMeasure& sm,
                          const AnalysisOptions& options) {
  require_nonempty(batch, "k_moment_tests");
  const int d = batch.dim;
  const Mat target = sm.y_covariance();
  std::vector<std::vector<double>> ks;
  for (int j = 0; j < d; ++j) ks.push_back(batch.k_coordinate(j));
  const std::size_t n = ks.front().size();
  const double ess = min_ess(ks, options.batches);

  TestReport r;
  r.name = "k_moments";
  r.sample_size = n;
  r.effective_sample_size = ess;
  for (int j = 0; j < d; ++j) {
    const BatchMeansResult bm = batch_means(ks[j], options.batches);
    r.components.push_back(standardized("mean_k" + std::to_string(j + 1), bm.mean, 0.0,
                                        bm.standard_error, options.moment_sigmas, n, bm.effective_sample_size));
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const BatchStatistic bs = batch_statistic(
          n, [&](std::size_t lo, std::size_t hi) { return covariance_of(ks[i], ks[j], lo, hi); },
          options.batches);
      r.components.push_back(standardized("cov_k" + std::to_string(i + 1) + std::to_string(j + 1),
                                          bs.estimate, target(i, j), bs.standard_error,
                                          options.moment_sigmas, n, ess));
    }
  }
  for (int j = 0; j < d; ++j) {
    const auto& v = ks[j];
    const BatchStatistic bs = batch_statistic(
        n,
        [&](std::size_t lo, std::size_t hi) {
          const double m = mean_of(v, lo, hi);
          quadrature::CompensatedSum s2, s4;
          for (std::size_t i = lo; i < hi; ++i) {
            const double c = (v[i] - m) * (v[i] - m);
            s2.add(c);
            s4.add(c * c);
          }
          const double cnt = static_cast<double>(hi - lo);
          const double m2 = s2.value() / cnt;
          return m2 > 0.0 ? (s4.value() / cnt) / (m2 * m2) : 0.0;
        },
        options.batches);
    r.components.push_back(standardized("kurtosis_k" + std::to_string(j + 1), bs.estimate, 3.0,
                                        bs.standard_error, options.kurtosis_sigmas, n, ess));
  }
  summarize(r);
  r.inconclusive = ess < options.min_effective_samples;
  return r;
}

TestReport independence_test(const TrajectoryBatch& batch, const AnalysisOptions& options) {
  require_nonempty(batch, "independence_test");
  const int d = batch.dim;
  std::vector<std::vector<double>> xs, ks;
  for (int j = 0; j < d; ++j) {
    xs.push_back(batch.x_coordinate(j));
    ks.push_back(batch.k_coordinate(j));
  }
  const std::size_t n = xs.front().size();

  TestReport r;
  r.name = "independence";
  r.sample_size = n;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const BatchStatistic bs = batch_statistic(
          n, [&](std::size_t lo, std::size_t hi) { return correlation_of(xs[i], ks[j], lo, hi); },
          options.batches);
      r.components.push_back(standardized("corr_x" + std::to_string(i + 1) + "_k" + std::to_string(j + 1),
                                          bs.estimate, 0.0, bs.standard_error,
                                          options.correlation_sigmas, n, 0.0));
    }
  }

  // 4x4 contingency table on empirical quartiles; the statistic is deflated by
  // the variance inflation n / ESS of the binned coordinates.
  auto quartiles = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return std::array<double, 3>{v[m / 4], v[m / 2], v[(3 * m) / 4]};
  };
  auto bin = [](const std::array<double, 3>& q, double v) {
    return static_cast<int>(std::upper_bound(q.begin(), q.end(), v) - q.begin());
  };
  const auto qx = quartiles(xs[0]);
  const auto qk = quartiles(ks[0]);
  std::array<std::array<double, 4>, 4> table{};
  std::array<double, 4> row{}, col{};
  for (std::size_t s = 0; s < n; ++s) {
    const int a = bin(qx, xs[0][s]);
    const int b = bin(qk, ks[0][s]);
    table[a][b] += 1.0;
    row[a] += 1.0;
    col[b] += 1.0;
  }
  double chi2 = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double expected = row[a] * col[b] / static_cast<double>(n);
      if (expected > 0.0) chi2 += (table[a][b] - expected) * (table[a][b] - expected) / expected;
    }
  std::vector<std::vector<double>> binned(2, std::vector<double>(n));
  for (std::size_t s = 0; s < n; ++s) {
    binned[0][s] = bin(qx, xs[0][s]);
    binned[1][s] = bin(qk, ks[0][s]);
  }
  const double ess = min_ess(binned, options.batches);
  const double inflation = std::max(1.0, static_cast<double>(n) / ess);
  TestReport chi;
  chi.name = "chi2_x1_k1";
  chi.statistic = chi2 / inflation;
  chi.estimate = chi2;
  chi.threshold = chi_square_critical_value(options.alpha, 9);
  chi.sample_size = n;
  chi.effective_sample_size = ess;
  chi.pass = chi.statistic <= chi.threshold;
  chi.detail = "raw statistic deflated by n/ESS = " + csv::format_double(inflation);
  r.components.push_back(chi);

  r.effective_sample_size = std::min(ess, min_ess(xs, options.batches));
  summarize(r);
  r.inconclusive = r.effective_sample_size < options.min_effective_samples;
  return r;
}

TestReport sector_uniformity(const TrajectoryBatch& batch, const Vec& center, int sectors,
                             const AnalysisOptions& options) {
  require_nonempty(batch, "sector_uniformity");
  if (batch.dim != 2) throw Error("sector_uniformity: needs a two-dimensional batch");
  if (sectors < 2) throw Error("sector_uniformity: need at least two sectors");
  const std::size_t n = batch.size();
  std::vector<double> counts(sectors, 0.0);
  std::vector<std::vector<double>> trig(2, std::vector<double>(n));
  for (std::size_t s = 0; s < n; ++s) {
    const Vec v = batch.snapshots[s].x - center;
    const double theta = std::atan2(v[1], v[0]) + std::numbers::pi;
    int k = static_cast<int>(theta / (2.0 * std::numbers::pi) * sectors);
    counts[std::clamp(k, 0, sectors - 1)] += 1.0;
    trig[0][s] = std::cos(theta);
    trig[1][s] = std::sin(theta);
  }
  const double expected = static_cast<double>(n) / sectors;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const double ess = min_ess(trig, options.batches);
  const double inflation = std::max(1.0, static_cast<double>(n) / ess);

  TestReport r;
  r.name = "sector_uniformity";
  r.estimate = chi2;
  r.statistic = chi2 / inflation;
  r.threshold = chi_square_critical_value(options.alpha, sectors - 1);
  r.sample_size = n;
  r.effective_sample_size = ess;
  r.pass = r.statistic <= r.threshold;
  r.inconclusive = ess < options.min_effective_samples;
  r.detail = "raw statistic deflated by n/ESS = " + csv::format_double(inflation);
  return r;
}

TestReport non_explosion_check(const TrajectoryBatch& batch, double max_ratio) {
  if (batch.paths.empty()) throw Error("non_explosion_check: batch has no path summaries");
  TestReport flags;
  flags.name = "flagged_paths";
  const auto& dg = batch.diagnostics;
  flags.statistic = dg.boundary_overflow + dg.reflect_failure + dg.weight_overflow;
  flags.threshold = 0.0;
  flags.sample_size = batch.paths.size();
  flags.pass = flags.statistic <= flags.threshold;
  flags.detail = "boundary_overflow " + std::to_string(dg.boundary_overflow) + "; reflect_failure " +
                 std::to_string(dg.reflect_failure) + "; weight_overflow " + std::to_string(dg.weight_overflow);

  double half = 0.0, full = 0.0;
  for (const auto& p : batch.paths) {
    if (p.status != PathStatus::ok) continue;
    half = std::max(half, p.max_abs_k_first_half);
    full = std::max(full, p.max_abs_k);
  }
  TestReport growth;
  growth.name = "max_abs_k_ratio";
  growth.estimate = full;
  growth.target = half;
  growth.statistic = half > 0.0 ? full / half : (full > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  growth.threshold = max_ratio;
  growth.sample_size = batch.paths.size();
  growth.pass = std::isfinite(full) && growth.statistic <= growth.threshold;

  TestReport r;
  r.name = "non_explosion";
  r.sample_size = batch.paths.size();
  r.components = {flags, growth};
  r.statistic = (flags.pass && growth.pass) ? 0.0 : 1.0;
  r.threshold = 0.0;
  r.pass = r.statistic <= r.threshold;
  return r;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error("wasserstein1: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double prev = std::min(a.front(), b.front());
  quadrature::CompensatedSum s;
  while (i < a.size() || j < b.size()) {
    double next;
    if (j == b.size() || (i < a.size() && a[i] <= b[j]))
      next = a[i];
    else
      next = b[j];
    s.add(std::abs(i / na - j / nb) * (next - prev));
    prev = next;
    while (i < a.size() && a[i] == next) ++i;
    while (j < b.size() && b[j] == next) ++j;
  }
  return s.value();
}

double sliced_wasserstein1(const std::vector<Vec>& a, const std::vector<Vec>& b, int projections,
                           std::uint64_t seed) {
  if (a.empty() || b.empty()) throw Error("sliced_wasserstein1: empty sample");
  const int d = static_cast<int>(a.front().size());
  auto project = [](const std::vector<Vec>& pts, const Vec& dir) {
    std::vector<double> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(p.dot(dir));
    return out;
  };
  if (d == 1) return wasserstein1(project(a, Vec::Ones(1)), project(b, Vec::Ones(1)));
  if (projections < 1) throw Error("sliced_wasserstein1: need at least one projection");
  Rng rng = make_path_rng(seed, 0);
  quadrature::CompensatedSum s;
  for (int p = 0; p < projections; ++p) {
    Vec dir = standard_normal(rng, d);
    dir.normalize();
    s.add(wasserstein1(project(a, dir), project(b, dir)));
  }
  return s.value() / projections;
}

SweepReport weak_convergence_sweep(const CoefficientSet& cs, const std::vector<int>& n_list,
                                   const SweepOptions& options) {
  if (n_list.size() < 2) throw ConfigError("sweep.n_list", "need at least two potential indices");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw ConfigError("sweep.n_list", "indices must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw ConfigError("sweep.n_list", "must be increasing");
  }
  const Domain& domain = cs.domain();
  auto positions = [](const TrajectoryBatch& b) {
    std::vector<Vec> out;
    out.reserve(b.size());
    for (const auto& s : b.snapshots) out.push_back(s.x);
    return out;
  };
  auto flagged = [](const TrajectoryBatch& b) {
    return b.diagnostics.boundary_overflow + b.diagnostics.reflect_failure + b.diagnostics.weight_overflow;
  };

  SweepReport out;
  out.n_list = n_list;

  StationaryOptions sopt;
  sopt.rule = options.rule;
  const StationaryMeasure reflected = StationaryMeasure::reflected(cs, sopt);
  SimConfig ref_cfg = options.sim;
  ref_cfg.family = Family::reflected;
  ref_cfg.initial.sampler = stationary_initial_sampler(reflected);
  ref_cfg.initial.description = "stationary";
  const TrajectoryBatch ref_a = run_ensemble(cs, ref_cfg);
  ref_cfg.seed = options.sim.seed ^ 0x5bd1e995ULL;
  const TrajectoryBatch ref_b = run_ensemble(cs, ref_cfg);
  if (ref_a.empty() || ref_b.empty()) throw NumericalError("weak_convergence_sweep: reference ensemble is empty");
  const std::vector<Vec> ref_x = positions(ref_a);
  out.noise_floor = sliced_wasserstein1(ref_x, positions(ref_b), options.projections);

  const double volume = quadrature::integrate_domain(domain, [](const Vec&) { return 1.0; }, options.rule);
  out.limit_mass = std::exp(-1.0) * volume;

  const RegularizedDistance delta(domain, options.regularization);
  int flagged_paths = flagged(ref_a) + flagged(ref_b);
  for (int n : n_list) {
    const Potential pot = Potential::regularized_vn(delta, n);
    out.masses.push_back(quadrature::integrate_domain(
        domain, [&](const Vec& x) { return pot.boltzmann_factor(x); }, options.rule));
    const StationaryMeasure sm = StationaryMeasure::gradient(cs, pot, sopt);
    SimConfig cfg = options.sim;
    cfg.family = Family::gradient;
    cfg.seed = options.sim.seed + 1000ULL * static_cast<std::uint64_t>(n);
    cfg.initial.sampler = stationary_initial_sampler(sm);
    cfg.initial.description = "stationary";
    const TrajectoryBatch batch = run_ensemble(cs, pot, cfg);
    flagged_paths += flagged(batch);
    if (batch.empty()) throw NumericalError("weak_convergence_sweep: ensemble for n = " + std::to_string(n) + " is empty");
    out.distances.push_back(sliced_wasserstein1(positions(batch), ref_x, options.projections));
  }

  TestReport& r = out.report;
  r.name = "weak_convergence";
  r.sample_size = ref_a.size();
  r.estimate = out.distances.back();
  r.target = out.distances.front();
  r.statistic = out.distances.back() - out.distances.front();
  r.threshold = -options.margin;
  r.standard_error = out.noise_floor;
  r.pass = r.statistic <= r.threshold;
  r.inconclusive = out.noise_floor > options.margin;
  std::ostringstream detail;
  detail << "distances";
  for (double v : out.distances) detail << ' ' << csv::format_double(v);
  detail << "; noise_floor " << csv::format_double(out.noise_floor);
  if (r.inconclusive) detail << "; noise floor exceeds margin, raise n_paths";
  if (flagged_paths > 0) detail << "; flagged paths " << flagged_paths;
  r.detail = detail.str();

  TestReport mass;
  mass.name = "boltzmann_mass_increasing";
  mass.sample_size = out.masses.size();
  // Largest decrease between consecutive indices; must be negative.
  mass.statistic = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < out.masses.size(); ++i)
    mass.statistic = std::max(mass.statistic, out.masses[i - 1] - out.masses[i]);
  mass.threshold = 0.0;
  mass.pass = mass.statistic < 0.0 && out.masses.back() <= out.limit_mass;
  mass.estimate = out.masses.back();
  mass.target = out.limit_mass;
  std::ostringstream md;
  md << "masses";
  for (double v : out.masses) md << ' ' << csv::format_double(v);
  md << "; limit " << csv::format_double(out.limit_mass);
  mass.detail = md.str();
  r.components.push_back(mass);
  return out;
}

namespace {

void write_report_rows(std::ostream& out, const TestReport& r, const std::string& prefix) {
  const std::string name = prefix.empty() ? r.name : prefix + "/" + r.name;
  std::string detail = r.detail;
  std::replace(detail.begin(), detail.end(), ',', ';');
  out << name << ',' << csv::format_double(r.statistic) << ',' << csv::format_double(r.threshold) << ','
      << r.sample_size << ',' << csv::format_double(r.effective_sample_size) << ','
      << csv::format_double(r.standard_error) << ',' << csv::format_double(r.estimate) << ','
      << csv::format_double(r.target) << ',' << (r.pass ? "true" : "false") << ','
      << (r.inconclusive ? "true" : "false") << ',' << detail << '\n';
  for (const auto& c : r.components) write_report_rows(out, c, name);
}

}  // namespace

void write_report_csv(std::ostream& out, const std::vector<TestReport>& reports) {
  out << "test,statistic,threshold,sample_size,effective_sample_size,standard_error,estimate,target,pass,"
         "inconclusive,detail\n";
  for (const auto& r : reports) write_report_rows(out, r, "");
}

}  // namespace inertdrift
