// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "inertdrift/analysis.hpp"
#include "inertdrift/skorokhod.hpp"
#include "inertdrift/stationary.hpp"

using namespace inertdrift;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Mat mat1(double a) { return Mat::Constant(1, 1, a); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Detail {
 public:
  template <typename T>
  Detail& operator()(const std::string& key, const T& value) {
    if (!first_) os_ << "; ";
    first_ = false;
    os_ << key << '=' << value;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  bool first_ = true;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const TestReport* component(const TestReport& r, const std::string& name) {
  for (const auto& c : r.components)
    if (c.name == name) return &c;
  return nullptr;
}

// Criterion 1's ensemble, shared with criterion 7.
std::optional<TrajectoryBatch> g_interval_batch;

const TrajectoryBatch& interval_ensemble(const CoefficientSet& cs, const StationaryMeasure& sm) {
  if (!g_interval_batch) {
    SimConfig cfg;
    cfg.dt_base = 1e-4;
    cfg.t_end = 50.0;
    cfg.burn_in = 10.0;
    cfg.n_paths = 200;
    cfg.seed = 20240601;
    cfg.snapshot_stride = 0.05;
    cfg.initial.sampler = stationary_initial_sampler(sm);
    cfg.initial.description = "stationary";
    g_interval_batch = run_ensemble(cs, cfg);
  }
  return *g_interval_batch;
}

// --------------------------------------------------------------------------

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), mat1(1.0));
  const auto sm = StationaryMeasure::reflected(cs);
  const TrajectoryBatch& batch = interval_ensemble(cs, sm);

  const TestReport ks = ks_uniformity(batch, sm, 0);
  const TestReport km = k_moment_tests(batch, sm);
  const TestReport ind = independence_test(batch);
  const double var_k = component(km, "cov_k11")->estimate;
  const double corr = component(ind, "corr_x1_k1")->estimate;
  const double elapsed = seconds_since(t0);

  const bool ks_ok = ks.pass && !ks.inconclusive;
  const bool var_ok = std::abs(var_k - 0.5) <= 0.05;
  const bool corr_ok = std::abs(corr) <= 0.02;
  const bool time_ok = elapsed <= 120.0;
  Detail d;
  d("ks", ks.statistic)("ks_threshold", ks.threshold)("ess", ks.effective_sample_size)("var_k", var_k)(
      "corr_xk", corr)("corr_se", component(ind, "corr_x1_k1")->standard_error)("snapshots", batch.size())(
      "seconds", elapsed);
  return {ks_ok && var_ok && corr_ok && time_ok, d.str()};
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  Mat gamma = Mat::Zero(2, 2);
  gamma(0, 0) = 2.0;
  gamma(1, 1) = 1.0;
  const auto cs = CoefficientSet::identity(Domain::ball(vec({0.0, 0.0}), 1.0), gamma);
  const auto sm = StationaryMeasure::reflected(cs);
  SimConfig cfg;
  cfg.dt_base = 1e-4;
  cfg.t_end = 60.0;
  cfg.burn_in = 12.0;
  cfg.n_paths = 100;
  cfg.seed = 7;
  cfg.snapshot_stride = 0.05;
  cfg.initial.sampler = stationary_initial_sampler(sm);
  const TrajectoryBatch batch = run_ensemble(cs, cfg);

  const TestReport km = k_moment_tests(batch, sm);
  const TestReport sectors = sector_uniformity(batch, vec({0.0, 0.0}), 8);
  bool cov_ok = true;
  Detail d;
  for (const char* name : {"cov_k11", "cov_k22", "cov_k12"}) {
    const TestReport* c = component(km, name);
    cov_ok = cov_ok && c->pass;
    d(name, c->estimate)(std::string(name) + "_se", c->standard_error);
  }
  const double elapsed = seconds_since(t0);
  d("sector_chi2", sectors.statistic)("sector_threshold", sectors.threshold)("seconds", elapsed);
  const bool sectors_ok = sectors.pass && !sectors.inconclusive;
  return {cov_ok && sectors_ok && elapsed <= 600.0, d.str()};
}

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    Domain domain;
    double tolerance;
  };
  const std::vector<Case> cases = {{Domain::interval(0.0, 1.0), 1e-5},
                                   {Domain::box(vec({0.0, 0.0}), vec({1.0, 1.0})), 1e-4}};
  bool ok = true;
  Detail d;
  for (const Case& c : cases) {
    const int dim = c.domain.dim();
    const auto cs = CoefficientSet::identity(c.domain, Mat::Identity(dim, dim));
    const Potential p = Potential::regularized_vn(RegularizedDistance(c.domain), 2);
    const auto sm = StationaryMeasure::gradient(cs, p);
    StationaryOptions perturbed;
    perturbed.potential_scale = 1.1;
    const auto sp = StationaryMeasure::gradient(cs, p, perturbed);
    const auto basis = default_test_basis(c.domain, cs.gamma());
    double worst = 0.0, power = 0.0;
    for (const auto& f : basis) {
      worst = std::max(worst, std::abs(stationarity_residual(cs, p, f, sm).value));
      power = std::max(power, std::abs(stationarity_residual(cs, p, f, sp).value));
    }
    ok = ok && basis.size() >= 5 && worst <= c.tolerance && power > 10 * c.tolerance;
    const std::string tag = "d" + std::to_string(dim);
    d(tag + "_basis", basis.size())(tag + "_max_residual", worst)(tag + "_perturbed", power)(tag + "_tol",
                                                                                             c.tolerance);
  }
  const double elapsed = seconds_since(t0);
  d("seconds", elapsed);
  return {ok && elapsed <= 60.0, d.str()};
}

Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const Domain half_line = Domain::interval(0.0, 1000.0);
  std::mt19937_64 rng(404);
  std::normal_distribution<double> z(0.0, 0.15);
  std::uniform_real_distribution<double> start(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    DrivingPath f;
    double x = start(rng);
    for (int i = 0; i <= 1000; ++i) {
      f.times.push_back(0.001 * i);
      f.values.push_back(vec({x}));
      x += z(rng);
    }
    const ConstrainedPath s = solve_skorokhod(half_line, f);
    double running = 0.0;
    for (std::size_t i = 0; i < f.times.size(); ++i) {
      running = std::max(running, -f.values[i][0]);
      worst = std::max({worst, std::abs(s.ell[i] - running), std::abs(s.g[i][0] - f.values[i][0] - running)});
    }
  }

  const Domain disc = Domain::ball(vec({0.0, 0.0}), 1.0);
  auto path = [](int steps) {
    DrivingPath f;
    for (int i = 0; i <= steps; ++i) {
      const double t = 2.0 * i / steps;
      f.times.push_back(t);
      f.values.push_back(vec({0.2 + 1.1 * std::sin(3 * t), 0.8 * std::sin(5 * t)}));
    }
    return f;
  };
  auto gap = [&](int steps) {
    const ConstrainedPath a = solve_skorokhod(disc, path(steps));
    const ConstrainedPath b = solve_skorokhod(disc, path(2 * steps));
    double e = 0.0;
    for (int i = 0; i <= steps; ++i) e = std::max(e, (a.g[i] - b.g[2 * i]).norm());
    return e;
  };
  const double e1 = gap(400), e2 = gap(800);
  const double order = std::log2(e1 / e2);
  const double elapsed = seconds_since(t0);
  Detail d;
  d("max_error", worst)("gap_h", e1)("gap_h2", e2)("order", order)("seconds", elapsed);
  return {worst <= 1e-12 && order >= 0.9 && elapsed <= 10.0, d.str()};
}

Outcome criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), mat1(1.0));
  SimConfig cfg;
  cfg.dt_base = 1e-4;
  cfg.t_end = 0.5;
  cfg.n_paths = 10000;
  cfg.seed = 55;
  cfg.snapshot_stride = 0.5;
  cfg.initial.x = vec({0.3});
  cfg.initial.k = vec({1.0});
  cfg.family = Family::reflected;
  const TrajectoryBatch direct = run_ensemble(cs, cfg);
  cfg.family = Family::reflected_reweighted;
  cfg.seed = 56;
  const TrajectoryBatch weighted = run_ensemble(cs, cfg);

  const std::vector<std::pair<std::string, std::function<double(double, double)>>> fs = {
      {"x", [](double x, double) { return x; }},
      {"cos_pi_x_gauss_k", [](double x, double k) { return std::cos(M_PI * x) * std::exp(-0.25 * k * k); }},
      {"tanh_k", [](double, double k) { return std::tanh(k); }},
  };
  auto mean_se = [](const std::vector<double>& v) {
    double s = 0, s2 = 0;
    for (double x : v) {
      s += x;
      s2 += x * x;
    }
    const double n = static_cast<double>(v.size());
    const double m = s / n;
    return std::pair{m, std::sqrt(std::max(0.0, s2 / n - m * m) / n)};
  };

  bool ok = direct.diagnostics.reflect_failure == 0 && weighted.diagnostics.weight_overflow == 0;
  Detail d;
  for (const auto& [name, f] : fs) {
    std::vector<double> a, b;
    for (const auto& p : direct.paths) a.push_back(f(p.final_state.x[0], p.final_state.k[0]));
    for (const auto& p : weighted.paths)
      b.push_back(std::exp(p.log_weight) * f(p.final_state.x[0], p.final_state.k[0]));
    const auto [ma, sa] = mean_se(a);
    const auto [mb, sb] = mean_se(b);
    const double z = std::abs(ma - mb) / std::hypot(sa, sb);
    ok = ok && z <= 3.0;
    d(name + "_direct", ma)(name + "_weighted", mb)(name + "_z", z);
  }
  std::vector<double> w;
  for (const auto& p : weighted.paths) w.push_back(std::exp(p.log_weight));
  const auto [mw, sw] = mean_se(w);
  const double zw = std::abs(mw - 1.0) / sw;
  ok = ok && zw <= 3.0;
  const double elapsed = seconds_since(t0);
  d("mean_weight", mw)("weight_z", zw)("seconds", elapsed);
  return {ok && elapsed <= 120.0, d.str()};
}

Outcome criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), mat1(1.0));
  SweepOptions opt;
  opt.sim.dt_base = 1e-4;
  opt.sim.t_end = 10.0;
  opt.sim.burn_in = 1.0;
  opt.sim.n_paths = 60;
  opt.sim.seed = 11;
  opt.sim.snapshot_stride = 0.05;
  opt.margin = 0.02;
  const SweepReport sr = weak_convergence_sweep(cs, {1, 2, 4, 8}, opt);
  bool mass_up = true;
  for (std::size_t i = 1; i < sr.masses.size(); ++i) mass_up = mass_up && sr.masses[i] > sr.masses[i - 1];
  const double drop = sr.distances.front() - sr.distances.back();
  const double elapsed = seconds_since(t0);
  Detail d;
  std::ostringstream dist, mass;
  for (std::size_t i = 0; i < sr.n_list.size(); ++i) {
    dist << (i ? "," : "") << sr.distances[i];
    mass << (i ? "," : "") << sr.masses[i];
  }
  d("distances", dist.str())("noise_floor", sr.noise_floor)("drop", drop)("masses", mass.str())(
      "limit_mass", sr.limit_mass)("seconds", elapsed);
  const bool ok = sr.report.pass && !sr.report.inconclusive && drop > sr.noise_floor && mass_up;
  return {ok && elapsed <= 600.0, d.str()};
}

Outcome criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), mat1(1.0));
  const auto sm = StationaryMeasure::reflected(cs);
  const TestReport r = non_explosion_check(interval_ensemble(cs, sm), 4.0);

  // The same domain under the gradient family, where "boundary overflow" can occur.
  const Potential p = Potential::regularized_vn(RegularizedDistance(cs.domain()), 2);
  const auto sg = StationaryMeasure::gradient(cs, p);
  SimConfig cfg;
  cfg.dt_base = 1e-4;
  cfg.t_end = 10.0;
  cfg.n_paths = 50;
  cfg.seed = 71;
  cfg.snapshot_stride = 0.1;
  cfg.family = Family::gradient;
  cfg.initial.sampler = stationary_initial_sampler(sg);
  const TestReport rg = non_explosion_check(run_ensemble(cs, p, cfg), 4.0);

  Detail d;
  d("reflected_flags", component(r, "flagged_paths")->statistic)(
      "reflected_max_k", component(r, "max_abs_k_ratio")->estimate)(
      "reflected_ratio", component(r, "max_abs_k_ratio")->statistic)(
      "gradient_flags", component(rg, "flagged_paths")->statistic)(
      "gradient_ratio", component(rg, "max_abs_k_ratio")->statistic)("seconds", seconds_since(t0));
  return {r.pass && rg.pass, d.str()};
}

Outcome criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(8);
  const std::vector<Domain> domains = {
      Domain::interval(0.0, 1.0),
      Domain::ball(vec({0.0, 0.0}), 1.0),
      Domain::ball(vec({0.0, 0.0, 0.0}), 1.0),
      Domain::box(vec({0.0, 0.0}), vec({1.0, 2.0})),
      Domain::box(vec({0.0, 0.0, 0.0}), vec({1.0, 1.0, 1.0})),
      Domain::ellipsoid(vec({0.0, 0.0}), vec({2.0, 1.0})),
  };
  auto interior = [&](const Domain& d) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
      Vec x(d.dim());
      for (int j = 0; j < d.dim(); ++j) x[j] = d.bbox_lower()[j] + u(rng) * (d.bbox_upper()[j] - d.bbox_lower()[j]);
      if (d.inside(x)) return x;
    }
  };
  long long sandwich_bad = 0, grad_bad = 0, vn_bad = 0;
  double worst_grad = 0.0, worst_vn = 0.0;
  for (const Domain& dom : domains) {
    const RegularizedDistance rd(dom);
    const Potential p = Potential::regularized_vn(rd, 2);
    const double h = 1e-5 * dom.diameter();
    for (int i = 0; i < 10000; ++i) {
      const Vec x = interior(dom);
      const double dist = dom.signed_distance(x);
      const double v = rd.value(x);
      if (v < rd.c_lower() * dist * (1 - 1e-12) || v > rd.c_upper() * dist * (1 + 1e-12)) ++sandwich_bad;
      if (i % 20 != 0 || dist < 0.25 * dom.inradius()) continue;
      Vec fd(dom.dim()), fv(dom.dim());
      for (int j = 0; j < dom.dim(); ++j) {
        Vec e = Vec::Zero(dom.dim());
        e[j] = h;
        fd[j] = (rd.value(x + e) - rd.value(x - e)) / (2 * h);
        fv[j] = (p.value(x + e) - p.value(x - e)) / (2 * h);
      }
      const Vec g = rd.gradient(x), gv = p.gradient(x);
      const double eg = (g - fd).norm() / std::max(1.0, g.norm());
      const double ev = (gv - fv).norm() / std::max(1.0, gv.norm());
      worst_grad = std::max(worst_grad, eg);
      worst_vn = std::max(worst_vn, ev);
      grad_bad += eg > 1e-6;
      vn_bad += ev > 1e-6;
    }
  }

  // Local time monotone and flat off the boundary, on Skorokhod solves and simulated paths.
  long long lt_bad = 0, flat_bad = 0, k_bad = 0;
  const Domain disc = Domain::ball(vec({0.0, 0.0}), 1.0);
  std::normal_distribution<double> z(0.0, 0.04);  // increments stay below the 0.25 guard
  for (int trial = 0; trial < 50; ++trial) {
    DrivingPath f;
    Vec x = vec({0.0, 0.0});
    for (int i = 0; i <= 400; ++i) {
      f.times.push_back(0.01 * i);
      f.values.push_back(x);
      x += vec({z(rng) + 0.02, z(rng)});
    }
    const ConstrainedPath s = solve_skorokhod(disc, f);
    for (std::size_t i = 1; i < s.ell.size(); ++i) {
      lt_bad += s.ell[i] < s.ell[i - 1];
      flat_bad += s.ell[i] > s.ell[i - 1] && std::abs(disc.signed_distance(s.g[i])) > disc.tol_bd();
    }
  }
  Mat gamma = Mat::Identity(2, 2);
  gamma(0, 0) = 2.0;
  const auto cs = CoefficientSet::identity(disc, gamma);
  SimConfig cfg;
  cfg.dt_base = 1e-3;
  cfg.t_end = 5.0;
  cfg.n_paths = 8;
  cfg.seed = 88;
  cfg.initial.x = vec({0.0, 0.0});
  cfg.initial.k = vec({0.0, 0.0});
  const TrajectoryBatch batch = run_ensemble(cs, cfg);
  for (std::size_t i = 1; i < batch.size(); ++i) {
    const Snapshot& s = batch.snapshots[i];
    const Snapshot& q = batch.snapshots[i - 1];
    if (s.path_id != q.path_id) continue;
    lt_bad += s.ell < q.ell;
    k_bad += s.ell == q.ell && s.k != q.k;
    flat_bad += !disc.in_closure(s.x);
  }

  std::ostringstream a, b;
  write_batch_csv(a, batch);
  cfg.n_threads = 2;
  write_batch_csv(b, run_ensemble(cs, cfg));
  const bool deterministic = a.str() == b.str();

  Detail d;
  d("sandwich_violations", sandwich_bad)("delta_grad_worst", worst_grad)("vn_grad_worst", worst_vn)(
      "local_time_decreases", lt_bad)("flat_off_boundary_violations", flat_bad)("k_changes_off_contact", k_bad)(
      "deterministic", deterministic ? "yes" : "no")("seconds", seconds_since(t0));
  const bool ok = sandwich_bad == 0 && grad_bad == 0 && vn_bad == 0 && lt_bad == 0 && flat_bad == 0 &&
                  k_bad == 0 && deterministic;
  return {ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"product-form stationarity, 1D interval", criterion1},
      {"anisotropic Gamma on the disc", criterion2},
      {"generator orthogonality", criterion3},
      {"Skorokhod oracle and refinement order", criterion4},
      {"Girsanov cross-check", criterion5},
      {"weak-convergence sweep", criterion6},
      {"non-explosion proxy", criterion7},
      {"property suites", criterion8},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.count(number)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << "criterion " << number << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first
              << "  [" << o.detail << "]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
