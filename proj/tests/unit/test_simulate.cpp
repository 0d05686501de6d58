#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "inertdrift/simulate.hpp"
#include "inertdrift/stationary.hpp"
#include "support.hpp"

using namespace inertdrift;
using testing::vec;

namespace {

Potential left_vn() {
  return Potential::regularized_vn(
      RegularizedDistance::custom(
          Domain::interval(0.0, 1.0), [](const Vec& x) { return x[0]; },
          [](const Vec&) { return testing::vec({1.0}); }, 1.0, 1e6),
      1);
}

SystemState state(const Vec& x, const Vec& k) { return {x, k, 0.0, 0.0}; }

std::string csv_of(const TrajectoryBatch& b) {
  std::ostringstream os;
  write_batch_csv(os, b);
  return os.str();
}

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("per-path streams are reproducible and distinct") {
    Rng a = make_path_rng(42, 3), b = make_path_rng(42, 3), c = make_path_rng(42, 4), d = make_path_rng(43, 3);
    const auto va = a(), vb = b(), vc = c(), vd = d();
    CHECK(va == vb);
    CHECK(va != vc);
    CHECK(va != vd);
  }

  TEST_CASE("pure Brownian increment where the potential is flat") {
    const Domain iv = Domain::interval(0.0, 1.0);
    const auto cs = CoefficientSet::identity(iv, testing::mat1(1.0));
    const Potential flat = Potential::user_supplied(iv, [](const Vec&) { return 0.0; },
                                                    [](const Vec&) { return testing::vec({0.0}); });
    Rng rng(1);
    const StepOutcome o = step_gradient(cs, flat, state(vec({0.5}), vec({0.0})), 1e-4, vec({1.3}), rng);
    CHECK(o.state.x[0] == doctest::Approx(0.5 + 0.01 * 1.3).epsilon(1e-15));
    CHECK(o.state.k[0] == 0.0);
    CHECK(o.substeps == 1);
  }

  TEST_CASE("gradient step hand arithmetic") {
    const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), testing::mat1(1.0));
    Rng rng(1);
    const StepOutcome o = step_gradient(cs, left_vn(), state(vec({0.5}), vec({0.0})), 1e-4, vec({0.0}), rng);
    const double shift = 0.5 * 4.0 * std::exp(2.0) * 1e-4;
    CHECK(o.state.x[0] == doctest::Approx(0.5 + shift).epsilon(1e-14));
    CHECK(o.state.k[0] == doctest::Approx(shift).epsilon(1e-14));
    CHECK(o.state.x[0] == doctest::Approx(0.50147781).epsilon(1e-8));
    CHECK(o.state.k[0] == doctest::Approx(0.00147781).epsilon(1e-5));
  }

  TEST_CASE("two half steps against one full step") {
    const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), testing::mat1(1.0));
    const Potential p = Potential::regularized_vn(RegularizedDistance(Domain::interval(0.0, 1.0)), 2);
    GradientStepOptions opt;
    opt.adaptive = false;
    Rng rng(1);
    const Vec zero = vec({0.0});
    auto gap = [&](double dt) {
      const SystemState s0 = state(vec({0.35}), vec({0.3}));
      const SystemState full = step_gradient(cs, p, s0, dt, zero, rng, opt).state;
      SystemState half = step_gradient(cs, p, s0, dt / 2, zero, rng, opt).state;
      half = step_gradient(cs, p, half, dt / 2, zero, rng, opt).state;
      return std::hypot(full.x[0] - half.x[0], full.k[0] - half.k[0]);
    };
    const double order = std::log2(gap(1e-3) / gap(5e-4));
    MESSAGE("local order ", order);
    CHECK(order >= 1.9);
  }

  TEST_CASE("gradient step subdivides stiff drift") {
    const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), testing::mat1(1.0));
    const Potential p = Potential::regularized_vn(RegularizedDistance(Domain::interval(0.0, 1.0)), 1);
    Rng rng(3);
    const StepOutcome o = step_gradient(cs, p, state(vec({0.05}), vec({0.0})), 1e-3, vec({0.0}), rng);
    CHECK(o.substeps > 1);
    CHECK(p.finite_at(o.state.x));
    CHECK(o.state.x[0] > 0.05);
  }

  TEST_CASE("gradient step from outside the finite region overflows") {
    const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), testing::mat1(1.0));
    const Potential p = Potential::regularized_vn(RegularizedDistance(Domain::interval(0.0, 1.0)), 1);
    Rng rng(3);
    CHECK_THROWS_AS(step_gradient(cs, p, state(vec({1e-5}), vec({0.0})), 1e-3, vec({0.0}), rng),
                    BoundaryOverflow);
  }

  TEST_CASE("reflected step without contact leaves k and ell") {
    const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), testing::mat1(1.0));
    const StepOutcome o = step_reflected(cs, state(vec({0.5}), vec({0.7})), 1e-2, vec({0.4}));
    CHECK(o.dl == 0.0);
    CHECK(o.state.k[0] == 0.7);
    CHECK(o.state.x[0] == doctest::Approx(0.5 + 0.04 + 0.007));
  }

  TEST_CASE("reflected step hand arithmetic") {
    const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), testing::mat1(1.0));
    const StepOutcome o = step_reflected(cs, state(vec({0.05}), vec({0.0})), 1e-2, vec({-1.0}));
    CHECK(o.dl == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(o.state.x[0] == 0.0);
    CHECK(o.state.k[0] == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(o.state.ell == doctest::Approx(0.05).epsilon(1e-14));
  }

  TEST_CASE("increment past the guard is split, not failed") {
    const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), testing::mat1(1.0));
    // free increment -0.3 against a guard of 0.125
    const StepOutcome o = step_reflected(cs, state(vec({0.1}), vec({0.0})), 1e-2, vec({-3.0}));
    CHECK(o.substeps > 1);
    CHECK(o.state.x[0] == 0.0);
    CHECK(o.dl == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(o.state.k[0] == doctest::Approx(0.2).epsilon(1e-12));
  }

  TEST_CASE("A = 2I halves dl under the full conormal") {
    const Domain iv = Domain::interval(0.0, 1.0);
    // noise chosen so that the free increment is again -0.1
    const Vec noise = vec({-1.0 / std::sqrt(2.0)});
    CoefficientOptions full;
    const auto cs = CoefficientSet::anisotropic(iv, vec({2.0}), testing::mat1(1.0), full);
    const StepOutcome o = step_reflected(cs, state(vec({0.05}), vec({0.0})), 1e-2, noise);
    CHECK(o.dl == doctest::Approx(0.025).epsilon(1e-12));
    CHECK(o.state.x[0] == 0.0);
    CHECK(o.state.k[0] == doctest::Approx(0.025).epsilon(1e-12));

    CoefficientOptions half;
    half.convention = ConormalConvention::half;
    const auto ch = CoefficientSet::anisotropic(iv, vec({2.0}), testing::mat1(1.0), half);
    const StepOutcome oh = step_reflected(ch, state(vec({0.05}), vec({0.0})), 1e-2, noise);
    CHECK(oh.dl == doctest::Approx(0.05).epsilon(1e-12));
  }

  TEST_CASE("Girsanov weight examples") {
    const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), testing::mat1(1.0));
    GirsanovWeight w;
    CHECK(w.weight() == 1.0);
    for (int i = 0; i < 100; ++i) w = girsanov_weight_step(cs, state(vec({0.5}), vec({0.0})), w, vec({0.3}), 1e-2);
    CHECK(w.weight() == 1.0);
    GirsanovWeight v;
    for (int i = 0; i < 100; ++i) v = girsanov_weight_step(cs, state(vec({0.5}), vec({2.0})), v, vec({0.0}), 1e-2);
    CHECK(v.weight() == doctest::Approx(std::exp(-0.5 * 4.0 * 1.0)).epsilon(1e-12));
    CHECK(v.weight() < 1.0);
  }

  TEST_CASE("snapshot counts follow the configuration") {
    const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), testing::mat1(1.0));
    SimConfig cfg;
    cfg.dt_base = 1e-3;
    cfg.t_end = 0.05;
    cfg.burn_in = 0.01;
    cfg.snapshot_stride = 0.004;
    cfg.n_paths = 1000;
    cfg.seed = 5;
    cfg.initial.x = vec({0.5});
    cfg.initial.k = vec({0.0});
    const TrajectoryBatch b = run_ensemble(cs, cfg);
    CHECK(b.paths.size() == 1000);
    CHECK(b.diagnostics.reflect_failure == 0);
    // steps 10, 14, ..., 50
    CHECK(b.size() == 1000u * 11u);
    CHECK(b.snapshots.front().t == doctest::Approx(0.01));
    CHECK(b.snapshots[10].t == doctest::Approx(0.05));
  }

  TEST_CASE("identical seeds give identical bytes") {
    const auto cs = CoefficientSet::identity(Domain::ball(vec({0.0, 0.0}), 1.0), testing::diag({2.0, 1.0}));
    SimConfig cfg;
    cfg.dt_base = 1e-3;
    cfg.t_end = 0.5;
    cfg.n_paths = 2;
    cfg.seed = 99;
    cfg.initial.x = vec({0.1, 0.2});
    cfg.initial.k = vec({0.5, -0.5});
    const std::string a = csv_of(run_ensemble(cs, cfg));
    const std::string b = csv_of(run_ensemble(cs, cfg));
    CHECK(a == b);
    cfg.n_threads = 2;
    CHECK(csv_of(run_ensemble(cs, cfg)) == a);
    cfg.seed = 100;
    CHECK(csv_of(run_ensemble(cs, cfg)) != a);
  }

  TEST_CASE("K changes only with local time, ell monotone, x in closure") {
    const Domain disc = Domain::ball(vec({0.0, 0.0}), 1.0);
    const auto cs = CoefficientSet::identity(disc, testing::diag({2.0, 1.0}));
    SimConfig cfg;
    cfg.dt_base = 1e-3;
    cfg.t_end = 2.0;
    cfg.n_paths = 8;
    cfg.seed = 1;
    cfg.initial.x = vec({0.0, 0.0});
    cfg.initial.k = vec({0.0, 0.0});
    const TrajectoryBatch b = run_ensemble(cs, cfg);
    long long contacts = 0;
    for (std::size_t i = 1; i < b.size(); ++i) {
      const Snapshot& s = b.snapshots[i];
      const Snapshot& prev = b.snapshots[i - 1];
      REQUIRE(disc.in_closure(s.x));
      if (s.path_id != prev.path_id) continue;
      REQUIRE(s.ell >= prev.ell);
      if (s.ell == prev.ell) REQUIRE(s.k == prev.k);
      else ++contacts;
    }
    CHECK(contacts > 0);
  }

  TEST_CASE("zero-drift reflected motion has mean one half") {
    const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), testing::mat1(1.0));
    SimConfig cfg;
    cfg.dt_base = 1e-3;
    cfg.t_end = 2.0;
    cfg.burn_in = 1.0;
    cfg.n_paths = 400;
    cfg.snapshot_stride = 1.0;
    cfg.seed = 8;
    cfg.initial.x = vec({0.2});
    cfg.initial.k = vec({0.0});
    cfg.family = Family::reflected_reweighted;  // K kept out of the drift
    const TrajectoryBatch b = run_ensemble(cs, cfg);
    std::vector<double> finals;
    for (const auto& s : b.snapshots)
      if (s.t == doctest::Approx(2.0)) finals.push_back(s.x[0]);
    REQUIRE(finals.size() == 400);
    const double mean = std::accumulate(finals.begin(), finals.end(), 0.0) / finals.size();
    const double se = std::sqrt(1.0 / 12.0 / finals.size());
    CHECK(std::abs(mean - 0.5) <= 3 * se);
  }

  TEST_CASE("mean Girsanov weight is one") {
    const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), testing::mat1(1.0));
    SimConfig cfg;
    cfg.dt_base = 1e-3;
    cfg.t_end = 0.5;
    cfg.n_paths = 2000;
    cfg.seed = 77;
    cfg.snapshot_stride = 0.5;
    cfg.family = Family::reflected_reweighted;
    cfg.initial.x = vec({0.5});
    cfg.initial.k = vec({0.8});
    const TrajectoryBatch b = run_ensemble(cs, cfg);
    CHECK(b.diagnostics.weight_overflow == 0);
    double s = 0.0, s2 = 0.0;
    for (const auto& p : b.paths) {
      const double w = std::exp(p.log_weight);
      s += w;
      s2 += w * w;
    }
    const double n = static_cast<double>(b.paths.size());
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0) <= 3 * se);
  }

  TEST_CASE("gradient ensemble stays in the domain") {
    const Domain iv = Domain::interval(0.0, 1.0);
    const auto cs = CoefficientSet::identity(iv, testing::mat1(1.0));
    const Potential p = Potential::regularized_vn(RegularizedDistance(iv), 4);
    SimConfig cfg;
    cfg.dt_base = 1e-3;
    cfg.t_end = 1.0;
    cfg.n_paths = 20;
    cfg.seed = 3;
    cfg.family = Family::gradient;
    cfg.initial.x = vec({0.5});
    cfg.initial.k = vec({0.0});
    const TrajectoryBatch b = run_ensemble(cs, p, cfg);
    CHECK(b.diagnostics.boundary_overflow == 0);
    for (const auto& s : b.snapshots) CHECK(iv.inside(s.x));
    CHECK_THROWS_AS(run_ensemble(cs, cfg), ConfigError);
  }

  TEST_CASE("invalid configurations") {
    const auto cs = CoefficientSet::identity(Domain::interval(0.0, 1.0), testing::mat1(1.0));
    SimConfig cfg;
    cfg.initial.x = vec({0.5});
    cfg.initial.k = vec({0.0});
    cfg.dt_base = 0.0;
    CHECK_THROWS_AS(run_ensemble(cs, cfg), ConfigError);
    cfg.dt_base = 1e-3;
    cfg.burn_in = 2.0;
    CHECK_THROWS_AS(run_ensemble(cs, cfg), ConfigError);
    cfg.burn_in = 0.0;
    cfg.initial.x = vec({0.5, 0.5});
    CHECK_THROWS_AS(run_ensemble(cs, cfg), ConfigError);
  }

  TEST_CASE("batch csv round trip") {
    const auto cs = CoefficientSet::identity(Domain::ball(vec({0.0, 0.0}), 1.0), Mat::Identity(2, 2));
    SimConfig cfg;
    cfg.dt_base = 1e-2;
    cfg.t_end = 0.1;
    cfg.n_paths = 3;
    cfg.initial.x = vec({0.0, 0.5});
    cfg.initial.k = vec({1.0, 0.0});
    const TrajectoryBatch b = run_ensemble(cs, cfg);
    const std::string text = csv_of(b);
    CHECK(text.rfind("path_id,t,x1,x2,k1,k2,ell\n", 0) == 0);
    std::istringstream in(text);
    const TrajectoryBatch back = read_batch_csv(in);
    REQUIRE(back.size() == b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      CHECK(back.snapshots[i].path_id == b.snapshots[i].path_id);
      CHECK(back.snapshots[i].x == b.snapshots[i].x);
      CHECK(back.snapshots[i].k == b.snapshots[i].k);
      CHECK(back.snapshots[i].ell == b.snapshots[i].ell);
    }
    CHECK(csv_of(back) == text);
  }
}
