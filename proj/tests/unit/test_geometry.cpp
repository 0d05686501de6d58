#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "inertdrift/geometry.hpp"
#include "support.hpp"

using namespace inertdrift;
using testing::vec;

namespace {

std::vector<Domain> sample_domains() {
  return {
      Domain::interval(0.0, 1.0),
      Domain::interval(-2.0, 3.0),
      Domain::ball(vec({0.0, 0.0}), 1.0),
      Domain::ball(vec({0.5, -0.2, 0.1}), 0.7),
      Domain::box(vec({0.0, 0.0}), vec({1.0, 1.0})),
      Domain::box(vec({0.0, 0.0, 0.0}), vec({2.0, 1.0, 1.5})),
      Domain::ellipsoid(vec({0.0, 0.0}), vec({2.0, 1.0})),
      Domain::ellipsoid(vec({0.0, 0.0, 0.0}), vec({1.5, 1.0, 0.8})),
  };
}

// Exact Euclidean distance to the complement by brute force where available.
double reference_distance(const Domain& d, const Vec& x) {
  switch (d.kind()) {
    case DomainKind::interval:
      return std::min(x[0] - d.lower()[0], d.upper()[0] - x[0]);
    case DomainKind::ball:
      return d.radius() - (x - d.center()).norm();
    case DomainKind::box: {
      double m = 1e300;
      for (int j = 0; j < d.dim(); ++j) m = std::min({m, x[j] - d.lower()[j], d.upper()[j] - x[j]});
      return m;
    }
    default:
      return std::nan("");
  }
}

Vec random_interior(const Domain& d, std::mt19937_64& rng) {
  for (;;) {
    Vec x = testing::uniform_in(rng, d.bbox_lower(), d.bbox_upper());
    if (d.inside(x)) return x;
  }
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("signed distance examples") {
    CHECK(Domain::ball(vec({0.0, 0.0}), 1.0).signed_distance(vec({0.6, 0.0})) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(Domain::interval(0.0, 1.0).signed_distance(vec({0.25})) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(Domain::box(vec({0.0, 0.0}), vec({1.0, 1.0})).signed_distance(vec({0.5, 0.9})) ==
          doctest::Approx(0.1).epsilon(1e-14));
  }

  TEST_CASE("signed distance sign convention") {
    const Domain disc = Domain::ball(vec({0.0, 0.0}), 1.0);
    CHECK(disc.signed_distance(vec({1.0, 0.0})) == doctest::Approx(0.0));
    CHECK(disc.signed_distance(vec({1.5, 0.0})) == doctest::Approx(-0.5));
    const Domain e = Domain::ellipsoid(vec({0.0, 0.0}), vec({2.0, 1.0}));
    CHECK(e.signed_distance(vec({0.0, 0.0})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.signed_distance(vec({3.0, 0.0})) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(e.signed_distance(vec({0.0, 1.5})) == doctest::Approx(-0.5).epsilon(1e-12));
  }

  TEST_CASE("signed distance matches brute force on exact kinds") {
    std::mt19937_64 rng(11);
    for (const Domain& d : sample_domains()) {
      if (d.kind() == DomainKind::ellipsoid) continue;
      for (int i = 0; i < 2000; ++i) {
        const Vec x = testing::uniform_in(rng, d.bbox_lower(), d.bbox_upper());
        const double ref = reference_distance(d, x);
        if (ref < 0 && d.kind() == DomainKind::box) continue;  // exterior corners differ from the face min
        CHECK(d.signed_distance(x) == doctest::Approx(ref).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("inward normal examples") {
    const Vec n1 = Domain::ball(vec({0.0, 0.0}), 1.0).inward_normal(vec({1.0, 0.0}));
    CHECK(n1[0] == doctest::Approx(-1.0));
    CHECK(n1[1] == doctest::Approx(0.0));
    CHECK(Domain::interval(0.0, 1.0).inward_normal(vec({0.0}))[0] == doctest::Approx(1.0));
    CHECK(Domain::interval(0.0, 1.0).inward_normal(vec({1.0}))[0] == doctest::Approx(-1.0));
    const Vec n3 = Domain::ellipsoid(vec({0.0, 0.0}), vec({2.0, 1.0})).inward_normal(vec({2.0, 0.0}));
    CHECK(n3[0] == doctest::Approx(-1.0));
    CHECK(n3[1] == doctest::Approx(0.0));
  }

  TEST_CASE("inward normal away from the boundary is an error") {
    CHECK_THROWS_AS(Domain::ball(vec({0.0, 0.0}), 1.0).inward_normal(vec({0.5, 0.0})), GeometryError);
    CHECK_THROWS_AS(Domain::interval(0.0, 1.0).inward_normal(vec({0.3})), GeometryError);
  }

  TEST_CASE("box corner normal averages the active faces") {
    const Domain sq = Domain::box(vec({0.0, 0.0}), vec({1.0, 1.0}));
    const Vec n = sq.inward_normal(vec({0.0, 0.0}));
    CHECK(n[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(n[1] == doctest::Approx(std::sqrt(0.5)));
    const Vec f = sq.inward_normal(vec({1.0, 0.4}));
    CHECK(f[0] == doctest::Approx(-1.0));
    CHECK(f[1] == doctest::Approx(0.0));
  }

  TEST_CASE("normals are unit and point inward") {
    std::mt19937_64 rng(5);
    for (const Domain& d : sample_domains()) {
      for (int i = 0; i < 300; ++i) {
        const Vec xb = d.project_to_boundary(random_interior(d, rng));
        const Vec n = d.inward_normal(xb);
        CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-12));
        const double eps = 1e-6 * d.diameter();
        CHECK(d.signed_distance(xb + eps * n) > d.signed_distance(xb));
      }
    }
  }

  TEST_CASE("boundary projection is idempotent") {
    std::mt19937_64 rng(7);
    for (const Domain& d : sample_domains()) {
      for (int i = 0; i < 500; ++i) {
        Vec lo = d.bbox_lower(), hi = d.bbox_upper();
        const Vec pad = Vec::Constant(d.dim(), 0.3 * d.diameter());
        const Vec x = testing::uniform_in(rng, lo - pad, hi + pad);
        const Vec p = d.project_to_boundary(x);
        CHECK(std::abs(d.signed_distance(p)) <= d.tol_bd());
        CHECK((d.project_to_boundary(p) - p).norm() <= d.tol_bd());
        const Vec n1 = d.normal_at_projection(x);
        const Vec n2 = d.inward_normal(p);
        CHECK((n1 - n2).norm() <= 1e-9);
      }
    }
  }

  TEST_CASE("level-set disc agrees with the ball") {
    LevelFunction phi{[](const Vec& x) { return 1.0 - x.squaredNorm(); },
                      [](const Vec& x) -> Vec { return -2.0 * x; }};
    const Domain ls = Domain::level_set(phi, vec({-1.2, -1.2}), vec({1.2, 1.2}));
    const Domain b = Domain::ball(vec({0.0, 0.0}), 1.0);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
      const Vec x = testing::uniform_in(rng, vec({-1.5, -1.5}), vec({1.5, 1.5}));
      if (x.norm() < 1e-3) continue;
      CHECK(ls.signed_distance(x) == doctest::Approx(b.signed_distance(x)).epsilon(1e-8).scale(1.0));
    }
    CHECK(ls.inradius() == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("slice ranges") {
    const Domain disc = Domain::ball(vec({0.0, 0.0}), 1.0);
    const auto r = disc.slice_range(vec({0.6, 0.0}), 1);
    CHECK(r.first == doctest::Approx(-0.8));
    CHECK(r.second == doctest::Approx(0.8));
    const auto miss = disc.slice_range(vec({1.5, 0.0}), 1);
    CHECK(miss.first > miss.second);
  }

  TEST_CASE("construction errors") {
    CHECK_THROWS_AS(Domain::interval(1.0, 0.0), GeometryError);
    CHECK_THROWS_AS(Domain::ball(vec({0.0, 0.0}), -1.0), GeometryError);
    CHECK_THROWS_AS(Domain::box(vec({0.0, 1.0}), vec({1.0, 1.0})), GeometryError);
  }

  TEST_CASE("regularized distance sandwich on 1e4 random points") {
    std::mt19937_64 rng(13);
    for (const Domain& d : sample_domains()) {
      const RegularizedDistance rd(d);
      CHECK(rd.c_lower() > 0.0);
      CHECK(rd.c_lower() <= rd.c_upper());
      int violations = 0;
      for (int i = 0; i < 10000; ++i) {
        const Vec x = random_interior(d, rng);
        const double dist = d.signed_distance(x);
        const double v = rd.value(x);
        if (v < rd.c_lower() * dist * (1 - 1e-12) || v > rd.c_upper() * dist * (1 + 1e-12)) ++violations;
      }
      CHECK_MESSAGE(violations == 0, to_string(d.kind()), " dim ", d.dim());
    }
  }

  TEST_CASE("exact distance outside the cap for interval and ball") {
    const RegularizedDistance ri(Domain::interval(0.0, 1.0));
    CHECK(ri.value(vec({0.3})) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(ri.value(vec({0.95})) == doctest::Approx(0.05).epsilon(1e-13));
    const RegularizedDistance rb(Domain::ball(vec({0.0, 0.0}), 1.0));
    for (double r : {0.3, 0.5, 0.9, 0.999}) {
      const Vec x = vec({r * std::cos(1.0), r * std::sin(1.0)});
      CHECK(rb.value(x) == doctest::Approx(1.0 - r).epsilon(1e-13));
    }
    // the cap lowers delta below the distance near the center
    CHECK(rb.c_lower() < 1.0);
    CHECK(rb.c_upper() >= 1.0);
  }

  TEST_CASE("box soft-min constants measured on a grid") {
    const Domain sq = Domain::box(vec({0.0, 0.0}), vec({1.0, 1.0}));
    const RegularizedDistance rd(sq);
    double lo = 1e300, hi = 0.0;
    for (int i = 1; i < 100; ++i)
      for (int j = 1; j < 100; ++j) {
        const Vec x = vec({i / 100.0, j / 100.0});
        const double ratio = rd.value(x) / sq.signed_distance(x);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    CHECK(lo >= rd.c_lower() * (1 - 1e-12));
    CHECK(hi <= rd.c_upper() * (1 + 1e-12));
  }

  TEST_CASE("regularized distance gradient matches central differences") {
    std::mt19937_64 rng(17);
    for (const Domain& d : sample_domains()) {
      const RegularizedDistance rd(d);
      const double h = 1e-5 * d.diameter();
      for (int i = 0; i < 400; ++i) {
        const Vec x = random_interior(d, rng);
        // truncation error of the stencil grows like dist^-2 near box edges
        if (d.signed_distance(x) < 0.1 * d.inradius()) continue;
        const Vec g = rd.gradient(x);
        Vec fd(d.dim());
        for (int j = 0; j < d.dim(); ++j) {
          Vec e = Vec::Zero(d.dim());
          e[j] = h;
          fd[j] = (rd.value(x + e) - rd.value(x - e)) / (2 * h);
        }
        const double err = (g - fd).norm() / std::max(1.0, g.norm());
        CHECK_MESSAGE(err <= 1e-6, to_string(d.kind()), " at ", format_point(x));
      }
    }
  }

  TEST_CASE("regularized distance outside the closure is an error") {
    const RegularizedDistance rd(Domain::interval(0.0, 1.0));
    CHECK_THROWS_AS(rd.value(vec({1.5})), GeometryError);
  }
}
