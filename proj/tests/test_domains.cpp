#include <doctest.h>

#include <cmath>
#include <random>

#include "qcw/domains.hpp"
#include "qcw/errors.hpp"

using namespace qcw;

namespace {

Point random_point(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Point p(n);
  for (int i = 0; i < n; ++i) p[i] = u(rng);
  return p;
}

}  // namespace

TEST_CASE("square oracle values") {
  const Domain sq = domains::square();
  CHECK(sq.distance_to_complement(Point(0.5, 0.5)) == doctest::Approx(0.5));
  CHECK(sq.distance_to_complement(Point(0.1, 0.7)) == doctest::Approx(0.1));
  CHECK(sq.distance_to_complement(Point(2.0, 0.5)) == doctest::Approx(-1.0));
  CHECK(sq.distance_to_complement(Point(2.0, 2.0)) == doctest::Approx(-std::sqrt(2.0)));
  CHECK(sq.contains(Point(0.5, 0.5)));
  CHECK_FALSE(sq.contains(Point(1.0, 0.5)));
}

TEST_CASE("l-shape and stadium oracle values") {
  const Domain l = domains::l_shape();
  CHECK(l.distance_to_complement(Point(0.25, 0.25)) == doctest::Approx(0.25));
  CHECK(l.distance_to_complement(Point(0.75, 0.75)) < 0.0);
  CHECK(l.distance_to_complement(Point(0.4, 0.4)) == doctest::Approx(std::sqrt(0.02)));
  const Domain s = domains::by_name("stadium");
  CHECK(s.distance_to_complement(Point(0.5, 0.5)) == doctest::Approx(0.25));
  CHECK(s.distance_to_complement(Point(0.1, 0.5)) == doctest::Approx(0.1));
  CHECK(s.distance_to_complement(Point(0.5, 1.0)) == doctest::Approx(-0.25));
}

TEST_CASE("catalog oracles are 1-Lipschitz") {
  std::mt19937_64 rng(3);
  for (const auto& name : domains::catalog_names()) {
    if (name == "empty") continue;
    const Domain d = domains::by_name(name);
    for (int i = 0; i < 10000; ++i) {
      const Point p = random_point(rng, d.dim(), -0.5, 1.5);
      const Point q = random_point(rng, d.dim(), -0.5, 1.5);
      CHECK(std::abs(d.distance_to_complement(p) - d.distance_to_complement(q)) <= distance(p, q) + 1e-9);
    }
  }
}

TEST_CASE("box minimum agrees with dense sampling") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& name : {"square", "l-shape", "stadium", "disk"}) {
    const Domain d = domains::by_name(name);
    REQUIRE(d.has_exact_box_minimum());
    for (int t = 0; t < 200; ++t) {
      const double side = 0.02 + 0.2 * u(rng);
      const Point lo(-0.1 + 1.1 * u(rng), -0.1 + 1.1 * u(rng));
      const Box box{lo, lo + Point(side, side)};
      constexpr int m = 64;
      double dense = INFINITY;
      for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j)
          dense = std::min(dense, d.distance_to_complement(lo + Point(side * i / m, side * j / m)));
      const double exact = d.min_over_box(box);
      // Exact values are never above a sampled minimum and within one grid step of it.
      if (dense > 0.0) {
        CHECK(exact <= dense + 1e-12);
        CHECK(exact >= dense - side / m * std::sqrt(2.0));
      } else {
        CHECK(exact <= 1e-12);
      }
    }
  }
}

TEST_CASE("face sampling fallback reports its error bound") {
  const Domain base = domains::square();
  const Domain d("plain", 2, base.bounding_box(), [base](const Point& p) { return base.distance_to_complement(p); });
  double err = -1.0;
  const double v = d.min_over_box(Box{Point(0.2, 0.3), Point(0.4, 0.6)}, &err);
  CHECK(v == doctest::Approx(0.2));
  CHECK(err > 0.0);
  CHECK_FALSE(d.has_exact_box_minimum());
}

TEST_CASE("embedding coefficient") {
  const Domain disk = domains::disk();
  CHECK(embedding_coefficient(disk, Ball{Point(0, 0), 0.5}) == doctest::Approx(2.0));
  CHECK(embedding_coefficient(disk, Ball{Point(0.5, 0), 0.1}) == doctest::Approx(5.0));
  CHECK_THROWS_AS(embedding_coefficient(disk, Ball{Point(0.5, 0), 0.5}), ContainmentViolation);
  CHECK(std::isinf(embedding_coefficient(domains::whole_space(2), Ball{Point(0, 0), 1.0})));
  CHECK(contains_ball(domains::unit_ball3(), Ball{Point(0, 0, 0.5), 0.4}));
}

TEST_CASE("similarity transform of a domain stays exact") {
  const Domain sq = domains::square();
  const Similarity s = Similarity::planar(2, 3.0, 0.5, Point(1, 2));
  const Domain t = transformed(sq, s);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const Point p = random_point(rng, 2, -0.5, 1.5);
    CHECK(t.distance_to_complement(s.apply(p)) == doctest::Approx(3.0 * sq.distance_to_complement(p)));
  }
  for (const Point& b : t.boundary_samples(0.1)) CHECK(std::abs(t.distance_to_complement(b)) < 1e-9);
}

TEST_CASE("boundary samplers lie on the boundary") {
  for (const auto& name : domains::catalog_names()) {
    const Domain d = domains::by_name(name);
    const auto pts = d.boundary_samples(0.05);
    if (name == "empty") {
      CHECK(pts.empty());
      continue;
    }
    CHECK_FALSE(pts.empty());
    for (const Point& p : pts) CHECK(std::abs(d.distance_to_complement(p)) < 1e-9);
  }
}

TEST_CASE("special domains") {
  const Domain e = domains::empty(2);
  CHECK_FALSE(e.contains(Point(0.5, 0.5)));
  const Domain w = domains::whole_space(3);
  CHECK_FALSE(w.bounded());
  CHECK_FALSE(w.is_simple());
  CHECK(std::isinf(w.distance_to_complement(Point(1, 2, 3))));
  CHECK_THROWS_AS(domains::by_name("torus"), ConfigError);
  CHECK_THROWS_AS(domains::stadium(Point(0, 0, 0), Point(1, 0, 0), 0.2), DimensionError);
  CHECK(domains::square().is_simple());
}
