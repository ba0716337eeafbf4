#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qcw/errors.hpp"
#include "qcw/geometry.hpp"

using namespace qcw;

namespace {

// Ball through the given support points with centre in their affine hull,
// by solving the Gram system with Cramer's rule (up to 3 unknowns).
bool circumball(const std::vector<Point>& s, Ball& out) {
  const std::size_t k = s.size() - 1;
  if (k == 0) {
    out = Ball{s[0], 0.0};
    return true;
  }
  std::vector<Point> v;
  for (std::size_t i = 1; i < s.size(); ++i) v.push_back(s[i] - s[0]);
  double a[3][3] = {};
  double b[3] = {};
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = 2.0 * dot(v[i], v[j]);
    b[i] = dot(v[i], v[i]);
  }
  const auto det = [&](double m[3][3]) {
    if (k == 1) return m[0][0];
    if (k == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double d = det(a);
  if (std::abs(d) < 1e-12) return false;
  Point c = s[0];
  for (std::size_t col = 0; col < k; ++col) {
    double m[3][3];
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) m[i][j] = a[i][j];
    for (std::size_t i = 0; i < k; ++i) m[i][col] = b[i];
    c += (det(m) / d) * v[col];
  }
  out = Ball{c, distance(c, s[0])};
  return true;
}

// Smallest ball over all support sets of size 2..n+1 that contains every point.
double brute_force_min_radius(const std::vector<Point>& pts) {
  const int n = pts.front().dim();
  const std::size_t m = pts.size();
  double best = INFINITY;
  const auto consider = [&](const std::vector<Point>& s) {
    Ball b;
    if (!circumball(s, b) || b.radius >= best) return;
    for (const Point& p : pts) {
      if (distance(p, b.center) > b.radius * (1 + 1e-9) + 1e-12) return;
    }
    best = b.radius;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      consider({pts[i], pts[j]});
      for (std::size_t k = j + 1; k < m; ++k) {
        consider({pts[i], pts[j], pts[k]});
        if (n == 3)
          for (std::size_t l = k + 1; l < m; ++l) consider({pts[i], pts[j], pts[k], pts[l]});
      }
    }
  return best;
}

}  // namespace

TEST_CASE("point arithmetic and distances") {
  const Point a(1, 2);
  const Point b(4, 6);
  CHECK(distance(a, b) == doctest::Approx(5.0));
  CHECK((a + b) == Point(5, 8));
  CHECK((2.0 * a) == Point(2, 4));
  CHECK(norm(Point(1, 2, 2)) == doctest::Approx(3.0));
  CHECK_THROWS_AS(Point(4), DimensionError);
}

TEST_CASE("minimum enclosing ball of the unit sphere samples") {
  for (int n : {2, 3}) {
    const SampledBody s = sample_ball(Ball{Point::zero(n), 1.0}, 0.05);
    const Ball b = min_enclosing_ball(s.boundary);
    CHECK(std::abs(b.radius - 1.0) <= s.resolution);
    CHECK(norm(b.center) <= s.resolution);
  }
}

TEST_CASE("minimum enclosing ball matches brute force on random sets") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 40; ++trial) {
      const int m = 2 + trial % (n == 2 ? 14 : 9);
      std::vector<Point> pts;
      for (int i = 0; i < m; ++i) {
        Point p(n);
        for (int k = 0; k < n; ++k) p[k] = u(rng);
        pts.push_back(p);
      }
      const Ball b = min_enclosing_ball(pts);
      CHECK(b.radius == doctest::Approx(brute_force_min_radius(pts)).epsilon(1e-9));
      for (const Point& p : pts) CHECK(distance(p, b.center) <= b.radius * (1 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("minimum enclosing ball is seed independent") {
  const SampledBody s = sample_box(Box{Point(0, 0, 0), Point(1, 2, 3)}, 6);
  const double r1 = min_enclosing_ball(s.boundary, 1).radius;
  const double r2 = min_enclosing_ball(s.boundary, 99).radius;
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
  CHECK(r1 == doctest::Approx(std::sqrt(14.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("cube samples give exact metrics") {
  const SampledBody sq = sample_cube(Point(0, 0), 1.0, 8);
  const BodyMetrics m = body_metrics(sq);
  CHECK(m.inradius == doctest::Approx(0.5));
  CHECK(m.circumradius == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(m.diameter == doctest::Approx(std::sqrt(2.0)));
  CHECK(m.dilatation == doctest::Approx(std::sqrt(2.0)));
  CHECK(sq.resolution == doctest::Approx(0.125));

  const BodyMetrics c = body_metrics(sample_cube(Point(0, 0, 0), 2.0, 6));
  CHECK(c.dilatation == doctest::Approx(std::sqrt(3.0)));
  CHECK(c.diameter == doctest::Approx(2.0 * std::sqrt(3.0)));
}

TEST_CASE("body metric invariants on random boxes and balls") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 2;
    Point hi(n);
    for (int k = 0; k < n; ++k) hi[k] = u(rng);
    const SampledBody body = trial % 3 == 0 ? sample_ball(Ball{Point::zero(n), u(rng)}, 0.1)
                                            : sample_box(Box{Point::zero(n), hi}, 10);
    const BodyMetrics m = body_metrics(body);
    const double tol = 2.0 * body.resolution;
    CHECK(m.inradius <= m.circumradius + tol);
    CHECK(m.circumradius <= m.diameter + tol);
    CHECK(m.diameter <= 2.0 * m.circumradius + tol);
    CHECK(m.dilatation >= 1.0 - tol);
  }
}

TEST_CASE("dilatation is invariant under similarities") {
  const SampledBody body = sample_box(Box{Point(0, 0), Point(2, 1)}, 16);
  const BodyMetrics m0 = body_metrics(body);
  for (double scale : {0.5, 1.0, 3.0}) {
    for (double angle : {0.0, 0.4, 2.0}) {
      const Similarity s = Similarity::planar(2, scale, angle, Point(5, -3));
      const SampledBody t = transformed(body, s);
      const BodyMetrics m = body_metrics(t);
      CHECK(m.dilatation == doctest::Approx(m0.dilatation).epsilon(1e-9));
      CHECK(m.diameter == doctest::Approx(scale * m0.diameter).epsilon(1e-9));
      CHECK(t.resolution == doctest::Approx(scale * body.resolution));
    }
  }
  const Similarity s3 = Similarity::axis_angle(2.0, Point(0, 0, 1), 0.7, Point(1, 1, 1));
  const SampledBody b3 = sample_box(Box{Point(0, 0, 0), Point(1, 2, 1)}, 8);
  CHECK(body_metrics(transformed(b3, s3)).dilatation == doctest::Approx(body_metrics(b3).dilatation).epsilon(1e-9));
}

TEST_CASE("similarity inverse round trip") {
  const Similarity s = Similarity::axis_angle(1.7, Point(1, 1, 0) * (1 / std::sqrt(2.0)), 1.1, Point(0.3, 0, -2));
  const Point p(0.2, -0.5, 4.0);
  CHECK(distance(s.apply_inverse(s.apply(p)), p) < 1e-12);
}

TEST_CASE("ball sampling resolution") {
  const SampledBody b2 = sample_ball(Ball{Point(1, 1), 2.0}, 0.1);
  CHECK(b2.resolution <= 0.1 + 1e-12);
  for (const Point& p : b2.boundary) CHECK(distance(p, Point(1, 1)) == doctest::Approx(2.0));
  for (const Point& p : b2.interior) CHECK(distance(p, Point(1, 1)) < 2.0);
  const SampledBody b3 = sample_ball(Ball{Point(0, 0, 0), 1.0}, 0.1);
  CHECK(b3.resolution < 0.2);
  CHECK(interior_radius(b3) == doctest::Approx(1.0).epsilon(b3.resolution));
}

TEST_CASE("degenerate bodies are rejected") {
  SampledBody empty;
  CHECK_THROWS_AS(diameter(empty), DegenerateBody);
  SampledBody no_interior;
  no_interior.boundary = {Point(0, 0), Point(1, 0)};
  CHECK_THROWS_AS(body_metrics(no_interior), DegenerateBody);
  CHECK_THROWS_AS(sample_ball(Ball{Point(0, 0), 0.0}, 0.1), DegenerateBody);
}
