// Smallest enclosing ball by randomized incremental construction. The
// recursion only descends through the support set, so its depth is at most
// n + 1 regardless of the number of points.

#include <algorithm>
#include <cmath>
#include <random>

#include "qcw/errors.hpp"
#include "qcw/geometry.hpp"

namespace qcw {

namespace {

constexpr double kContainEps = 1e-12;

// Ball with every support point on its boundary and centre in their affine
// hull. Returns radius < 0 for an empty support.
Ball ball_from_support(const std::vector<Point>& support) {
  if (support.empty()) return Ball{Point(), -1.0};
  const Point& p0 = support.front();
  if (support.size() == 1) return Ball{p0, 0.0};

  const std::size_t k = support.size() - 1;
  std::vector<Point> v;
  for (std::size_t i = 1; i < support.size(); ++i) v.push_back(support[i] - p0);

  // Gram system 2 <v_i, v_j> lambda_j = |v_i|^2, solved with partial pivoting.
  double a[3][4] = {};
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = 2.0 * dot(v[i], v[j]);
    a[i][k] = dot(v[i], v[i]);
  }
  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i) scale = std::max(scale, std::abs(a[i][i]));
  bool singular = false;
  for (std::size_t c = 0; c < k && !singular; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) <= 1e-13 * scale) {
      singular = true;
      break;
    }
    for (std::size_t j = 0; j <= k; ++j) std::swap(a[c][j], a[piv][j]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j <= k; ++j) a[r][j] -= f * a[c][j];
    }
  }

  if (singular) {
    // Affinely dependent support: fall back to the diametral ball of the
    // farthest pair, which contains the rest.
    std::size_t bi = 0;
    std::size_t bj = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      for (std::size_t j = i + 1; j < support.size(); ++j) {
        const double d = squared_distance(support[i], support[j]);
        if (d > best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    return Ball{0.5 * (support[bi] + support[bj]), 0.5 * std::sqrt(best)};
  }

  Point c = p0;
  for (std::size_t i = 0; i < k; ++i) c += (a[i][k] / a[i][i]) * v[i];
  double r = 0.0;
  for (const Point& s : support) r = std::max(r, distance(c, s));
  return Ball{c, r};
}

Ball welzl(const std::vector<Point>& pts, std::size_t end, std::vector<Point>& support, int dim) {
  Ball b = ball_from_support(support);
  if (static_cast<int>(support.size()) == dim + 1) return b;
  for (std::size_t i = 0; i < end; ++i) {
    if (b.radius >= 0.0 && b.contains(pts[i], kContainEps)) continue;
    support.push_back(pts[i]);
    b = welzl(pts, i, support, dim);
    support.pop_back();
  }
  return b;
}

}  // namespace

Ball min_enclosing_ball(std::span<const Point> points, std::uint64_t seed) {
  if (points.empty()) throw DegenerateBody("minimum enclosing ball of an empty set");
  std::vector<Point> pts(points.begin(), points.end());
  std::mt19937_64 rng(seed);
  std::shuffle(pts.begin(), pts.end(), rng);
  std::vector<Point> support;
  support.reserve(4);
  return welzl(pts, pts.size(), support, pts.front().dim());
}

}  // namespace qcw
