#include "qcw/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qcw/domains.hpp"
#include "qcw/errors.hpp"

namespace qcw {

namespace {

// Samples this far outside the closed domain are tolerated as round-off.
constexpr double kContainmentTol = 1e-10;

void check_dim(int dim) {
  if (dim < 2 || dim > Point::kMaxDim) {
    throw DimensionError("dimension must be 2 or 3, got " + std::to_string(dim));
  }
}

}  // namespace

Point::Point(int dim) : dim_(dim) { check_dim(dim); }

Point Point::filled(int dim, double v) {
  Point p(dim);
  for (int i = 0; i < dim; ++i) p[i] = v;
  return p;
}

bool Point::is_finite() const {
  for (int i = 0; i < dim_; ++i) {
    if (!std::isfinite((*this)[i])) return false;
  }
  return true;
}

Point& Point::operator+=(const Point& o) {
  for (int i = 0; i < kMaxDim; ++i) c_[i] += o.c_[i];
  return *this;
}

Point& Point::operator-=(const Point& o) {
  for (int i = 0; i < kMaxDim; ++i) c_[i] -= o.c_[i];
  return *this;
}

Point& Point::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Point& a) { return std::sqrt(dot(a, a)); }

double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double distance(const Point& a, const Point& b) { return std::sqrt(squared_distance(a, b)); }

bool Ball::contains(const Point& p, double rel_eps) const {
  return distance(center, p) <= radius * (1.0 + rel_eps) + 1e-300;
}

bool Box::empty() const {
  for (int i = 0; i < lo.dim(); ++i) {
    if (!(hi[i] > lo[i])) return true;
  }
  return false;
}

std::vector<Point> Box::corners() const {
  const int n = dim();
  std::vector<Point> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Point p(n);
    for (int i = 0; i < n; ++i) p[i] = (mask >> i) & 1 ? hi[i] : lo[i];
    out.push_back(p);
  }
  return out;
}

Similarity Similarity::planar(int dim, double scale, double angle, const Point& shift) {
  Similarity s;
  s.scale = scale;
  s.shift = shift;
  const double c = std::cos(angle);
  const double si = std::sin(angle);
  s.rotation = {{{c, -si, 0}, {si, c, 0}, {0, 0, 1}}};
  if (shift.dim() != dim) throw DimensionError("similarity shift dimension mismatch");
  return s;
}

Similarity Similarity::axis_angle(double scale, const Point& axis, double angle, const Point& shift) {
  if (axis.dim() != 3) throw DimensionError("axis-angle rotation needs a 3-D axis");
  const Point u = axis * (1.0 / norm(axis));
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double t = 1.0 - c;
  Similarity out;
  out.scale = scale;
  out.shift = shift;
  out.rotation = {{{t * u[0] * u[0] + c, t * u[0] * u[1] - s * u[2], t * u[0] * u[2] + s * u[1]},
                   {t * u[0] * u[1] + s * u[2], t * u[1] * u[1] + c, t * u[1] * u[2] - s * u[0]},
                   {t * u[0] * u[2] - s * u[1], t * u[1] * u[2] + s * u[0], t * u[2] * u[2] + c}}};
  return out;
}

Point Similarity::apply(const Point& p) const {
  Point q(p.dim());
  for (int i = 0; i < p.dim(); ++i) {
    double v = 0.0;
    for (int j = 0; j < p.dim(); ++j) v += rotation[i][j] * p[j];
    q[i] = scale * v + shift[i];
  }
  return q;
}

Point Similarity::apply_inverse(const Point& p) const {
  const Point d = p - shift;
  Point q(p.dim());
  for (int i = 0; i < p.dim(); ++i) {
    double v = 0.0;
    for (int j = 0; j < p.dim(); ++j) v += rotation[j][i] * d[j];
    q[i] = v / scale;
  }
  return q;
}

double diameter(const SampledBody& body) {
  const auto& b = body.boundary;
  if (b.size() < 2) throw DegenerateBody("diameter needs at least two boundary samples");
  double best = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      best = std::max(best, squared_distance(b[i], b[j]));
    }
  }
  return std::sqrt(best);
}

Ball exterior_ball(const SampledBody& body, std::uint64_t seed) {
  if (body.boundary.empty()) throw DegenerateBody("exterior radius of an empty sample set");
  return min_enclosing_ball(body.boundary, seed);
}

double interior_radius(const SampledBody& body) {
  if (body.interior.empty()) throw DegenerateBody("interior radius needs interior samples");
  if (body.boundary.empty()) throw DegenerateBody("interior radius needs boundary samples");
  double best2 = 0.0;
  for (const Point& p : body.interior) {
    double nearest2 = std::numeric_limits<double>::infinity();
    for (const Point& q : body.boundary) {
      nearest2 = std::min(nearest2, squared_distance(p, q));
      if (nearest2 <= best2) break;  // cannot improve the maximum
    }
    best2 = std::max(best2, nearest2);
  }
  return std::sqrt(best2);
}

double set_distance(const SampledBody& body, const Domain& domain) {
  if (body.boundary.empty()) throw DegenerateBody("distance of an empty sample set");
  double best = std::numeric_limits<double>::infinity();
  for (const Point& p : body.boundary) {
    const double d = domain.distance_to_complement(p);
    if (d < -kContainmentTol) {
      throw ContainmentViolation("sample lies outside domain '" + domain.name() + "'");
    }
    best = std::min(best, d);
  }
  return std::max(best, 0.0);
}

BodyMetrics body_metrics(const SampledBody& body, std::uint64_t seed) {
  BodyMetrics m;
  m.inradius = interior_radius(body);
  m.circumradius = exterior_ball(body, seed).radius;
  m.diameter = diameter(body);
  if (!(m.inradius > 0.0)) throw DegenerateBody("body has zero interior radius");
  m.dilatation = m.circumradius / m.inradius;
  return m;
}

SampledBody sample_cube(const Point& lo, double side, int subdivisions) {
  Point hi = lo;
  for (int i = 0; i < lo.dim(); ++i) hi[i] += side;
  return sample_box(Box{lo, hi}, subdivisions);
}

SampledBody sample_box(const Box& box, int subdivisions) {
  const int n = box.dim();
  if (box.empty()) throw DegenerateBody("cannot sample an empty box");
  const int m = std::max(2, subdivisions + (subdivisions % 2));
  double longest = 0.0;
  for (int i = 0; i < n; ++i) longest = std::max(longest, box.hi[i] - box.lo[i]);

  std::array<int, 3> counts{1, 1, 1};
  std::array<double, 3> step{0, 0, 0};
  for (int i = 0; i < n; ++i) {
    const double len = box.hi[i] - box.lo[i];
    int c = static_cast<int>(std::ceil(len / longest * m - 1e-9));
    c = std::max(2, c + (c % 2));
    counts[i] = c;
    step[i] = len / c;
  }

  SampledBody body;
  body.resolution = *std::max_element(step.begin(), step.begin() + n);
  const int kmax = n == 3 ? counts[2] : 0;
  for (int k = 0; k <= kmax; ++k) {
    for (int j = 0; j <= counts[1]; ++j) {
      for (int i = 0; i <= counts[0]; ++i) {
        Point p(n);
        p[0] = i == counts[0] ? box.hi[0] : box.lo[0] + i * step[0];
        p[1] = j == counts[1] ? box.hi[1] : box.lo[1] + j * step[1];
        bool on_face = i == 0 || i == counts[0] || j == 0 || j == counts[1];
        if (n == 3) {
          p[2] = k == counts[2] ? box.hi[2] : box.lo[2] + k * step[2];
          on_face = on_face || k == 0 || k == counts[2];
        }
        (on_face ? body.boundary : body.interior).push_back(p);
      }
    }
  }
  return body;
}

SampledBody sample_ball(const Ball& ball, double spacing) {
  const int n = ball.center.dim();
  const double r = ball.radius;
  if (!(r > 0.0) || !(spacing > 0.0)) throw DegenerateBody("ball sampling needs positive radius and spacing");
  SampledBody body;
  if (n == 2) {
    const int count = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / spacing)));
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * k / count;
      body.boundary.push_back(ball.center + Point(r * std::cos(t), r * std::sin(t)));
    }
    body.resolution = 2.0 * r * std::sin(std::numbers::pi / count);
  } else {
    // Fibonacci lattice; resolution is the measured worst nearest-neighbour gap.
    const double cell = std::sqrt(3.0) / 2.0 * spacing * spacing;
    const int count = std::max(32, static_cast<int>(std::ceil(4.0 * std::numbers::pi * r * r / cell)));
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / count;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double t = golden * k;
      body.boundary.push_back(ball.center + Point(r * rho * std::cos(t), r * rho * std::sin(t), r * z));
    }
    double worst2 = 0.0;
    for (std::size_t i = 0; i < body.boundary.size(); ++i) {
      double nearest2 = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < body.boundary.size(); ++j) {
        if (i != j) nearest2 = std::min(nearest2, squared_distance(body.boundary[i], body.boundary[j]));
      }
      worst2 = std::max(worst2, nearest2);
    }
    body.resolution = std::sqrt(worst2);
  }

  body.interior.push_back(ball.center);
  const int steps = static_cast<int>(std::floor(r / spacing));
  const int kmax = n == 3 ? steps : 0;
  for (int k = -kmax; k <= kmax; ++k) {
    for (int j = -steps; j <= steps; ++j) {
      for (int i = -steps; i <= steps; ++i) {
        if (i == 0 && j == 0 && k == 0) continue;
        Point off = n == 3 ? Point(i * spacing, j * spacing, k * spacing) : Point(i * spacing, j * spacing);
        if (norm(off) < r * (1.0 - 1e-9)) body.interior.push_back(ball.center + off);
      }
    }
  }
  return body;
}

SampledBody transformed(const SampledBody& body, const Similarity& s) {
  SampledBody out;
  out.resolution = body.resolution * s.scale;
  out.boundary.reserve(body.boundary.size());
  out.interior.reserve(body.interior.size());
  for (const auto& p : body.boundary) out.boundary.push_back(s.apply(p));
  for (const auto& p : body.interior) out.interior.push_back(s.apply(p));
  return out;
}

}  // namespace qcw
