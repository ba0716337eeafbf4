#include "qcw/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "qcw/errors.hpp"

namespace qcw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Componentwise excess of p outside the box, as a vector.
Point box_excess(const Point& p, const Point& lo, const Point& hi) {
  Point o(p.dim());
  for (int i = 0; i < p.dim(); ++i) o[i] = std::max({lo[i] - p[i], p[i] - hi[i], 0.0});
  return o;
}

double box_signed_distance(const Point& p, const Point& lo, const Point& hi) {
  const double out = norm(box_excess(p, lo, hi));
  if (out > 0.0) return -out;
  double in = kInf;
  for (int i = 0; i < p.dim(); ++i) in = std::min({in, p[i] - lo[i], hi[i] - p[i]});
  return in;
}

double point_box_distance(const Point& p, const Point& lo, const Point& hi) {
  return norm(box_excess(p, lo, hi));
}

double box_box_distance(const Box& a, const Point& lo, const Point& hi) {
  Point gap(a.dim());
  for (int i = 0; i < a.dim(); ++i) gap[i] = std::max({lo[i] - a.hi[i], a.lo[i] - hi[i], 0.0});
  return norm(gap);
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * ab);
}

std::vector<Point> sample_polyline(const std::vector<Point>& closed, double spacing) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < closed.size(); ++i) {
    const Point& a = closed[i];
    const Point& b = closed[(i + 1) % closed.size()];
    const int m = std::max(1, static_cast<int>(std::ceil(distance(a, b) / spacing)));
    for (int k = 0; k < m; ++k) out.push_back(a + (static_cast<double>(k) / m) * (b - a));
  }
  return out;
}

Domain make_box(const Point& lo, const Point& hi, std::string name) {
  if (lo.dim() != hi.dim()) throw DimensionError("box corners differ in dimension");
  Box bb{lo, hi};
  Domain d(std::move(name), lo.dim(), bb,
           bb.empty() ? Domain::Oracle([](const Point&) { return -kInf; })
                      : Domain::Oracle([lo, hi](const Point& p) { return box_signed_distance(p, lo, hi); }));
  d.with_concave_oracle();
  d.with_boundary_sampler([bb](double spacing) -> std::vector<Point> {
    if (bb.empty()) return {};
    double longest = 0.0;
    for (int i = 0; i < bb.dim(); ++i) longest = std::max(longest, bb.hi[i] - bb.lo[i]);
    return sample_box(bb, static_cast<int>(std::ceil(longest / spacing))).boundary;
  });
  return d;
}

}  // namespace

Domain::Domain(std::string name, int dim, Box bounding_box, Oracle distance, bool is_simple, bool bounded)
    : name_(std::move(name)),
      dim_(dim),
      bbox_(std::move(bounding_box)),
      oracle_(std::move(distance)),
      is_simple_(is_simple),
      bounded_(bounded) {
  if (dim < 2 || dim > 3) throw DimensionError("domain dimension must be 2 or 3");
}

Domain& Domain::with_box_minimum(BoxMinimum rule) {
  box_min_ = std::move(rule);
  return *this;
}

Domain& Domain::with_concave_oracle() {
  concave_ = true;
  return *this;
}

Domain& Domain::with_boundary_sampler(BoundarySampler sampler) {
  sampler_ = std::move(sampler);
  return *this;
}

double Domain::min_over_box(const Box& box, double* error_bound) const {
  if (error_bound) *error_bound = 0.0;
  if (box_min_) return box_min_(box);
  if (concave_) {
    double best = kInf;
    for (const Point& c : box.corners()) best = std::min(best, oracle_(c));
    return best;
  }
  // The minimum of a distance-to-complement over a box inside the domain is
  // attained on the box boundary; sample the faces.
  constexpr int kFaceSubdivisions = 64;
  const SampledBody faces = sample_box(box, kFaceSubdivisions);
  double best = kInf;
  for (const Point& p : faces.boundary) best = std::min(best, oracle_(p));
  if (error_bound) *error_bound = faces.resolution * std::sqrt(static_cast<double>(dim_ - 1)) / 2.0;
  return best;
}

std::vector<Point> Domain::boundary_samples(double spacing) const {
  if (!sampler_) throw Error("domain '" + name_ + "' has no boundary sampler");
  return sampler_(spacing);
}

bool contains_ball(const Domain& domain, const Ball& ball) {
  return domain.distance_to_complement(ball.center) > ball.radius;
}

double embedding_coefficient(const Domain& domain, const Ball& ball) {
  if (!contains_ball(domain, ball)) {
    throw ContainmentViolation("closed ball is not inside domain '" + domain.name() + "'");
  }
  const double d = domain.distance_to_complement(ball.center);
  if (std::isinf(d)) return kInf;
  const double k = d / ball.radius;
  if (!(k > 1.0)) throw InconsistentOracle("embedding coefficient <= 1 for a contained ball");
  return k;
}

Domain transformed(const Domain& domain, const Similarity& s) {
  std::vector<Point> corners;
  for (const Point& c : domain.bounding_box().corners()) corners.push_back(s.apply(c));
  Box bb{corners.front(), corners.front()};
  for (const Point& c : corners) {
    for (int i = 0; i < c.dim(); ++i) {
      bb.lo[i] = std::min(bb.lo[i], c[i]);
      bb.hi[i] = std::max(bb.hi[i], c[i]);
    }
  }
  Domain out(domain.name() + "*", domain.dim(), bb,
             [domain, s](const Point& p) { return s.scale * domain.distance_to_complement(s.apply_inverse(p)); },
             domain.is_simple(), domain.bounded());
  if (domain.concave()) out.with_concave_oracle();
  out.with_boundary_sampler([domain, s](double spacing) {
    std::vector<Point> pts = domain.boundary_samples(spacing / s.scale);
    for (auto& p : pts) p = s.apply(p);
    return pts;
  });
  return out;
}

namespace domains {

Domain box(const Point& lo, const Point& hi, std::string name) { return make_box(lo, hi, std::move(name)); }

Domain square() { return make_box(Point(0, 0), Point(1, 1), "square"); }

Domain cube() { return make_box(Point(0, 0, 0), Point(1, 1, 1), "cube"); }

Domain l_shape() {
  const Point a_lo(0, 0), a_hi(0.5, 1);
  const Point b_lo(0.5, 0), b_hi(1, 0.5);
  const Point q_lo(0.5, 0.5), q_hi(1, 1);
  const Point s_lo(0, 0), s_hi(1, 1);
  Domain d("l-shape", 2, Box{s_lo, s_hi}, [=](const Point& p) {
    const double out = std::min(point_box_distance(p, a_lo, a_hi), point_box_distance(p, b_lo, b_hi));
    if (out > 0.0) return -out;
    return std::min(box_signed_distance(p, s_lo, s_hi), point_box_distance(p, q_lo, q_hi));
  });
  // Complement = (outside of square) u (notch); the distance to a union is the
  // min of the distances, and each part has an exact box minimum. The value is
  // exact for boxes inside the closed domain and non-positive otherwise.
  d.with_box_minimum([=](const Box& c) {
    double corner_min = kInf;
    for (const Point& v : c.corners()) corner_min = std::min(corner_min, box_signed_distance(v, s_lo, s_hi));
    return std::min(corner_min, box_box_distance(c, q_lo, q_hi));
  });
  d.with_boundary_sampler([](double spacing) {
    return sample_polyline({Point(0, 0), Point(1, 0), Point(1, 0.5), Point(0.5, 0.5), Point(0.5, 1), Point(0, 1)},
                           spacing);
  });
  return d;
}

Domain stadium(const Point& a, const Point& b, double radius) {
  if (a.dim() != 2 || b.dim() != 2) throw DimensionError("stadium is a planar domain");
  Box bb{Point(std::min(a[0], b[0]) - radius, std::min(a[1], b[1]) - radius),
         Point(std::max(a[0], b[0]) + radius, std::max(a[1], b[1]) + radius)};
  Domain d("stadium", 2, bb, [a, b, radius](const Point& p) { return radius - segment_distance(p, a, b); });
  d.with_concave_oracle();
  d.with_boundary_sampler([a, b, radius](double spacing) {
    const Point ab = b - a;
    const double len = norm(ab);
    const Point u = len > 0 ? ab * (1.0 / len) : Point(1, 0);
    const Point nrm(-u[1], u[0]);
    std::vector<Point> pts;
    const int m = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int k = 0; k < m; ++k) {
      const double t = static_cast<double>(k) / m;
      pts.push_back(a + t * ab - radius * nrm);
      pts.push_back(b - t * ab + radius * nrm);
    }
    const int arc = std::max(4, static_cast<int>(std::ceil(std::numbers::pi * radius / spacing)));
    const double base = std::atan2(nrm[1], nrm[0]);
    for (int k = 0; k <= arc; ++k) {
      const double t = base + std::numbers::pi * k / arc;
      pts.push_back(a + radius * Point(std::cos(t), std::sin(t)));
      pts.push_back(b - radius * Point(std::cos(t), std::sin(t)));
    }
    return pts;
  });
  return d;
}

Domain ball(const Point& center, double radius) {
  const int n = center.dim();
  Box bb{center - Point::filled(n, radius), center + Point::filled(n, radius)};
  Domain d(n == 2 ? "disk" : "ball", n, bb,
           [center, radius](const Point& p) { return radius - distance(p, center); });
  d.with_concave_oracle();
  d.with_boundary_sampler([center, radius](double spacing) {
    return sample_ball(Ball{center, radius}, spacing).boundary;
  });
  return d;
}

Domain disk() { return ball(Point(0, 0), 1.0); }

Domain unit_ball3() { return ball(Point(0, 0, 0), 1.0); }

Domain empty(int dim) {
  Domain d("empty", dim, Box{Point::zero(dim), Point::filled(dim, 1.0)}, [](const Point&) { return -kInf; });
  d.with_concave_oracle();
  d.with_boundary_sampler([](double) { return std::vector<Point>{}; });
  return d;
}

Domain whole_space(int dim) {
  Domain d("whole-space", dim, Box{Point::filled(dim, -kInf), Point::filled(dim, kInf)},
           [](const Point&) { return kInf; }, /*is_simple=*/false, /*bounded=*/false);
  d.with_concave_oracle();
  return d;
}

Domain by_name(const std::string& name) {
  if (name == "square") return square();
  if (name == "cube") return cube();
  if (name == "l-shape") return l_shape();
  if (name == "stadium") return stadium(Point(0.25, 0.5), Point(0.75, 0.5), 0.25);
  if (name == "disk") return disk();
  if (name == "ball") return unit_ball3();
  if (name == "empty") return empty(2);
  throw ConfigError("unknown domain '" + name + "'");
}

std::vector<std::string> catalog_names() { return {"square", "cube", "l-shape", "stadium", "disk", "ball", "empty"}; }

}  // namespace domains

}  // namespace qcw
