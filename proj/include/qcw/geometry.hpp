#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace qcw {

class Domain;

inline constexpr std::uint64_t kDefaultSeed = 0x5eed'2024ULL;

/// Point of R^n for n in {2, 3}. Coordinates beyond dim() are kept at zero.
class Point {
 public:
  static constexpr int kMaxDim = 3;

  Point() = default;
  explicit Point(int dim);
  Point(double x, double y) : c_{x, y, 0.0}, dim_(2) {}
  Point(double x, double y, double z) : c_{x, y, z}, dim_(3) {}

  static Point zero(int dim) { return Point(dim); }
  /// Point with the same value in every coordinate.
  static Point filled(int dim, double v);

  int dim() const { return dim_; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

  bool is_finite() const;

  Point& operator+=(const Point& o);
  Point& operator-=(const Point& o);
  Point& operator*=(double s);

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend bool operator==(const Point& a, const Point& b) = default;

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 2;
};

double dot(const Point& a, const Point& b);
double norm(const Point& a);
double squared_distance(const Point& a, const Point& b);
double distance(const Point& a, const Point& b);

struct Ball {
  Point center;
  double radius = 0.0;

  bool contains(const Point& p, double rel_eps = 1e-12) const;
};

/// Closed axis-aligned box [lo, hi].
struct Box {
  Point lo;
  Point hi;

  int dim() const { return lo.dim(); }
  Point center() const { return 0.5 * (lo + hi); }
  double diameter() const { return distance(lo, hi); }
  bool empty() const;
  std::vector<Point> corners() const;
};

/// x -> scale * R x + shift with R a rotation.
struct Similarity {
  double scale = 1.0;
  std::array<std::array<double, 3>, 3> rotation{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  Point shift;

  /// Rotation by `angle` in the (x, y) plane; z is left fixed in 3-D.
  static Similarity planar(int dim, double scale, double angle, const Point& shift);
  /// Rotation about a unit axis (3-D only).
  static Similarity axis_angle(double scale, const Point& axis, double angle, const Point& shift);

  Point apply(const Point& p) const;
  Point apply_inverse(const Point& p) const;
};

/// A closed set known through boundary and interior samples. `resolution` is
/// the largest gap between neighbouring boundary samples.
struct SampledBody {
  std::vector<Point> boundary;
  std::vector<Point> interior;
  double resolution = 0.0;

  int dim() const { return boundary.empty() ? 2 : boundary.front().dim(); }
};

struct BodyMetrics {
  double inradius = 0.0;
  double circumradius = 0.0;
  double diameter = 0.0;
  double dilatation = 1.0;
};

/// Largest pairwise distance between boundary samples.
double diameter(const SampledBody& body);

/// Smallest ball enclosing the points; exact for n <= 3 (randomized
/// incremental construction with a fixed seed).
Ball min_enclosing_ball(std::span<const Point> points, std::uint64_t seed = kDefaultSeed);

/// Smallest enclosing ball of the boundary samples.
Ball exterior_ball(const SampledBody& body, std::uint64_t seed = kDefaultSeed);

/// Max over interior samples of the distance to the nearest boundary sample.
double interior_radius(const SampledBody& body);

/// dist(body, complement of domain) through the domain oracle.
double set_distance(const SampledBody& body, const Domain& domain);

BodyMetrics body_metrics(const SampledBody& body, std::uint64_t seed = kDefaultSeed);

// Sample builders.

/// Cube [lo, lo + side]^n with `subdivisions` intervals per edge: vertices,
/// uniform face grids and a strictly interior grid. `subdivisions` is rounded
/// up to an even number so face centres and the cube centre are samples.
SampledBody sample_cube(const Point& lo, double side, int subdivisions);

/// Closed box with `subdivisions` intervals along its longest edge.
SampledBody sample_box(const Box& box, int subdivisions);

/// Closed ball: boundary samples on the sphere with spacing about
/// `spacing`, interior samples on a grid of the same spacing plus the centre.
SampledBody sample_ball(const Ball& ball, double spacing);

SampledBody transformed(const SampledBody& body, const Similarity& s);

}  // namespace qcw
