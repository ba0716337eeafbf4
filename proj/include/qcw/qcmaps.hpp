#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcw/capacity.hpp"
#include "qcw/domains.hpp"
#include "qcw/geometry.hpp"

namespace qcw {

/// Closed ball B(center, r) against the complement of B(center, R).
struct Ring {
  Point center;
  double r = 1.0;
  double R = 2.0;
};

struct QCMap {
  std::string name;
  int dim = 2;
  double declared_Q = 1.0;
  std::function<Point(const Point&)> forward;
  std::function<Point(const Point&)> inverse;
  /// Domain of definition; everywhere when unset.
  std::function<bool(const Point&)> defined;
  std::vector<std::pair<std::string, double>> parameters;
  /// Set when the map is a similarity; image distances are then exact.
  std::optional<Similarity> similarity;
  /// Exact image of a ring when it is again a ring.
  std::function<std::optional<Ring>(const Ring&)> ring_image;
  /// Centre of the standard ring suite.
  Point anchor;

  Point operator()(const Point& p) const { return forward(p); }
  bool defined_at(const Point& p) const { return !defined || defined(p); }
};

namespace maps {

QCMap identity(int n);
QCMap similarity(const Similarity& s);
/// x -> c + |x - c|^{a-1} (x - c); undefined within `guard` of c; a guard of 0 keeps the fixed centre.
QCMap radial_stretch(int n, double a, const Point& center, double guard = 1e-2);
/// x -> diag(a) x.
QCMap diagonal(const std::vector<double>& a);
/// Identity for x1 < offset; shear x2 += tan(angle) (x1 - offset) beyond.
QCMap fold(int n, double angle, double offset = 0.0);
/// x -> f(g(x)).
QCMap compose(const QCMap& f, const QCMap& g);

using Params = std::map<std::string, double>;

/// Catalog lookup. Recognized keys: similarity {scale, angle, tx, ty, tz};
/// radial {a, cx, cy, cz, guard}; diagonal {a1, a2, a3}; fold {angle, offset}.
QCMap by_name(const std::string& name, int n, const Params& params = {});
std::vector<std::string> catalog_names();
/// name=value pairs separated by commas.
Params parse_params(const std::string& text);

}  // namespace maps

/// Image of every sample. The resolution grows by the largest observed ratio
/// between an image nearest-neighbour gap and the source gap.
SampledBody apply_map(const QCMap& map, const SampledBody& body);

/// Four rings about the anchor and four offset rings clear of it.
std::vector<Ring> standard_ring_suite(const QCMap& map);

struct EmpiricalQOptions {
  SolverConfig solver;
  /// Grid cells across the smaller inner radius of source and image.
  int cells_per_radius = 16;
  /// Upper bound on grid cells along one axis.
  int max_cells_per_axis = 1024;
};

struct RingRatio {
  Ring ring;
  double source_capacity = 0.0;
  double image_capacity = 0.0;
  /// max(Cap/Cap', Cap'/Cap)
  double ratio = 1.0;
  bool exact = false;
};

struct EmpiricalQ {
  double value = 1.0;
  std::vector<RingRatio> rings;
};

/// Largest capacity distortion over the rings, with p = n. Rings whose image
/// is again a ring use the exact formula; others solve source and image on a
/// grid of the same size. Solver failures are rethrown naming the ring.
EmpiricalQ empirical_Q(const QCMap& map, std::span<const Ring> rings, const EmpiricalQOptions& options = {});

/// Interior dilatation of the image of the sampled closed ball.
double quasiball_dilatation(const QCMap& map, const Ball& ball, const Domain& domain, double spacing);

/// Image domain map(source). Similarities transform the oracle exactly.
/// Otherwise the sign comes from the source oracle at the preimage and the
/// distance from mapped boundary probes (spacing in the source), refined by
/// ray searches with bisection toward the nearest probes and chords between them.
Domain image_domain(const Domain& source, const QCMap& map, double probe_spacing);

}  // namespace qcw
