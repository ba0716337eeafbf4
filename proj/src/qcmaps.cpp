#include "qcw/qcmaps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qcw/errors.hpp"

namespace qcw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Similarity compose_similarities(const Similarity& f, const Similarity& g) {
  Similarity s;
  s.scale = f.scale * g.scale;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double v = 0.0;
      for (int k = 0; k < 3; ++k) v += f.rotation[i][k] * g.rotation[k][j];
      s.rotation[i][j] = v;
    }
  }
  s.shift = f.apply(g.shift);
  return s;
}

QCMap from_similarity(std::string name, const Similarity& s, int n) {
  QCMap m;
  m.name = std::move(name);
  m.dim = n;
  m.declared_Q = 1.0;
  m.forward = [s](const Point& p) { return s.apply(p); };
  m.inverse = [s](const Point& p) { return s.apply_inverse(p); };
  m.similarity = s;
  m.ring_image = [s](const Ring& ring) -> std::optional<Ring> {
    return Ring{s.apply(ring.center), s.scale * ring.r, s.scale * ring.R};
  };
  m.anchor = Point::zero(n);
  return m;
}

double get(const maps::Params& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Point point_param(const maps::Params& params, const std::string& prefix, int n) {
  Point p(n);
  const char axes[3] = {'x', 'y', 'z'};
  for (int i = 0; i < n; ++i) p[i] = get(params, prefix + axes[i], 0.0);
  return p;
}

// Largest nearest-neighbour stretch over the boundary samples.
double boundary_stretch(const std::vector<Point>& src, const std::vector<Point>& img) {
  double worst = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    double best = kInf;
    std::size_t arg = i;
    for (std::size_t j = 0; j < src.size(); ++j) {
      if (j == i) continue;
      const double d2 = squared_distance(src[i], src[j]);
      if (d2 > 0.0 && d2 < best) {
        best = d2;
        arg = j;
      }
    }
    if (arg == i) continue;
    worst = std::max(worst, distance(img[i], img[arg]) / std::sqrt(best));
  }
  return worst;
}

Box bounding_box(std::span<const Point> pts) {
  Box b{pts.front(), pts.front()};
  for (const Point& p : pts) {
    for (int i = 0; i < p.dim(); ++i) {
      b.lo[i] = std::min(b.lo[i], p[i]);
      b.hi[i] = std::max(b.hi[i], p[i]);
    }
  }
  return b;
}

Box inflate(Box b, double m) {
  for (int i = 0; i < b.dim(); ++i) {
    b.lo[i] -= m;
    b.hi[i] += m;
  }
  return b;
}

}  // namespace

namespace maps {

QCMap identity(int n) {
  QCMap m = from_similarity("identity", Similarity::planar(n, 1.0, 0.0, Point::zero(n)), n);
  m.forward = [](const Point& p) { return p; };
  m.inverse = [](const Point& p) { return p; };
  m.ring_image = [](const Ring& ring) -> std::optional<Ring> { return ring; };
  return m;
}

QCMap similarity(const Similarity& s) {
  if (!(s.scale > 0.0)) throw ConfigError("similarity scale must be positive");
  const int n = s.shift.dim();
  QCMap m = from_similarity("similarity", s, n);
  m.parameters = {{"scale", s.scale}};
  return m;
}

QCMap radial_stretch(int n, double a, const Point& center, double guard) {
  if (!(a > 0.0)) throw ConfigError("radial exponent a must be positive");
  if (center.dim() != n) throw DimensionError("radial centre has the wrong dimension");
  QCMap m;
  m.name = "radial";
  m.dim = n;
  m.declared_Q = std::pow(std::max(a, 1.0 / a), n - 1);
  const auto power = [center](double e) {
    return [center, e](const Point& p) {
      const Point v = p - center;
      const double rho = norm(v);
      if (rho == 0.0) return center;
      return center + std::pow(rho, e - 1.0) * v;
    };
  };
  m.forward = power(a);
  m.inverse = power(1.0 / a);
  m.defined = [center, guard](const Point& p) { return guard <= 0.0 || distance(p, center) > guard; };
  m.parameters = {{"a", a}, {"guard", guard}};
  m.ring_image = [center, a](const Ring& ring) -> std::optional<Ring> {
    if (!(ring.center == center)) return std::nullopt;
    const double r = std::pow(ring.r, a);
    const double R = std::pow(ring.R, a);
    return Ring{center, std::min(r, R), std::max(r, R)};
  };
  m.anchor = center;
  return m;
}

QCMap diagonal(const std::vector<double>& a) {
  const int n = static_cast<int>(a.size());
  if (n < 2 || n > 3) throw DimensionError("diagonal map needs 2 or 3 entries");
  for (double v : a) {
    if (!(v > 0.0)) throw ConfigError("diagonal entries must be positive");
  }
  const double prod = std::accumulate(a.begin(), a.end(), 1.0, std::multiplies<>());
  const double amax = *std::max_element(a.begin(), a.end());
  const double amin = *std::min_element(a.begin(), a.end());
  QCMap m;
  m.name = "diagonal";
  m.dim = n;
  m.declared_Q = std::max(std::pow(amax, n) / prod, prod / std::pow(amin, n));
  m.forward = [a](const Point& p) {
    Point q = p;
    for (std::size_t i = 0; i < a.size(); ++i) q[static_cast<int>(i)] *= a[i];
    return q;
  };
  m.inverse = [a](const Point& p) {
    Point q = p;
    for (std::size_t i = 0; i < a.size(); ++i) q[static_cast<int>(i)] /= a[i];
    return q;
  };
  for (int i = 0; i < n; ++i) m.parameters.emplace_back("a" + std::to_string(i + 1), a[static_cast<std::size_t>(i)]);
  if (amax == amin) {
    m.similarity = Similarity::planar(n, amax, 0.0, Point::zero(n));
    m.ring_image = [amax](const Ring& ring) -> std::optional<Ring> {
      Point c = ring.center * amax;
      return Ring{c, amax * ring.r, amax * ring.R};
    };
  } else {
    m.ring_image = [](const Ring&) -> std::optional<Ring> { return std::nullopt; };
  }
  m.anchor = Point::zero(n);
  return m;
}

QCMap fold(int n, double angle, double offset) {
  if (!(std::abs(angle) < std::numbers::pi / 2)) throw ConfigError("fold angle must lie in (-pi/2, pi/2)");
  const double k = std::tan(angle);
  const double sigma = (std::abs(k) + std::sqrt(k * k + 4.0)) / 2.0;
  QCMap m;
  m.name = "fold";
  m.dim = n;
  m.declared_Q = std::pow(sigma, n);
  m.forward = [k, offset](const Point& p) {
    Point q = p;
    q[1] += k * std::max(p[0] - offset, 0.0);
    return q;
  };
  m.inverse = [k, offset](const Point& p) {
    Point q = p;
    q[1] -= k * std::max(p[0] - offset, 0.0);
    return q;
  };
  m.parameters = {{"angle", angle}, {"offset", offset}};
  m.ring_image = [k](const Ring& ring) -> std::optional<Ring> {
    if (k == 0.0) return ring;
    return std::nullopt;
  };
  Point anchor(n);
  anchor[0] = offset;
  m.anchor = anchor;
  return m;
}

QCMap compose(const QCMap& f, const QCMap& g) {
  if (f.dim != g.dim) throw DimensionError("composed maps differ in dimension");
  QCMap m;
  m.name = f.name + "*" + g.name;
  m.dim = f.dim;
  m.declared_Q = f.declared_Q * g.declared_Q;
  m.forward = [f, g](const Point& p) { return f.forward(g.forward(p)); };
  m.inverse = [f, g](const Point& p) { return g.inverse(f.inverse(p)); };
  m.defined = [f, g](const Point& p) { return g.defined_at(p) && f.defined_at(g.forward(p)); };
  m.parameters = g.parameters;
  m.parameters.insert(m.parameters.end(), f.parameters.begin(), f.parameters.end());
  if (f.similarity && g.similarity) m.similarity = compose_similarities(*f.similarity, *g.similarity);
  m.ring_image = [f, g](const Ring& ring) -> std::optional<Ring> {
    if (!g.ring_image || !f.ring_image) return std::nullopt;
    const auto mid = g.ring_image(ring);
    if (!mid) return std::nullopt;
    return f.ring_image(*mid);
  };
  m.anchor = g.anchor;
  return m;
}

QCMap by_name(const std::string& name, int n, const Params& params) {
  if (n < 2 || n > 3) throw DimensionError("maps are defined for n = 2 or 3");
  if (name == "identity") return identity(n);
  if (name == "similarity") {
    const double scale = get(params, "scale", 2.0);
    const double angle = get(params, "angle", 0.0);
    return similarity(Similarity::planar(n, scale, angle, point_param(params, "t", n)));
  }
  if (name == "radial") {
    return radial_stretch(n, get(params, "a", 2.0), point_param(params, "c", n), get(params, "guard", 1e-2));
  }
  if (name == "diagonal") {
    std::vector<double> a;
    for (int i = 0; i < n; ++i) a.push_back(get(params, "a" + std::to_string(i + 1), i == 0 ? 2.0 : 1.0));
    return diagonal(a);
  }
  if (name == "fold") return fold(n, get(params, "angle", std::numbers::pi / 6), get(params, "offset", 0.0));
  throw ConfigError("unknown map '" + name + "'");
}

std::vector<std::string> catalog_names() { return {"identity", "similarity", "radial", "diagonal", "fold"}; }

Params parse_params(const std::string& text) {
  Params out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("map parameter '" + item + "' is not name=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw ConfigError("map parameter '" + key + "' is not a number");
    out[key] = v;
  }
  return out;
}

}  // namespace maps

SampledBody apply_map(const QCMap& map, const SampledBody& body) {
  SampledBody out;
  const auto image = [&map](const std::vector<Point>& pts, std::vector<Point>& dst) {
    dst.reserve(pts.size());
    for (const Point& p : pts) {
      if (!map.defined_at(p)) throw DomainViolation("map '" + map.name + "' is undefined at a sample");
      dst.push_back(map.forward(p));
    }
  };
  image(body.boundary, out.boundary);
  image(body.interior, out.interior);
  if (map.similarity) {
    out.resolution = body.resolution * map.similarity->scale;
  } else {
    const double stretch = boundary_stretch(body.boundary, out.boundary);
    out.resolution = body.resolution * (stretch > 0.0 ? stretch : 1.0);
  }
  return out;
}

std::vector<Ring> standard_ring_suite(const QCMap& map) {
  const int n = map.dim;
  const Point c = map.anchor;
  const auto off = [&](double x, double y) {
    Point p(n);
    p[0] = x;
    p[1] = y;
    return c + p;
  };
  return {Ring{c, 1.0, 2.0},          Ring{c, 1.0, 4.0},          Ring{c, 0.5, 1.0},
          Ring{c, 0.25, 2.0},         Ring{off(3.0, 0.0), 0.5, 1.0}, Ring{off(0.0, 3.0), 0.5, 1.0},
          Ring{off(-2.5, 2.5), 0.5, 1.0}, Ring{off(2.0, -2.0), 0.5, 1.0}};
}

namespace {

// Sphere samples whose images are no farther apart than `gap`.
std::vector<Point> mapped_sphere(const QCMap& map, const Ball& ball, double gap) {
  SampledBody s = sample_ball(ball, gap);
  SampledBody img = apply_map(map, SampledBody{s.boundary, {}, s.resolution});
  for (int pass = 0; pass < 4 && img.resolution > gap; ++pass) {
    s = sample_ball(ball, s.resolution * gap / img.resolution);
    img = apply_map(map, SampledBody{s.boundary, {}, s.resolution});
  }
  return img.boundary;
}

double image_inner_radius(const QCMap& map, const Ring& ring) {
  const Point y0 = map.forward(ring.center);
  double best = kInf;
  for (const Point& p : sample_ball(Ball{ring.center, ring.r}, ring.r / 16.0).boundary) {
    best = std::min(best, distance(map.forward(p), y0));
  }
  return best;
}

Condenser image_ring_condenser(const QCMap& map, const Ring& ring, double h) {
  const int n = map.dim;
  std::vector<Point> inner = mapped_sphere(map, Ball{ring.center, ring.r}, h / 4.0);
  std::vector<Point> outer = mapped_sphere(map, Ball{ring.center, ring.R}, h / 4.0);
  const Box box = inflate(bounding_box(outer), 4.0 * h);

  const auto pre_radius = [&](const Point& y) { return distance(map.inverse(y), ring.center); };
  SampledBody plate0 = sample_region([&](const Point& y) { return pre_radius(y) <= ring.r; },
                                     inflate(bounding_box(inner), h), h / 2.0);
  plate0.boundary.insert(plate0.boundary.end(), inner.begin(), inner.end());
  plate0.interior.push_back(map.forward(ring.center));
  SampledBody plate1 = sample_region([&](const Point& y) { return pre_radius(y) >= ring.R; }, box, h / 2.0);
  plate1.boundary.insert(plate1.boundary.end(), outer.begin(), outer.end());
  return Condenser{std::move(plate0), std::move(plate1), domains::whole_space(n)};
}

}  // namespace

EmpiricalQ empirical_Q(const QCMap& map, std::span<const Ring> rings, const EmpiricalQOptions& options) {
  EmpiricalQ out;
  for (std::size_t id = 0; id < rings.size(); ++id) {
    const Ring& ring = rings[id];
    if (ring.center.dim() != map.dim) throw DimensionError("ring and map differ in dimension");
    RingRatio rr;
    rr.ring = ring;
    const std::optional<Ring> exact = map.ring_image ? map.ring_image(ring) : std::nullopt;
    if (exact) {
      rr.exact = true;
      rr.source_capacity = ring_capacity_exact(ring.r, ring.R, map.dim);
      rr.image_capacity = ring_capacity_exact(exact->r, exact->R, map.dim);
    } else {
      const Ball outer{ring.center, ring.R};
      for (const Point& p : sample_ball(outer, ring.R / 64.0).boundary) {
        if (!map.defined_at(p)) {
          throw DomainViolation("ring " + std::to_string(id) + " meets the singular set of map '" + map.name + "'");
        }
      }
      double h = std::min(ring.r, image_inner_radius(map, ring)) / options.cells_per_radius;
      const int cap = map.dim == 2 ? options.max_cells_per_axis : std::min(options.max_cells_per_axis, 96);
      const std::vector<Point> outer_img = mapped_sphere(map, outer, ring.R / 16.0);
      const Box img_box = bounding_box(outer_img);
      double extent = 2.0 * ring.R;
      for (int i = 0; i < map.dim; ++i) extent = std::max(extent, img_box.hi[i] - img_box.lo[i]);
      h = std::max(h, extent / cap);

      SolverConfig cfg = options.solver;
      cfg.p = map.dim;
      cfg.h = h;
      try {
        rr.source_capacity = grid_capacity(ring_condenser(ring.center, ring.r, ring.R, h), cfg).value;
        rr.image_capacity = grid_capacity(image_ring_condenser(map, ring, h), cfg).value;
      } catch (const NonConvergence& e) {
        throw NonConvergence("ring " + std::to_string(id) + ": " + e.what(), e.last_estimate());
      }
    }
    rr.ratio = std::max(rr.source_capacity / rr.image_capacity, rr.image_capacity / rr.source_capacity);
    out.value = std::max(out.value, rr.ratio);
    out.rings.push_back(rr);
  }
  return out;
}

double quasiball_dilatation(const QCMap& map, const Ball& ball, const Domain& domain, double spacing) {
  if (!contains_ball(domain, ball)) throw ContainmentViolation("ball is not inside domain '" + domain.name() + "'");
  return body_metrics(apply_map(map, sample_ball(ball, spacing))).dilatation;
}

Domain image_domain(const Domain& source, const QCMap& map, double probe_spacing) {
  if (map.similarity) {
    Domain d = transformed(source, *map.similarity);
    return d;
  }
  if (!(probe_spacing > 0.0)) throw ConfigError("probe spacing must be positive");
  std::vector<Point> src = source.boundary_samples(probe_spacing);
  if (src.empty()) return domains::empty(source.dim());
  auto probes = std::make_shared<std::vector<Point>>();
  probes->reserve(src.size());
  for (const Point& p : src) {
    if (!map.defined_at(p)) throw DomainViolation("map '" + map.name + "' is undefined on the domain boundary");
    probes->push_back(map.forward(p));
  }
  const Box bb = bounding_box(*probes);

  const auto inside = [source, map](const Point& y) { return source.distance_to_complement(map.inverse(y)) > 0.0; };
  const auto oracle = [probes, inside](const Point& y) -> double {
    constexpr std::size_t kNearest = 4;
    constexpr int kMarch = 32;
    constexpr double kReach = 2.0;
    const bool s0 = inside(y);
    std::vector<std::pair<double, std::size_t>> near;
    near.reserve(probes->size());
    for (std::size_t i = 0; i < probes->size(); ++i) near.emplace_back(squared_distance(y, (*probes)[i]), i);
    const std::size_t k = std::min(kNearest, near.size());
    std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(k), near.end());
    double best = std::sqrt(near.front().first);
    if (best == 0.0) return 0.0;

    // Targets: the nearest probes, then feet of y on chords between them.
    std::vector<std::pair<Point, bool>> targets;
    for (std::size_t q = 0; q < k; ++q) targets.emplace_back((*probes)[near[q].second], true);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        const Point& pa = (*probes)[near[a].second];
        const Point& pb = (*probes)[near[b].second];
        const Point ab = pb - pa;
        const double l2 = dot(ab, ab);
        if (l2 == 0.0) continue;
        const double t = dot(y - pa, ab) / l2;
        if (t > 0.0 && t < 1.0) targets.emplace_back(pa + t * ab, false);
      }
    }
    // Each ray ends at its first status change, which is a boundary point.
    for (const auto& [target, is_probe] : targets) {
      const Point dir = target - y;
      const double len = norm(dir);
      if (len == 0.0) {
        if (is_probe) return 0.0;
        continue;
      }
      double lo = 0.0;
      double hi = -1.0;
      for (int step = 1; step <= kMarch; ++step) {
        const double t = kReach * step / kMarch;
        if (inside(y + t * dir) != s0) {
          hi = t;
          break;
        }
        lo = t;
      }
      if (hi < 0.0) {
        if (is_probe) best = std::min(best, len);
        continue;
      }
      const double tol = 1e-7 / len;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (inside(y + mid * dir) != s0 ? hi : lo) = mid;
      }
      best = std::min(best, hi * len);
    }
    return s0 ? best : -best;
  };
  Domain out(source.name() + "'", source.dim(), bb, oracle, source.is_simple(), source.bounded());
  out.with_boundary_sampler([source, map](double spacing) {
    std::vector<Point> pts = source.boundary_samples(spacing);
    for (Point& p : pts) p = map.forward(p);
    return pts;
  });
  return out;
}

}  // namespace qcw
