#include "qcw/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "qcw/errors.hpp"

namespace qcw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Probe buckets beyond this count trigger a coarser bucket size.
constexpr std::size_t kMaxBuckets = std::size_t{1} << 24;
constexpr std::size_t kMaxProbes = 4'000'000;

// Uniform bucket grid over a point set, stored in compressed rows.
class PointBuckets {
 public:
  PointBuckets(std::span<const Point> points, double bucket) : points_(points) {
    if (points.empty()) return;
    dim_ = points.front().dim();
    lo_ = points.front();
    Point hi = lo_;
    for (const Point& p : points) {
      for (int i = 0; i < dim_; ++i) {
        lo_[i] = std::min(lo_[i], p[i]);
        hi[i] = std::max(hi[i], p[i]);
      }
    }
    size_ = bucket;
    for (;;) {
      std::size_t total = 1;
      for (int i = 0; i < dim_; ++i) {
        dims_[i] = static_cast<std::int64_t>(std::floor((hi[i] - lo_[i]) / size_)) + 1;
        total *= static_cast<std::size_t>(dims_[i]);
      }
      if (total <= kMaxBuckets) break;
      size_ *= 2.0;
    }
    std::size_t total = 1;
    for (int i = 0; i < dim_; ++i) total *= static_cast<std::size_t>(dims_[i]);
    start_.assign(total + 1, 0);
    std::vector<std::size_t> key(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
      key[k] = flat(coords(points[k]));
      ++start_[key[k] + 1];
    }
    for (std::size_t b = 0; b < total; ++b) start_[b + 1] += start_[b];
    items_.resize(points.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t k = 0; k < points.size(); ++k) items_[fill[key[k]]++] = k;
  }

  // Calls f(index) for every point within `radius` of q.
  template <class F>
  void for_each_near(const Point& q, double radius, F&& f) const {
    if (points_.empty()) return;
    std::array<std::int64_t, 3> a{0, 0, 0}, b{0, 0, 0};
    for (int i = 0; i < dim_; ++i) {
      a[i] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((q[i] - radius - lo_[i]) / size_)));
      b[i] = std::min<std::int64_t>(dims_[i] - 1,
                                    static_cast<std::int64_t>(std::floor((q[i] + radius - lo_[i]) / size_)));
      if (a[i] > b[i]) return;
    }
    const double r2 = radius * radius;
    for (std::int64_t z = a[2]; z <= b[2]; ++z) {
      for (std::int64_t y = a[1]; y <= b[1]; ++y) {
        for (std::int64_t x = a[0]; x <= b[0]; ++x) {
          const std::size_t key = flat({x, y, z});
          for (std::size_t s = start_[key]; s < start_[key + 1]; ++s) {
            const std::size_t k = items_[s];
            if (squared_distance(points_[k], q) <= r2) f(k);
          }
        }
      }
    }
  }

 private:
  std::array<std::int64_t, 3> coords(const Point& p) const {
    std::array<std::int64_t, 3> c{0, 0, 0};
    for (int i = 0; i < dim_; ++i) {
      c[i] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((p[i] - lo_[i]) / size_)), 0,
                                      dims_[i] - 1);
    }
    return c;
  }
  std::size_t flat(const std::array<std::int64_t, 3>& c) const {
    return static_cast<std::size_t>((c[2] * dims_[1] + c[1]) * dims_[0] + c[0]);
  }

  std::span<const Point> points_;
  int dim_ = 2;
  Point lo_;
  double size_ = 1.0;
  std::array<std::int64_t, 3> dims_{1, 1, 1};
  std::vector<std::size_t> start_;
  std::vector<std::size_t> items_;
};

}  // namespace

double WhitneyFamily::side(int level) const { return std::ldexp(root_side, -level); }

double WhitneyFamily::cell_diameter(int level) const { return side(level) * std::sqrt(static_cast<double>(dim)); }

Box WhitneyFamily::cell_box(const DyadicCell& cell) const {
  const double s = side(cell.level);
  Point lo(dim);
  Point hi(dim);
  for (int i = 0; i < dim; ++i) {
    lo[i] = root_lo[i] + s * static_cast<double>(cell.index[static_cast<std::size_t>(i)]);
    hi[i] = root_lo[i] + s * static_cast<double>(cell.index[static_cast<std::size_t>(i)] + 1);
  }
  return Box{lo, hi};
}

Ball WhitneyFamily::inscribed_ball(const DyadicCell& cell) const {
  return Ball{cell_box(cell).center(), side(cell.level) / 2.0};
}

SampledBody WhitneyFamily::cell_body(const DyadicCell& cell, int subdivisions) const {
  return sample_box(cell_box(cell), subdivisions);
}

std::vector<SampledBody> WhitneyFamily::bodies(int subdivisions) const {
  std::vector<SampledBody> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(cell_body(c, subdivisions));
  return out;
}

double WhitneyFamily::resolved_margin() const { return 2.0 * cell_diameter(max_level); }

WhitneyFamily whitney_decompose(const Domain& domain, int max_level) {
  if (max_level < 1) throw ConfigError("max_level must be at least 1");
  if (!domain.bounded()) throw ConfigError("Whitney decomposition needs a bounded domain");

  WhitneyFamily fam;
  fam.domain_name = domain.name();
  fam.dim = domain.dim();
  fam.max_level = max_level;
  const Box& bb = domain.bounding_box();
  fam.root_lo = bb.lo;
  double extent = 0.0;
  for (int i = 0; i < fam.dim; ++i) extent = std::max(extent, bb.hi[i] - bb.lo[i]);
  if (!(extent > 0.0) || !std::isfinite(extent)) return fam;
  fam.root_side = extent;

  std::vector<DyadicCell> stack{DyadicCell{}};
  while (!stack.empty()) {
    const DyadicCell cell = stack.back();
    stack.pop_back();
    const Box box = fam.cell_box(cell);
    const double diam = fam.cell_diameter(cell.level);

    // Entirely inside the complement.
    if (domain.distance_to_complement(box.center()) <= -diam / 2.0) continue;

    double err = 0.0;
    const double upper = domain.min_over_box(box, &err);
    const double lower = upper - err;
    if (lower >= diam && upper <= 4.0 * diam) {
      fam.cells.push_back(cell);
    } else if (lower < diam && cell.level < max_level) {
      for (int child = 0; child < (1 << fam.dim); ++child) {
        DyadicCell c{cell.level + 1, {0, 0, 0}};
        for (int i = 0; i < fam.dim; ++i) {
          c.index[static_cast<std::size_t>(i)] = 2 * cell.index[static_cast<std::size_t>(i)] + ((child >> i) & 1);
        }
        stack.push_back(c);
      }
    }
  }
  std::sort(fam.cells.begin(), fam.cells.end());
  return fam;
}

bool cells_interior_disjoint(std::span<const DyadicCell> cells) {
  std::set<DyadicCell> seen(cells.begin(), cells.end());
  if (seen.size() != cells.size()) return false;
  for (const auto& c : cells) {
    DyadicCell up = c;
    while (up.level > 0) {
      --up.level;
      for (auto& v : up.index) v >>= 1;
      if (seen.count(up)) return false;
    }
  }
  return true;
}

std::vector<Point> coverage_probes(const Domain& domain, double spacing, double margin) {
  const Box& bb = domain.bounding_box();
  const int n = domain.dim();
  std::vector<Point> probes;
  if (bb.empty() || !(spacing > 0.0)) return probes;
  std::array<std::int64_t, 3> counts{1, 1, 1};
  for (int i = 0; i < n; ++i) {
    counts[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor((bb.hi[i] - bb.lo[i]) / spacing));
  }
  for (std::int64_t k = 0; k < counts[2]; ++k) {
    for (std::int64_t j = 0; j < counts[1]; ++j) {
      for (std::int64_t i = 0; i < counts[0]; ++i) {
        Point p(n);
        p[0] = bb.lo[0] + (static_cast<double>(i) + 0.5) * spacing;
        p[1] = bb.lo[1] + (static_cast<double>(j) + 0.5) * spacing;
        if (n == 3) p[2] = bb.lo[2] + (static_cast<double>(k) + 0.5) * spacing;
        const double d = domain.distance_to_complement(p);
        if (d > 0.0 && d >= margin) probes.push_back(p);
      }
    }
  }
  return probes;
}

FamilyMetrics measure_family(std::span<const SampledBody> family, const Domain& domain,
                             const MeasureOptions& options) {
  FamilyMetrics m;
  m.cell_count = family.size();
  m.min_ratio = kInf;
  m.max_ratio = 0.0;
  m.max_interior_dilatation = 1.0;
  double finest = kInf;
  m.bodies.reserve(family.size());
  for (const SampledBody& body : family) {
    const BodyMetrics bm = body_metrics(body, options.seed);
    BodyRecord rec;
    rec.diameter = bm.diameter;
    rec.distance = set_distance(body, domain);
    rec.ratio = rec.distance > 0.0 ? rec.diameter / rec.distance : kInf;
    rec.dilatation = bm.dilatation;
    m.min_ratio = std::min(m.min_ratio, rec.ratio);
    m.max_ratio = std::max(m.max_ratio, rec.ratio);
    m.max_interior_dilatation = std::max(m.max_interior_dilatation, rec.dilatation);
    finest = std::min(finest, body.resolution);
    m.bodies.push_back(rec);
  }

  std::vector<Point> probes;
  if (options.probes) {
    probes = *options.probes;
  } else {
    const Box& bb = domain.bounding_box();
    double volume = 1.0;
    double extent = 0.0;
    for (int i = 0; i < domain.dim(); ++i) {
      volume *= bb.hi[i] - bb.lo[i];
      extent = std::max(extent, bb.hi[i] - bb.lo[i]);
    }
    double spacing = options.probe_spacing.value_or(std::isfinite(finest) ? finest : extent / 64.0);
    spacing = std::max(spacing, std::pow(volume / static_cast<double>(kMaxProbes), 1.0 / domain.dim()));
    probes = coverage_probes(domain, spacing, options.probe_margin);
  }
  m.probe_count = probes.size();
  if (probes.empty()) {
    m.coverage_fraction = 1.0;  // nothing to cover
    return m;
  }

  const double bucket = std::isfinite(finest) ? finest : 1.0;
  PointBuckets buckets(probes, bucket);
  std::vector<char> covered(probes.size(), 0);
  for (const SampledBody& body : family) {
    const auto mark = [&](std::size_t k) { covered[k] = 1; };
    for (const Point& s : body.boundary) buckets.for_each_near(s, body.resolution, mark);
    for (const Point& s : body.interior) buckets.for_each_near(s, body.resolution, mark);
  }
  const auto hit = std::count(covered.begin(), covered.end(), char{1});
  m.coverage_fraction = static_cast<double>(hit) / static_cast<double>(probes.size());
  return m;
}

WhitneyVerdict check_rough_whitney(const FamilyMetrics& metrics, double C, double K_bound, double probe_tolerance) {
  if (!(C > 0.0)) throw ConfigError("rough Whitney constant C must be positive");
  if (!(K_bound >= 1.0)) throw ConfigError("dilatation bound must be at least 1");
  WhitneyVerdict v;
  const auto witnesses = [&](auto pred) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < metrics.bodies.size(); ++i) {
      if (pred(metrics.bodies[i])) out.push_back(i);
    }
    return out;
  };
  if (metrics.min_ratio < C) {
    v.violations.push_back({WhitneyClause::min_ratio, metrics.min_ratio, C,
                            witnesses([&](const BodyRecord& b) { return b.ratio < C; })});
  }
  if (!(metrics.max_ratio <= 1.0 / C)) {
    v.violations.push_back({WhitneyClause::max_ratio, metrics.max_ratio, 1.0 / C,
                            witnesses([&](const BodyRecord& b) { return !(b.ratio <= 1.0 / C); })});
  }
  if (!(metrics.max_interior_dilatation <= K_bound)) {
    v.violations.push_back({WhitneyClause::interior_dilatation, metrics.max_interior_dilatation, K_bound,
                            witnesses([&](const BodyRecord& b) { return !(b.dilatation <= K_bound); })});
  }
  if (metrics.coverage_fraction < 1.0 - probe_tolerance) {
    v.violations.push_back({WhitneyClause::coverage, metrics.coverage_fraction, 1.0 - probe_tolerance, {}});
  }
  v.pass = v.violations.empty();
  return v;
}

std::string to_string(WhitneyClause clause) {
  switch (clause) {
    case WhitneyClause::min_ratio:
      return "min_ratio";
    case WhitneyClause::max_ratio:
      return "max_ratio";
    case WhitneyClause::interior_dilatation:
      return "interior_dilatation";
    case WhitneyClause::coverage:
      return "coverage";
  }
  return "unknown";
}

}  // namespace qcw
