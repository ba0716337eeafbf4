#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "qcw/errors.hpp"
#include "qcw/whitney.hpp"

using namespace qcw;

namespace {

// Distance from the closed axis-aligned square [lo, lo+s]^2 inside (0,1)^2 to
// the complement of (0,1)^2.
double unit_square_cell_distance(double x, double y, double s) {
  return std::min({x, y, 1.0 - (x + s), 1.0 - (y + s)});
}

// Every dyadic cell of (0,1)^2 of level <= L that satisfies the two-sided rule
// and whose ancestors all had dist < diam.
std::set<std::pair<int, std::pair<long, long>>> quadtree_oracle(int L) {
  std::set<std::pair<int, std::pair<long, long>>> out;
  for (int level = 0; level <= L; ++level) {
    const long k = 1L << level;
    const double s = 1.0 / static_cast<double>(k);
    for (long i = 0; i < k; ++i) {
      for (long j = 0; j < k; ++j) {
        const double diam = s * std::sqrt(2.0);
        const double d = unit_square_cell_distance(i * s, j * s, s);
        if (!(diam <= d && d <= 4.0 * diam)) continue;
        bool ancestors_split = true;
        for (int up = 1; up <= level && ancestors_split; ++up) {
          const double as = s * static_cast<double>(1L << up);
          const double ad = unit_square_cell_distance((i >> up) * as, (j >> up) * as, as);
          ancestors_split = ad < as * std::sqrt(2.0);
        }
        if (ancestors_split) out.insert({level, {i, j}});
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("unit square level 8: every cell satisfies the two-sided rule exactly") {
  const WhitneyFamily fam = whitney_decompose(domains::square(), 8);
  REQUIRE(fam.cells.size() > 1000);
  CHECK(fam.root_side == 1.0);
  int violations = 0;
  for (const DyadicCell& c : fam.cells) {
    const double s = fam.side(c.level);
    const double diam = s * std::sqrt(2.0);
    const double d = unit_square_cell_distance(c.index[0] * s, c.index[1] * s, s);
    const double ratio = diam / d;
    if (!(ratio >= 0.25 && ratio <= 1.0)) ++violations;
  }
  CHECK(violations == 0);
  CHECK(cells_interior_disjoint(fam.cells));
}

TEST_CASE("decomposition equals the exhaustive quadtree oracle") {
  for (int L : {3, 5, 6}) {
    const WhitneyFamily fam = whitney_decompose(domains::square(), L);
    std::set<std::pair<int, std::pair<long, long>>> got;
    for (const DyadicCell& c : fam.cells) got.insert({c.level, {static_cast<long>(c.index[0]), static_cast<long>(c.index[1])}});
    CHECK(got == quadtree_oracle(L));
  }
}

TEST_CASE("cells are sorted and disjoint; overlap is detected") {
  const WhitneyFamily fam = whitney_decompose(domains::l_shape(), 6);
  CHECK(std::is_sorted(fam.cells.begin(), fam.cells.end()));
  CHECK(cells_interior_disjoint(fam.cells));
  std::vector<DyadicCell> bad = {DyadicCell{1, {0, 0, 0}}, DyadicCell{2, {1, 1, 0}}};
  CHECK_FALSE(cells_interior_disjoint(bad));
  std::vector<DyadicCell> ok = {DyadicCell{1, {0, 0, 0}}, DyadicCell{2, {2, 0, 0}}};
  CHECK(cells_interior_disjoint(ok));
}

TEST_CASE("non-box domains: per-cell ratio within the rule") {
  for (const char* name : {"l-shape", "stadium", "disk"}) {
    const Domain d = domains::by_name(name);
    const WhitneyFamily fam = whitney_decompose(d, 7);
    REQUIRE_FALSE(fam.cells.empty());
    for (const DyadicCell& c : fam.cells) {
      const Box b = fam.cell_box(c);
      // Dense sampling gives an upper estimate of the box minimum.
      constexpr int m = 32;
      double dense = INFINITY;
      for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j)
          dense = std::min(dense, d.distance_to_complement(b.lo + Point((b.hi[0] - b.lo[0]) * i / m, (b.hi[1] - b.lo[1]) * j / m)));
      const double diam = fam.cell_diameter(c.level);
      const double step = (b.hi[0] - b.lo[0]) / m * std::sqrt(2.0);
      CHECK(dense >= diam - 1e-12);
      CHECK(dense - step <= 4.0 * diam + 1e-12);
    }
  }
}

TEST_CASE("family metrics at level 8 with the resolved margin") {
  const Domain sq = domains::square();
  const WhitneyFamily fam = whitney_decompose(sq, 8);
  MeasureOptions mo;
  mo.probe_margin = fam.resolved_margin();
  const auto bodies = fam.bodies();
  const FamilyMetrics m = measure_family(bodies, sq, mo);
  CHECK(m.cell_count == fam.cells.size());
  CHECK(m.min_ratio >= 0.25);
  CHECK(m.max_ratio <= 1.0);
  CHECK(m.max_interior_dilatation == doctest::Approx(std::sqrt(2.0)));
  CHECK(m.coverage_fraction >= 0.999);
  CHECK(m.probe_count > 100000);
  const WhitneyVerdict v = check_rough_whitney(m, 0.25, std::sqrt(2.0) * (1 + 1e-9));
  CHECK(v.pass);
}

TEST_CASE("measured ratios reproduce the analytic ones for a convex domain") {
  const Domain sq = domains::square();
  const WhitneyFamily fam = whitney_decompose(sq, 6);
  const auto bodies = fam.bodies();
  const FamilyMetrics m = measure_family(bodies, sq, MeasureOptions{.probe_margin = fam.resolved_margin()});
  for (std::size_t i = 0; i < fam.cells.size(); ++i) {
    const DyadicCell& c = fam.cells[i];
    const double s = fam.side(c.level);
    const double exact = fam.cell_diameter(c.level) / unit_square_cell_distance(c.index[0] * s, c.index[1] * s, s);
    CHECK(m.bodies[i].ratio == doctest::Approx(exact).epsilon(2.0 * bodies[i].resolution));
  }
}

TEST_CASE("coverage is monotone in the family") {
  const Domain sq = domains::square();
  const WhitneyFamily fam = whitney_decompose(sq, 5);
  const auto bodies = fam.bodies();
  const std::vector<Point> probes = coverage_probes(sq, bodies.back().resolution, fam.resolved_margin());
  double previous = 0.0;
  for (std::size_t k : {bodies.size() / 4, bodies.size() / 2, bodies.size()}) {
    std::vector<SampledBody> part(bodies.begin(), bodies.begin() + static_cast<std::ptrdiff_t>(k));
    const FamilyMetrics m = measure_family(part, sq, MeasureOptions{.probes = probes});
    CHECK(m.coverage_fraction >= previous);
    previous = m.coverage_fraction;
  }
  CHECK(previous == doctest::Approx(1.0));
}

TEST_CASE("cube in 3-D: every cell has dilatation sqrt(3)") {
  const Domain cube = domains::cube();
  const WhitneyFamily fam = whitney_decompose(cube, 3);
  REQUIRE_FALSE(fam.cells.empty());
  const FamilyMetrics m = measure_family(fam.bodies(4), cube, MeasureOptions{.probe_margin = fam.resolved_margin()});
  for (const BodyRecord& b : m.bodies) CHECK(b.dilatation == doctest::Approx(std::sqrt(3.0)));
  CHECK(m.coverage_fraction >= 0.999);
}

TEST_CASE("degenerate inputs") {
  const WhitneyFamily e = whitney_decompose(domains::empty(2), 6);
  CHECK(e.cells.empty());
  const FamilyMetrics m = measure_family(e.bodies(), domains::empty(2));
  CHECK(m.cell_count == 0);
  CHECK(m.coverage_fraction == 1.0);
  CHECK_THROWS_AS(whitney_decompose(domains::square(), 0), ConfigError);
  CHECK_THROWS_AS(whitney_decompose(domains::whole_space(2), 3), ConfigError);
}

TEST_CASE("rough Whitney verdict names the violated clauses") {
  FamilyMetrics m;
  m.min_ratio = 0.1;
  m.max_ratio = 5.0;
  m.max_interior_dilatation = 3.0;
  m.coverage_fraction = 0.5;
  m.cell_count = 2;
  m.bodies = {BodyRecord{1.0, 10.0, 0.1, 3.0}, BodyRecord{5.0, 1.0, 5.0, 1.0}};
  const WhitneyVerdict v = check_rough_whitney(m, 0.25, 2.0);
  CHECK_FALSE(v.pass);
  std::set<WhitneyClause> clauses;
  for (const auto& c : v.violations) clauses.insert(c.clause);
  CHECK(clauses == std::set<WhitneyClause>{WhitneyClause::min_ratio, WhitneyClause::max_ratio,
                                           WhitneyClause::interior_dilatation, WhitneyClause::coverage});
  for (const auto& c : v.violations) {
    if (c.clause == WhitneyClause::min_ratio) CHECK(c.witnesses == std::vector<std::size_t>{0});
    if (c.clause == WhitneyClause::max_ratio) CHECK(c.witnesses == std::vector<std::size_t>{1});
  }
  CHECK_THROWS_AS(check_rough_whitney(m, 0.0, 2.0), ConfigError);
  CHECK_THROWS_AS(check_rough_whitney(m, 0.25, 0.5), ConfigError);
}
