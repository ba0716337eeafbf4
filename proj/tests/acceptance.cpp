// Acceptance run: one PASS/FAIL line per criterion; exit status 0 iff all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qcw/bounds.hpp"
#include "qcw/capacity.hpp"
#include "qcw/domains.hpp"
#include "qcw/pipeline.hpp"
#include "qcw/qcmaps.hpp"
#include "qcw/whitney.hpp"

using namespace qcw;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

SampledBody polyline(const std::vector<Point>& pts, double spacing) {
  SampledBody b;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const int m = std::max(1, static_cast<int>(std::ceil(distance(pts[i], pts[i + 1]) / spacing)));
    for (int k = 0; k < m; ++k) b.boundary.push_back(pts[i] + (static_cast<double>(k) / m) * (pts[i + 1] - pts[i]));
  }
  b.boundary.push_back(pts.back());
  b.resolution = spacing;
  return b;
}

Point polar(double rho, double theta) { return Point(rho * std::cos(theta), rho * std::sin(theta)); }

// Surface area of the unit sphere in R^n from the Gamma function.
double sphere_area_gamma(int n) { return 2.0 * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0); }

Outcome exact_ring_capacity() {
  struct Case {
    double r, R;
    int n;
  };
  const double e = std::exp(1.0);
  double worst = 0.0;
  for (const Case& c : {Case{1, e, 2}, Case{1, e, 3}, Case{1, 2, 2}, Case{2, 2 * e, 3}}) {
    const double got = ring_capacity_exact(c.r, c.R, c.n);
    const double via_area = sphere_area(c.n) * std::pow(std::log(c.R / c.r), 1 - c.n);
    const double via_gamma = sphere_area_gamma(c.n) * std::pow(std::log(c.R / c.r), 1 - c.n);
    worst = std::max({worst, std::abs(got - via_area) / via_area, std::abs(got - via_gamma) / via_gamma});
  }
  return {worst <= 1e-12, "max relative deviation " + fmt("%.3g", worst)};
}

Outcome solver_convergence() {
  const double exact = 2.0 * kPi / std::log(2.0);
  double err[2];
  double value = 0.0;
  double slowest = 0.0;
  const double hs[2] = {1.0 / 64, 1.0 / 128};
  for (int i = 0; i < 2; ++i) {
    SolverConfig cfg;
    cfg.h = hs[i];
    const auto t0 = std::chrono::steady_clock::now();
    value = grid_capacity(ring_condenser(Point(0, 0), 1.0, 2.0, hs[i]), cfg).value;
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    err[i] = std::abs(value - exact);
  }
  const double rel = err[1] / exact;
  const double ratio = err[0] / err[1];
  return {rel <= 0.02 && ratio >= 1.8 && slowest < 60.0,
          "h=1/128 value " + fmt("%.6f", value) + " (relative error " + fmt("%.4f", rel) + "), error ratio 1/64:1/128 " +
              fmt("%.3f", ratio) + ", slowest solve " + fmt("%.1f", slowest) + " s"};
}

Outcome continua_property() {
  const double K2 = derive_sphere_sobolev_constant(2);
  const double k_err = std::abs(K2 - kPi / 2) / (kPi / 2);
  const double e = std::exp(1.0);
  const double h = 1.0 / 32;
  const double s = h / 4;
  const double bound = continua_capacity_lower_bound(1.0, e, 2, K2);
  const Domain box = domains::box(Point(-3.5, -3.5), Point(3.5, 3.5));

  std::vector<std::pair<SampledBody, SampledBody>> plates;
  plates.emplace_back(polyline({polar(1, 0), polar(e, 0)}, s), polyline({polar(1, kPi), polar(e, kPi)}, s));
  plates.emplace_back(polyline({polar(1, 0), polar(e, 0)}, s), polyline({polar(1, kPi / 2), polar(e, kPi / 2)}, s));
  std::vector<Point> spiral0;
  std::vector<Point> spiral1;
  for (int k = 0; k <= 64; ++k) {
    const double t = k / 64.0;
    spiral0.push_back(polar(std::exp(t), t * kPi / 2));
    spiral1.push_back(polar(std::exp(t), kPi + t * kPi / 2));
  }
  plates.emplace_back(polyline(spiral0, s), polyline(spiral1, s));
  SampledBody hooked = polyline({polar(1, 0), polar(e, 0)}, s);
  std::vector<Point> arc;
  for (int k = 0; k <= 32; ++k) arc.push_back(polar(1.5, k / 32.0 * kPi / 3));
  const SampledBody arc_body = polyline(arc, s);
  hooked.boundary.insert(hooked.boundary.end(), arc_body.boundary.begin(), arc_body.boundary.end());
  plates.emplace_back(hooked, polyline({polar(0.5, kPi), polar(3.0, kPi)}, s));
  plates.emplace_back(polyline({polar(1, 0), polar(e, 0)}, s), polyline({polar(1, 0.6), polar(e, 0.6)}, s));

  SolverConfig cfg;
  cfg.h = h;
  bool ok = k_err <= 1e-3;
  double smallest = INFINITY;
  for (const auto& [a, b] : plates) {
    const double v = grid_capacity(Condenser{a, b, box}, cfg).value;
    smallest = std::min(smallest, v);
    ok = ok && v >= bound;
  }
  return {ok, "K(2) relative error " + fmt("%.2e", k_err) + ", smallest capacity " + fmt("%.4f", smallest) +
                  " vs bound " + fmt("%.4f", bound)};
}

Outcome whitney_square() {
  ExperimentConfig cfg;
  cfg.max_level = 8;
  const DecomposeResult r = decompose(cfg);
  // At level L the cell [i, i+1] x [j, j+1] 2^-L has distance m 2^-L with m an
  // integer, and diam / dist = sqrt(2) / m; the rule 1/4 <= ratio <= 1 is 2 <= m^2 <= 32.
  long violations = 0;
  for (const DyadicCell& c : r.family.cells) {
    const std::int64_t k = std::int64_t{1} << c.level;
    const std::int64_t m = std::min({c.index[0], c.index[1], k - 1 - c.index[0], k - 1 - c.index[1]});
    if (m * m < 2 || m * m > 32) ++violations;
  }
  const double cov = r.metrics.coverage_fraction;
  return {violations == 0 && !r.family.cells.empty() && cov >= 0.999,
          std::to_string(r.family.cells.size()) + " cells, " + std::to_string(violations) + " violations, coverage " +
              fmt("%.6f", cov)};
}

Outcome image_families() {
  struct Case {
    std::string label, map;
    maps::Params params;
  };
  const std::vector<Case> cases = {{"identity", "identity", {}},
                                   {"similarity", "similarity", {{"scale", 2.0}, {"angle", 0.5}}},
                                   {"radial a=1.5", "radial", {{"a", 1.5}}},
                                   {"radial a=2", "radial", {{"a", 2.0}}},
                                   {"diag(2,1)", "diagonal", {{"a1", 2.0}, {"a2", 1.0}}}};
  bool ok = true;
  std::ostringstream detail;
  for (const Case& c : cases) {
    ExperimentConfig cfg;
    cfg.shift = {1.0, 1.0};
    cfg.max_level = 6;
    cfg.map = c.map;
    cfg.map_params = c.params;
    const VerificationReport rep = verify(cfg);
    std::size_t failed = 0;
    for (const CellRecord& cell : rep.cells) failed += cell.pass() ? 0 : 1;
    const bool finite = std::isfinite(rep.rough_C) && std::isfinite(rep.rough_K) && rep.rough_C > 0.0;
    const bool this_ok = rep.pass && rep.image_verdict.pass && finite && failed == 0 && !rep.cells.empty();
    ok = ok && this_ok;
    detail << (detail.tellp() > 0 ? "; " : "") << c.label << ": " << rep.cells.size() << " cells, " << failed
           << " violations, C " << fmt("%.4f", rep.rough_C) << ", K " << fmt("%.4f", rep.rough_K);
  }
  return {ok, detail.str()};
}

Outcome empirical_dilatation() {
  struct Case {
    QCMap map;
    double expected;
  };
  const std::vector<Case> cases = {
      {maps::identity(2), 1.0},
      {maps::by_name("similarity", 2, {{"scale", 2.0}, {"angle", 0.5}, {"tx", 0.3}}), 1.0},
      {maps::radial_stretch(2, 1.5, Point(0, 0)), 1.5},
      {maps::radial_stretch(2, 2.0, Point(0, 0)), 2.0}};
  bool ok = true;
  std::ostringstream detail;
  for (const Case& c : cases) {
    const auto suite = standard_ring_suite(c.map);
    const EmpiricalQ q = empirical_Q(c.map, suite);
    ok = ok && suite.size() == 8 && std::abs(q.value - c.expected) <= 1e-9;
    detail << (detail.tellp() > 0 ? "; " : "") << c.map.name << " " << fmt("%.12g", q.value);
  }
  return {ok, detail.str()};
}

Outcome degenerate_inputs() {
  ExperimentConfig cap;
  cap.condenser = "overlap";
  cap.h = 1.0 / 32;
  const bool overlap_inf = capacity(cap).estimate.is_infinite();

  const double Cn = 2.0 / kPi;
  bool increasing = true;
  double previous = 0.0;
  for (double c : {1.5, 1.1, 1.01, 1.001, 1.0 + 1e-6}) {
    const double lg = image_ball_dilatation_bound(BoundsInput{1.0, c, 2, Cn}).log;
    increasing = increasing && lg > previous;
    previous = lg;
  }
  const bool limit_inf = std::isinf(image_ball_dilatation_bound(BoundsInput{1.0, 1.0, 2, Cn}).value);

  bool empty_ok = false;
  try {
    ExperimentConfig cfg;
    cfg.domain = "empty";
    empty_ok = decompose(cfg).family.cells.empty();
  } catch (const std::exception&) {
    empty_ok = false;
  }
  auto yn = [](bool b) { return b ? std::string("yes") : std::string("no"); };
  return {overlap_inf && increasing && limit_inf && empty_ok,
          "overlap infinite " + yn(overlap_inf) + ", bound increasing as Cr decreases " + yn(increasing) +
              ", infinite at Cr=1 " + yn(limit_inf) + ", empty domain gives empty family " + yn(empty_ok)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"exact ring capacity", exact_ring_capacity},
      {"solver convergence", solver_convergence},
      {"two-continua capacity bound", continua_property},
      {"Whitney decomposition of the square", whitney_square},
      {"image families of catalog maps", image_families},
      {"empirical dilatation", empirical_dilatation},
      {"degenerate inputs", degenerate_inputs}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += o.pass ? 0 : 1;
    std::printf("%s %zu %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
