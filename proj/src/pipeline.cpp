#include "qcw/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qcw/errors.hpp"
#include "qcw/io.hpp"

namespace qcw {

namespace {

using io::json;

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
  return v;
}

long parse_long(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw ConfigError("'" + key + "' expects an integer, got '" + value + "'");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

Point to_point(const std::vector<double>& v, std::size_t offset, int n) {
  Point p(n);
  for (int i = 0; i < n; ++i) p[i] = v[offset + static_cast<std::size_t>(i)];
  return p;
}

json config_json(const ExperimentConfig& cfg) {
  const auto opt = [](const std::optional<double>& v) { return v ? io::number(*v) : json(nullptr); };
  json params = json::object();
  for (const auto& [k, v] : cfg.map_params) params[k] = io::number(v);
  json box = nullptr;
  if (cfg.box) {
    box = json::array();
    for (double v : *cfg.box) box.push_back(io::number(v));
  }
  json shift = json::array();
  for (double v : cfg.shift) shift.push_back(io::number(v));
  return json{{"n", cfg.n},
              {"domain", cfg.domain},
              {"box", box},
              {"shift", shift},
              {"map", cfg.map},
              {"map_params", params},
              {"max_level", cfg.max_level},
              {"subdivisions", cfg.subdivisions},
              {"probe_tolerance", io::number(cfg.probe_tolerance)},
              {"rough_C", opt(cfg.rough_C)},
              {"rough_K", opt(cfg.rough_K)},
              {"p", opt(cfg.p)},
              {"h", io::number(cfg.h)},
              {"tol", io::number(cfg.tol)},
              {"max_iter", cfg.max_iter},
              {"condenser", cfg.condenser},
              {"ring_r", io::number(cfg.ring_r)},
              {"ring_R", io::number(cfg.ring_R)},
              {"Cn", opt(cfg.Cn)},
              {"Q", opt(cfg.Q)},
              {"Cr", opt(cfg.Cr)}};
}

json verdict_json(const WhitneyVerdict& v) {
  json violations = json::array();
  for (const auto& c : v.violations) {
    violations.push_back(json{{"clause", to_string(c.clause)},
                              {"measured", io::number(c.measured)},
                              {"threshold", io::number(c.threshold)},
                              {"witnesses", c.witnesses}});
  }
  return json{{"pass", v.pass}, {"violations", violations}};
}

std::string error_label(const std::exception& e) {
  if (dynamic_cast<const DomainViolation*>(&e)) return "domain-violation";
  if (dynamic_cast<const ContainmentViolation*>(&e)) return "containment-violation";
  if (dynamic_cast<const InconsistentOracle*>(&e)) return "inconsistent-oracle";
  if (dynamic_cast<const DegenerateBody*>(&e)) return "degenerate-body";
  return "error";
}

// Edges of the cell subdivided into `m` segments each.
std::vector<std::pair<Point, Point>> outline(const Box& box, int m) {
  std::vector<std::pair<Point, Point>> segs;
  const std::vector<Point> corners = box.corners();
  const int n = box.dim();
  for (std::size_t a = 0; a < corners.size(); ++a) {
    for (std::size_t b = a + 1; b < corners.size(); ++b) {
      int differ = 0;
      for (int i = 0; i < n; ++i) differ += corners[a][i] != corners[b][i];
      if (differ != 1) continue;
      for (int k = 0; k < m; ++k) {
        const Point p = corners[a] + (static_cast<double>(k) / m) * (corners[b] - corners[a]);
        const Point q = corners[a] + (static_cast<double>(k + 1) / m) * (corners[b] - corners[a]);
        segs.emplace_back(p, q);
      }
    }
  }
  return segs;
}

std::string outline_rows(std::size_t cell, const char* stage, const std::vector<std::pair<Point, Point>>& segs) {
  std::string out;
  for (const auto& [p, q] : segs) {
    out += std::to_string(cell) + "," + stage;
    for (const Point* v : {&p, &q}) {
      for (int i = 0; i < v->dim(); ++i) out += "," + io::csv_number((*v)[i]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace

std::vector<std::string> config_keys() {
  return {"n",         "domain",  "box",  "shift",      "map",    "map_params", "max_level", "subdivisions",
          "probe_tolerance", "rough_C", "rough_K", "p", "h", "tol", "max_iter", "condenser",
          "ring_r",    "ring_R",  "Cn",   "Q",          "Cr",     "out"};
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "n") {
    cfg.n = static_cast<int>(parse_long(key, value));
    require(cfg.n == 2 || cfg.n == 3, "n must be 2 or 3");
  } else if (key == "domain") {
    cfg.domain = value;
  } else if (key == "box") {
    cfg.box = parse_list(key, value);
  } else if (key == "shift") {
    cfg.shift = parse_list(key, value);
  } else if (key == "map") {
    cfg.map = value;
  } else if (key == "map_params") {
    cfg.map_params = maps::parse_params(value);
  } else if (key == "max_level") {
    cfg.max_level = static_cast<int>(parse_long(key, value));
    require(cfg.max_level >= 1 && cfg.max_level <= 20, "max_level must lie in [1, 20]");
  } else if (key == "subdivisions") {
    cfg.subdivisions = static_cast<int>(parse_long(key, value));
    require(cfg.subdivisions >= 2 && cfg.subdivisions <= 64, "subdivisions must lie in [2, 64]");
  } else if (key == "probe_tolerance") {
    cfg.probe_tolerance = parse_double(key, value);
    require(cfg.probe_tolerance >= 0.0 && cfg.probe_tolerance < 1.0, "probe_tolerance must lie in [0, 1)");
  } else if (key == "rough_C") {
    cfg.rough_C = parse_double(key, value);
    require(*cfg.rough_C > 0.0, "rough_C must be positive");
  } else if (key == "rough_K") {
    cfg.rough_K = parse_double(key, value);
    require(*cfg.rough_K >= 1.0, "rough_K must be at least 1");
  } else if (key == "p") {
    cfg.p = parse_double(key, value);
    require(*cfg.p > 1.0, "p must exceed 1");
  } else if (key == "h") {
    cfg.h = parse_double(key, value);
    require(cfg.h > 0.0, "h must be positive");
  } else if (key == "tol") {
    cfg.tol = parse_double(key, value);
    require(cfg.tol > 0.0, "tol must be positive");
  } else if (key == "max_iter") {
    cfg.max_iter = parse_long(key, value);
    require(cfg.max_iter >= 1, "max_iter must be positive");
  } else if (key == "condenser") {
    require(value == "ring" || value == "overlap" || value == "continua",
            "condenser must be ring, overlap or continua");
    cfg.condenser = value;
  } else if (key == "ring_r") {
    cfg.ring_r = parse_double(key, value);
  } else if (key == "ring_R") {
    cfg.ring_R = parse_double(key, value);
  } else if (key == "Cn") {
    cfg.Cn = parse_double(key, value);
    require(*cfg.Cn > 0.0, "Cn must be positive");
  } else if (key == "Q") {
    cfg.Q = parse_double(key, value);
  } else if (key == "Cr") {
    cfg.Cr = parse_double(key, value);
  } else if (key == "out") {
    cfg.out = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

Domain build_domain(const ExperimentConfig& cfg) {
  const int n = cfg.n;
  std::optional<Domain> d;
  if (cfg.box) {
    require(cfg.box->size() == static_cast<std::size_t>(2 * n), "box needs 2n numbers: lo..., hi...");
    const Point lo = to_point(*cfg.box, 0, n);
    const Point hi = to_point(*cfg.box, static_cast<std::size_t>(n), n);
    for (int i = 0; i < n; ++i) require(lo[i] < hi[i], "box has an empty bounding box");
    d = domains::box(lo, hi);
  } else if (cfg.domain == "empty") {
    d = domains::empty(n);
  } else {
    d = domains::by_name(cfg.domain);
    require(d->dim() == n, "domain '" + cfg.domain + "' has dimension " + std::to_string(d->dim()) + "; set n accordingly");
  }
  if (!cfg.shift.empty()) {
    require(cfg.shift.size() == static_cast<std::size_t>(n), "shift needs n numbers");
    d = transformed(*d, Similarity::planar(n, 1.0, 0.0, to_point(cfg.shift, 0, n)));
  }
  return *d;
}

QCMap build_map(const ExperimentConfig& cfg) { return maps::by_name(cfg.map, cfg.n, cfg.map_params); }

double resolve_Cn(const ExperimentConfig& cfg) {
  if (cfg.Cn) return *cfg.Cn;
  if (cfg.n != 2) throw ConfigError("Cn has no default for n = " + std::to_string(cfg.n) + "; supply it");
  static const double derived = 1.0 / derive_sphere_sobolev_constant(2);
  return derived;
}

DecomposeResult decompose(const ExperimentConfig& cfg) {
  const Domain domain = build_domain(cfg);
  DecomposeResult r;
  r.family = whitney_decompose(domain, cfg.max_level);
  MeasureOptions mo;
  mo.probe_margin = r.family.resolved_margin();
  r.metrics = measure_family(r.family.bodies(cfg.subdivisions), domain, mo);
  const double K = cfg.rough_K.value_or(std::sqrt(static_cast<double>(cfg.n)) * (1.0 + 1e-9));
  r.verdict = check_rough_whitney(r.metrics, cfg.rough_C.value_or(r.family.target_C), K, cfg.probe_tolerance);
  return r;
}

VerificationReport verify(const ExperimentConfig& cfg) {
  const Domain domain = build_domain(cfg);
  const QCMap map = build_map(cfg);
  VerificationReport rep;
  rep.map_name = map.name;
  rep.declared_Q = map.declared_Q;
  rep.Cn = resolve_Cn(cfg);

  const WhitneyFamily family = whitney_decompose(domain, cfg.max_level);
  const std::vector<SampledBody> bodies = family.bodies(cfg.subdivisions);
  const double finest_side = family.side(cfg.max_level);
  const double probe_spacing = finest_side / cfg.subdivisions;
  const std::vector<Point> probes = coverage_probes(domain, probe_spacing, family.resolved_margin());
  MeasureOptions src_opts;
  src_opts.probes = probes;
  rep.source = measure_family(bodies, domain, src_opts);

  const Domain image = image_domain(domain, map, finest_side / 4.0);

  std::vector<SampledBody> image_bodies;
  for (std::size_t i = 0; i < family.cells.size(); ++i) {
    const DyadicCell& cell = family.cells[i];
    CellRecord rec;
    rec.cell = cell;
    const auto segs = outline(family.cell_box(cell), cfg.subdivisions);
    rep.outline_csv.push_back(outline_rows(i, "source", segs));
    try {
      const Ball ball = family.inscribed_ball(cell);
      rec.Cr = embedding_coefficient(domain, ball);
      const SampledBody img_ball = apply_map(map, sample_ball(ball, ball.radius / 8.0));
      const BodyMetrics bm = body_metrics(img_ball);
      rec.K_int = bm.dilatation;
      rec.delta = bm.diameter;
      rec.distance = set_distance(img_ball, image);
      rec.ratio = rec.delta / rec.distance;

      BoundsInput in{map.declared_Q, rec.Cr, cfg.n, rep.Cn};
      rec.K_r_bound = image_ball_dilatation_bound(in);
      rec.delta_upper_factor = diameter_distance_upper_factor(rec.K_int, in);
      rec.C3 = diameter_distance_lower_constant(in).C3;
      const double log_ratio = std::log(rec.ratio);
      rec.dilatation_ok = std::log(rec.K_int) <= rec.K_r_bound.log;
      rec.upper_ok = log_ratio <= rec.delta_upper_factor.log;
      rec.lower_ok = log_ratio >= rec.C3.log;

      image_bodies.push_back(apply_map(map, bodies[i]));
      std::vector<std::pair<Point, Point>> img_segs;
      for (const auto& [p, q] : segs) img_segs.emplace_back(map(p), map(q));
      rep.outline_csv.push_back(outline_rows(i, "image", img_segs));
    } catch (const Error& e) {
      rec.error = error_label(e) + ": " + e.what();
    }
    rep.cells.push_back(rec);
  }

  std::vector<Point> image_probes;
  image_probes.reserve(probes.size());
  for (const Point& p : probes) {
    if (map.defined_at(p)) image_probes.push_back(map(p));
  }
  MeasureOptions img_opts;
  img_opts.probes = std::move(image_probes);
  if (!image_bodies.empty()) {
    rep.image = measure_family(image_bodies, image, img_opts);
  }
  rep.rough_C = cfg.rough_C.value_or(image_bodies.empty() ? 1.0 : std::min(rep.image.min_ratio, 1.0 / rep.image.max_ratio));
  rep.rough_K = cfg.rough_K.value_or(std::max(1.0, rep.image.max_interior_dilatation));
  if (!image_bodies.empty()) {
    rep.image_verdict = check_rough_whitney(rep.image, rep.rough_C, rep.rough_K, cfg.probe_tolerance);
  }
  rep.pass = !rep.cells.empty() && std::all_of(rep.cells.begin(), rep.cells.end(), [](const CellRecord& c) { return c.pass(); });
  return rep;
}

CapacityRun capacity(const ExperimentConfig& cfg) {
  const int n = cfg.n;
  SolverConfig sc;
  sc.p = cfg.p.value_or(n);
  sc.h = cfg.h;
  sc.tol = cfg.tol;
  sc.max_iter = cfg.max_iter;
  CapacityRun run;
  if (cfg.condenser == "ring") {
    const Point c = Point::zero(n);
    run.estimate = grid_capacity(ring_condenser(c, cfg.ring_r, cfg.ring_R, cfg.h), sc);
    if (sc.p == n) {
      run.exact = ring_capacity_exact(cfg.ring_r, cfg.ring_R, n);
      run.relative_gap = std::abs(run.estimate.value - *run.exact) / *run.exact;
    }
  } else if (cfg.condenser == "overlap") {
    const double r = cfg.ring_r;
    Point shifted = Point::zero(n);
    shifted[0] = r / 2.0;
    Condenser cond{sample_ball(Ball{Point::zero(n), r}, cfg.h / 2.0), sample_ball(Ball{shifted, r}, cfg.h / 2.0),
                   domains::whole_space(n)};
    run.estimate = grid_capacity(cond, sc);
  } else {
    require(n == 2, "continua condenser is planar");
    const double r = cfg.ring_r;
    const double R = cfg.ring_R;
    require(r > 0.0 && R > r, "continua condenser needs 0 < ring_r < ring_R");
    const auto segment = [&](double sign) {
      SampledBody b;
      const int m = std::max(2, static_cast<int>(std::ceil((R - r) / (cfg.h / 4.0))));
      for (int k = 0; k <= m; ++k) b.boundary.emplace_back(sign * (r + (R - r) * k / m), 0.0);
      b.resolution = (R - r) / m;
      return b;
    };
    const double half = R + 0.5;
    Condenser cond{segment(1.0), segment(-1.0), domains::box(Point(-half, -half), Point(half, half))};
    run.estimate = grid_capacity(cond, sc);
  }
  return run;
}

BoundsReport bounds(const ExperimentConfig& cfg) {
  require(cfg.Cr.has_value(), "bounds need Cr");
  BoundsInput in{cfg.Q.value_or(1.0), *cfg.Cr, cfg.n, resolve_Cn(cfg)};
  return evaluate_bounds(in);
}

// ---------------------------------------------------------------------------

int run_decompose(const ExperimentConfig& cfg, std::ostream& log) {
  const DecomposeResult r = decompose(cfg);
  std::string lines;
  for (std::size_t i = 0; i < r.family.cells.size(); ++i) {
    const DyadicCell& c = r.family.cells[i];
    const Box b = r.family.cell_box(c);
    const BodyRecord& br = r.metrics.bodies[i];
    json j = io::cell_id(c, r.family.dim);
    j["lo"] = io::point(b.lo);
    j["side"] = io::number(r.family.side(c.level));
    j["diameter"] = io::number(br.diameter);
    j["distance"] = io::number(br.distance);
    j["ratio"] = io::number(br.ratio);
    j["dilatation"] = io::number(br.dilatation);
    lines += j.dump() + "\n";
  }
  io::write_text(cfg.out / "family.jsonl", lines);

  json m = io::metrics(r.metrics);
  m["domain"] = build_domain(cfg).name();
  m["max_level"] = cfg.max_level;
  m["probe_margin"] = io::number(r.family.resolved_margin());
  m["rough_whitney"] = verdict_json(r.verdict);
  json warnings = json::array();
  const bool partial = r.metrics.partial_cover(cfg.probe_tolerance);
  if (partial) {
    warnings.push_back(json{{"kind", "partial-cover"},
                            {"coverage_fraction", io::number(r.metrics.coverage_fraction)},
                            {"threshold", io::number(1.0 - cfg.probe_tolerance)}});
  }
  m["warnings"] = warnings;
  m["config"] = config_json(cfg);
  io::write_text(cfg.out / "metrics.json", io::dump(m));
  log << "decompose: " << r.metrics.cell_count << " cells, coverage " << io::csv_number(r.metrics.coverage_fraction)
      << "\n";
  if (partial) {
    log << "warning: coverage below " << io::csv_number(1.0 - cfg.probe_tolerance) << "\n";
    return exit_code::coverage_warning;
  }
  return exit_code::ok;
}

int run_verify(const ExperimentConfig& cfg, std::ostream& log) {
  const VerificationReport rep = verify(cfg);
  json cells = json::array();
  std::size_t failed = 0;
  for (const CellRecord& c : rep.cells) {
    json j{{"cell", io::cell_id(c.cell, cfg.n)}};
    if (!c.error.empty()) {
      j["error"] = c.error;
    } else {
      j["delta"] = io::number(c.delta);
      j["distance"] = io::number(c.distance);
      j["ratio"] = io::number(c.ratio);
      j["K_int"] = io::number(c.K_int);
      j["embedding_coefficient"] = io::number(c.Cr);
      j["K_r_bound"] = io::log_value(c.K_r_bound);
      j["delta_upper_factor"] = io::log_value(c.delta_upper_factor);
      j["C3"] = io::log_value(c.C3);
      j["clauses"] = json{{"dilatation", c.dilatation_ok}, {"upper", c.upper_ok}, {"lower", c.lower_ok}};
    }
    j["pass"] = c.pass();
    failed += c.pass() ? 0 : 1;
    cells.push_back(j);
  }
  json params = json::object();
  const QCMap map = build_map(cfg);
  for (const auto& [k, v] : map.parameters) params[k] = io::number(v);
  json report{{"config", config_json(cfg)},
              {"map", json{{"name", rep.map_name}, {"declared_Q", io::number(rep.declared_Q)}, {"parameters", params}}},
              {"Cn", io::number(rep.Cn)},
              {"formula_notes",
               json::array({"K_r_bound: Q does not enter the closed form",
                            "C0: the sphere area factor appears twice",
                            "C3: reciprocal of exp(C0^(1/(n-1))) - 1",
                            "logs are natural logarithms; compare clauses in log space"})},
              {"source_metrics", io::metrics(rep.source)},
              {"image_metrics", io::metrics(rep.image)},
              {"rough_whitney",
               json{{"C", io::number(rep.rough_C)}, {"K", io::number(rep.rough_K)}, {"verdict", verdict_json(rep.image_verdict)}}},
              {"cells", cells},
              {"failed_cells", failed},
              {"verdict", rep.pass ? "pass" : "fail"}};
  io::write_text(cfg.out / "report.json", io::dump(report));

  std::string csv = cfg.n == 2 ? "cell,stage,x0,y0,x1,y1\n" : "cell,stage,x0,y0,z0,x1,y1,z1\n";
  for (const std::string& rows : rep.outline_csv) csv += rows;
  io::write_text(cfg.out / "cells.csv", csv);

  log << "verify: " << rep.cells.size() << " cells, " << failed << " failed, verdict " << (rep.pass ? "pass" : "fail")
      << "\n";
  if (rep.image.partial_cover(cfg.probe_tolerance)) {
    log << "warning: image coverage " << io::csv_number(rep.image.coverage_fraction) << "\n";
    return exit_code::coverage_warning;
  }
  return exit_code::ok;
}

int run_capacity(const ExperimentConfig& cfg, std::ostream& log) {
  json j{{"config", config_json(cfg)}};
  int code = exit_code::ok;
  try {
    const CapacityRun run = capacity(cfg);
    j["estimate"] = io::estimate(run.estimate);
    j["exact"] = run.exact ? io::number(*run.exact) : json(nullptr);
    j["relative_gap"] = run.relative_gap ? io::number(*run.relative_gap) : json(nullptr);
    if (cfg.condenser == "continua") {
      j["lower_bound"] = io::number(continua_capacity_lower_bound(cfg.ring_r, cfg.ring_R, 2, 1.0 / resolve_Cn(cfg)));
    }
    log << "capacity: " << io::csv_number(run.estimate.value) << "\n";
  } catch (const NonConvergence& e) {
    j["estimate"] = io::estimate(e.last_estimate());
    j["error"] = e.what();
    log << "error: " << e.what() << "\n";
    code = exit_code::non_convergence;
  }
  io::write_text(cfg.out / "capacity.json", io::dump(j));
  return code;
}

int run_bounds(const ExperimentConfig& cfg, std::ostream& out, std::ostream&) {
  const BoundsReport r = bounds(cfg);
  json j = io::bounds_report(r);
  j["input"] = json{{"Q", io::number(cfg.Q.value_or(1.0))},
                    {"Cr", io::number(*cfg.Cr)},
                    {"n", cfg.n},
                    {"Cn", io::number(resolve_Cn(cfg))}};
  out << io::dump(j);
  return exit_code::ok;
}

int run_list_maps(int n, std::ostream& out) {
  for (const std::string& name : maps::catalog_names()) {
    const QCMap m = maps::by_name(name, n);
    out << name << " n=" << n << " declared_Q=" << io::csv_number(m.declared_Q);
    for (const auto& [k, v] : m.parameters) out << " " << k << "=" << io::csv_number(v);
    out << "\n";
  }
  return exit_code::ok;
}

int run_list_domains(std::ostream& out) {
  for (const std::string& name : domains::catalog_names()) {
    const Domain d = name == "empty" ? domains::empty(2) : domains::by_name(name);
    out << name << " n=" << d.dim() << "\n";
  }
  return exit_code::ok;
}

}  // namespace qcw
