#include "qcw/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "qcw/errors.hpp"

namespace qcw::io {

std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return std::strtod(csv_number(v).c_str(), nullptr);
}

json point(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.dim(); ++i) a.push_back(number(p[i]));
  return a;
}

json log_value(const LogValue& v) { return json{{"value", number(v.value)}, {"log", number(v.log)}}; }

json cell_id(const DyadicCell& cell, int dim) {
  json idx = json::array();
  for (int i = 0; i < dim; ++i) idx.push_back(cell.index[static_cast<std::size_t>(i)]);
  return json{{"level", cell.level}, {"index", idx}};
}

json metrics(const FamilyMetrics& m) {
  return json{{"min_ratio", number(m.min_ratio)},
              {"max_ratio", number(m.max_ratio)},
              {"max_interior_dilatation", number(m.max_interior_dilatation)},
              {"coverage_fraction", number(m.coverage_fraction)},
              {"cell_count", m.cell_count},
              {"probe_count", m.probe_count}};
}

json estimate(const CapacityEstimate& e) {
  json j{{"value", number(e.value)},
         {"p", number(e.p)},
         {"method", to_string(e.method)},
         {"grid_h", e.grid_h ? number(*e.grid_h) : json(nullptr)},
         {"iterations", e.iterations},
         {"residual", number(e.residual)},
         {"converged", e.converged}};
  return j;
}

json bounds_report(const BoundsReport& r) {
  return json{{"K_r_bound", log_value(r.K_r_bound)},
              {"delta_upper_factor", log_value(r.delta_upper_factor)},
              {"C0", log_value(r.C0)},
              {"C3", log_value(r.C3)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  if (!f) throw Error("failed writing " + path.string());
}

}  // namespace qcw::io
