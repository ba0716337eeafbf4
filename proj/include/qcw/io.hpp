#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcw/bounds.hpp"
#include "qcw/capacity.hpp"
#include "qcw/geometry.hpp"
#include "qcw/whitney.hpp"

namespace qcw::io {

using nlohmann::json;

/// Number rounded to 12 significant digits; infinities become "inf"/"-inf"
/// and NaN becomes null.
json number(double v);
json point(const Point& p);
json log_value(const LogValue& v);
json cell_id(const DyadicCell& cell, int dim);
/// FamilyMetrics without the per-body records.
json metrics(const FamilyMetrics& m);
json estimate(const CapacityEstimate& e);
json bounds_report(const BoundsReport& r);

/// %.12g
std::string csv_number(double v);

/// Two-space indented JSON followed by a newline.
std::string dump(const json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace qcw::io
