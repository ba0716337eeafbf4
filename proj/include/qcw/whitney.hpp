#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcw/domains.hpp"
#include "qcw/geometry.hpp"

namespace qcw {

/// Dyadic cube of the root box: side root_side * 2^-level at integer index.
struct DyadicCell {
  int level = 0;
  std::array<std::int64_t, 3> index{0, 0, 0};

  friend bool operator==(const DyadicCell&, const DyadicCell&) = default;
  friend auto operator<=>(const DyadicCell&, const DyadicCell&) = default;
};

struct WhitneyFamily {
  std::string domain_name;
  int dim = 2;
  Point root_lo;
  double root_side = 1.0;
  int max_level = 0;
  /// Constant C of the two-sided comparability C dist <= diam <= dist / C.
  double target_C = 0.25;
  /// Sorted by (level, index).
  std::vector<DyadicCell> cells;

  double side(int level) const;
  double cell_diameter(int level) const;
  Box cell_box(const DyadicCell& cell) const;
  /// Ball inscribed in the cube.
  Ball inscribed_ball(const DyadicCell& cell) const;
  SampledBody cell_body(const DyadicCell& cell, int subdivisions = 8) const;
  std::vector<SampledBody> bodies(int subdivisions = 8) const;

  /// Distance from the complement beyond which every point is covered by a
  /// cell of level <= max_level: twice the finest cell diameter.
  double resolved_margin() const;
};

/// Dyadic cells of level <= max_level accepted by diam <= dist <= 4 diam,
/// found by subdividing from the cube that contains the bounding box.
WhitneyFamily whitney_decompose(const Domain& domain, int max_level);

/// Exact interior-disjointness check by dyadic index arithmetic.
bool cells_interior_disjoint(std::span<const DyadicCell> cells);

struct MeasureOptions {
  /// Probe grid spacing; defaults to the finest body resolution.
  std::optional<double> probe_spacing;
  /// Probe grid points closer than this to the complement are skipped.
  double probe_margin = 0.0;
  /// Explicit probe set; replaces the grid when present.
  std::optional<std::vector<Point>> probes;
  std::uint64_t seed = kDefaultSeed;
};

struct BodyRecord {
  double diameter = 0.0;
  double distance = 0.0;
  double ratio = 0.0;
  double dilatation = 1.0;
};

struct FamilyMetrics {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double max_interior_dilatation = 1.0;
  double coverage_fraction = 0.0;
  std::size_t cell_count = 0;
  std::size_t probe_count = 0;
  std::vector<BodyRecord> bodies;

  bool partial_cover(double probe_tolerance = 1e-3) const { return coverage_fraction < 1.0 - probe_tolerance; }
};

/// Diameter-to-distance ratios, interior dilatation and probe coverage of a
/// family of sampled bodies inside a domain. A probe counts as covered when a
/// body sample lies within that body's resolution.
FamilyMetrics measure_family(std::span<const SampledBody> family, const Domain& domain,
                             const MeasureOptions& options = {});

/// Probe grid used for coverage: lattice points of `spacing` in the bounding
/// box whose distance to the complement is at least `margin` (and positive).
std::vector<Point> coverage_probes(const Domain& domain, double spacing, double margin);

enum class WhitneyClause { min_ratio, max_ratio, interior_dilatation, coverage };

struct ClauseViolation {
  WhitneyClause clause;
  double measured = 0.0;
  double threshold = 0.0;
  std::vector<std::size_t> witnesses;
};

struct WhitneyVerdict {
  bool pass = false;
  std::vector<ClauseViolation> violations;
};

WhitneyVerdict check_rough_whitney(const FamilyMetrics& metrics, double C, double K_bound,
                                   double probe_tolerance = 1e-3);

std::string to_string(WhitneyClause clause);

}  // namespace qcw
