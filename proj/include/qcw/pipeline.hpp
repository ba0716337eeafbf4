#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcw/bounds.hpp"
#include "qcw/capacity.hpp"
#include "qcw/domains.hpp"
#include "qcw/qcmaps.hpp"
#include "qcw/whitney.hpp"

namespace qcw {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int coverage_warning = 2;
inline constexpr int non_convergence = 3;
}  // namespace exit_code

struct ExperimentConfig {
  int n = 2;
  std::string domain = "square";
  /// lo..., hi... replacing the named domain.
  std::optional<std::vector<double>> box;
  /// Translation applied to the domain.
  std::vector<double> shift;

  std::string map = "identity";
  maps::Params map_params;

  int max_level = 6;
  int subdivisions = 8;
  double probe_tolerance = 1e-3;
  /// Thresholds for the image family check; measured constants when unset.
  std::optional<double> rough_C;
  std::optional<double> rough_K;

  /// Capacity exponent; n when unset.
  std::optional<double> p;
  double h = 1.0 / 64.0;
  double tol = 1e-8;
  long max_iter = 100000;
  /// ring | overlap
  std::string condenser = "ring";
  double ring_r = 1.0;
  double ring_R = 2.0;

  /// Sphere constant C(n) = 1/K(n); derived for n = 2, required otherwise.
  std::optional<double> Cn;
  /// Bounds inputs; Q defaults to 1.
  std::optional<double> Q;
  std::optional<double> Cr;

  std::filesystem::path out = ".";
};

/// Sets one key from its text value; throws ConfigError on unknown keys or
/// malformed values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Flat key=value lines; '#' starts a comment.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

std::vector<std::string> config_keys();

Domain build_domain(const ExperimentConfig& cfg);
QCMap build_map(const ExperimentConfig& cfg);
double resolve_Cn(const ExperimentConfig& cfg);

struct DecomposeResult {
  WhitneyFamily family;
  FamilyMetrics metrics;
  WhitneyVerdict verdict;
};

DecomposeResult decompose(const ExperimentConfig& cfg);

struct CellRecord {
  DyadicCell cell;
  double delta = 0.0;
  double distance = 0.0;
  double ratio = 0.0;
  double K_int = 0.0;
  double Cr = 0.0;
  LogValue K_r_bound;
  LogValue delta_upper_factor;
  LogValue C3;
  bool dilatation_ok = false;
  bool upper_ok = false;
  bool lower_ok = false;
  std::string error;

  bool pass() const { return error.empty() && dilatation_ok && upper_ok && lower_ok; }
};

struct VerificationReport {
  std::string map_name;
  double declared_Q = 1.0;
  double Cn = 0.0;
  FamilyMetrics source;
  FamilyMetrics image;
  double rough_C = 0.0;
  double rough_K = 1.0;
  WhitneyVerdict image_verdict;
  std::vector<CellRecord> cells;
  std::vector<std::string> outline_csv;
  bool pass = false;
};

VerificationReport verify(const ExperimentConfig& cfg);

struct CapacityRun {
  CapacityEstimate estimate;
  std::optional<double> exact;
  std::optional<double> relative_gap;
};

/// Throws NonConvergence from the solver.
CapacityRun capacity(const ExperimentConfig& cfg);

BoundsReport bounds(const ExperimentConfig& cfg);

// File-writing entry points returning process exit codes. Messages go to `log`.
int run_decompose(const ExperimentConfig& cfg, std::ostream& log);
int run_verify(const ExperimentConfig& cfg, std::ostream& log);
int run_capacity(const ExperimentConfig& cfg, std::ostream& log);
int run_bounds(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log);
int run_list_maps(int n, std::ostream& out);
int run_list_domains(std::ostream& out);

}  // namespace qcw
