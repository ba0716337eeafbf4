#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcw/domains.hpp"
#include "qcw/errors.hpp"
#include "qcw/geometry.hpp"

namespace qcw {

enum class CapacityMethod { exact_ring, grid_solver };

std::string to_string(CapacityMethod method);

/// Capacity value with provenance. An empty admissible set is reported as
/// value = +infinity; that is the only way infinity appears.
struct CapacityEstimate {
  double value = 0.0;
  double p = 2.0;
  CapacityMethod method = CapacityMethod::exact_ring;
  std::optional<double> grid_h;
  long iterations = 0;
  double residual = 0.0;
  bool converged = true;

  bool is_infinite() const;
};

/// (plate0, plate1; ambient). Plates are sample clouds; the solver fixes the
/// field to 0 on cells holding a plate0 sample and to 1 on plate1 cells.
struct Condenser {
  SampledBody plate0;
  SampledBody plate1;
  Domain ambient;
};

struct SolverConfig {
  double p = 2.0;
  double h = 1.0 / 64.0;
  /// Relative energy decrease over one sweep that counts as converged.
  double tol = 1e-8;
  long max_iter = 100000;
  /// Over-relaxation factor for p = 2; chosen from the grid size when unset.
  std::optional<double> omega;
  /// Called with (iteration, energy) after every accepted iteration.
  std::function<void(long, double)> on_iteration;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, CapacityEstimate last) : Error(what), last_(last) {}
  const CapacityEstimate& last_estimate() const { return last_; }

 private:
  CapacityEstimate last_;
};

/// Surface measure of the unit sphere S^{n-1}: 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

/// Conformal capacity of the ring (closed B(x0,r), R^n \ B(x0,R); R^n):
/// area(S^{n-1}) * ln(R/r)^{1-n}.
double ring_capacity_exact(double r, double R, int n);

/// Extremal function of the ring: 1 on the inner ball, 0 outside the outer
/// ball, logarithmic in between.
double ring_extremal(const Point& x, const Point& center, double r, double R);

enum class CellState : std::uint8_t { inactive, free, plate0, plate1 };

/// Cell-centred lattice field over the condenser's bounding box, with the
/// plate constraints enforced and values clamped to [0, 1].
class AdmissibleField {
 public:
  static AdmissibleField rasterize(const Condenser& condenser, double h);

  int dim() const { return dim_; }
  double h() const { return h_; }
  const std::array<std::int64_t, 3>& dims() const { return dims_; }
  std::size_t size() const { return state_.size(); }
  bool infeasible() const { return infeasible_; }
  std::size_t count(CellState s) const;

  Point cell_center(std::size_t i) const;
  CellState state(std::size_t i) const { return state_[i]; }
  std::vector<double>& values() { return u_; }
  const std::vector<double>& values() const { return u_; }
  /// Sets a free cell, clamped to [0, 1]; constrained cells are left alone.
  void set(std::size_t i, double v);

  /// Sum over active cells of h^n |forward-difference gradient|^p.
  double energy(double p) const;
  /// d energy / d u, zero on constrained and inactive cells.
  void gradient(double p, std::vector<double>& out) const;

  /// One over-relaxed Gauss-Seidel sweep for p = 2.
  void sor_sweep(double omega);

 private:
  std::size_t neighbour(std::size_t i, int axis, int dir) const;
  bool active(std::size_t i) const { return state_[i] != CellState::inactive; }

  int dim_ = 2;
  double h_ = 1.0;
  Point origin_;
  std::array<std::int64_t, 3> dims_{1, 1, 1};
  std::array<std::size_t, 3> stride_{1, 1, 1};
  std::vector<CellState> state_;
  std::vector<double> u_;
  bool infeasible_ = false;
};

/// Minimizes the discrete p-Dirichlet energy over admissible fields: SOR for
/// p = 2, projected gradient descent with backtracking otherwise. Throws
/// NonConvergence when max_iter is hit with residual above tol.
CapacityEstimate grid_capacity(const Condenser& condenser, const SolverConfig& config);

/// ln(R/r) / Kn: lower bound on the conformal capacity of two continua that
/// both join the spheres of radii r and R about a common centre, with Kn the
/// Sobolev constant of the unit sphere.
double continua_capacity_lower_bound(double r, double R, int n, double Kn);

/// Minimal discrete energy sum (du)^2 / dtheta of a function on `nodes`
/// equally spaced circle points that is 0 at node 0 and 1 at node `gap`.
/// Each arc is solved as a tridiagonal Dirichlet problem.
double circle_transition_energy(int nodes, int gap);

/// Smallest K with 1 <= K * int |u'|^2 over the unit circle for every u that
/// takes both values 0 and 1, found by minimizing circle_transition_energy
/// over all gaps. Only n = 2 is supported.
double derive_sphere_sobolev_constant(int n, int nodes = 4096);

// Condenser builders.

/// Lattice samples (spacing) of {p in box : member(p)}; samples with a
/// non-member lattice neighbour go to the boundary list.
SampledBody sample_region(const std::function<bool(const Point&)>& member, const Box& box, double spacing);

/// Ring condenser in R^n sampled for a solver grid of size h.
Condenser ring_condenser(const Point& center, double r, double R, double h);

}  // namespace qcw
