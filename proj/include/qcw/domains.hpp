#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qcw/geometry.hpp"

namespace qcw {

/// Bounded open region known through its signed distance to the complement:
/// positive inside, zero on the boundary, negative outside, with magnitude
/// equal to the Euclidean distance.
class Domain {
 public:
  using Oracle = std::function<double(const Point&)>;
  /// Exact min of the oracle over a closed box.
  using BoxMinimum = std::function<double(const Box&)>;
  using BoundarySampler = std::function<std::vector<Point>(double spacing)>;

  Domain(std::string name, int dim, Box bounding_box, Oracle distance, bool is_simple = true,
         bool bounded = true);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const Box& bounding_box() const { return bbox_; }
  bool is_simple() const { return is_simple_; }
  bool bounded() const { return bounded_; }

  double distance_to_complement(const Point& p) const { return oracle_(p); }
  bool contains(const Point& p) const { return oracle_(p) > 0.0; }

  /// min over the closed box of the oracle. Uses the exact rule when one was
  /// attached, otherwise dense face sampling; `error_bound` receives the
  /// sampling error (0 for exact rules).
  double min_over_box(const Box& box, double* error_bound = nullptr) const;

  /// Points on the boundary with neighbouring gap at most `spacing`.
  std::vector<Point> boundary_samples(double spacing) const;

  Domain& with_box_minimum(BoxMinimum rule);
  /// Marks the signed distance as concave (convex domain): its minimum over a
  /// box is attained at a corner.
  Domain& with_concave_oracle();
  Domain& with_boundary_sampler(BoundarySampler sampler);

  bool has_exact_box_minimum() const { return concave_ || static_cast<bool>(box_min_); }
  bool concave() const { return concave_; }

 private:
  std::string name_;
  int dim_;
  Box bbox_;
  Oracle oracle_;
  bool is_simple_;
  bool bounded_;
  bool concave_ = false;
  BoxMinimum box_min_;
  BoundarySampler sampler_;
};

/// True iff the closed ball lies in the open domain.
bool contains_ball(const Domain& domain, const Ball& ball);

/// Largest K such that the concentric ball of radius K r still fits in the
/// domain; +infinity for the whole space.
double embedding_coefficient(const Domain& domain, const Ball& ball);

/// Domain image under a similarity; the oracle stays exact.
Domain transformed(const Domain& domain, const Similarity& s);

namespace domains {

Domain box(const Point& lo, const Point& hi, std::string name = "box");
Domain square();
Domain cube();
/// (0,1)^2 with the closed quadrant [1/2,1]^2 removed.
Domain l_shape();
/// Points within `radius` of the segment [a, b].
Domain stadium(const Point& a, const Point& b, double radius);
Domain ball(const Point& center, double radius);
Domain disk();
Domain unit_ball3();
/// Domain with no points; its decomposition is empty.
Domain empty(int dim);
/// R^n as a pseudo-domain. Not bounded and not simple; used for embedding
/// coefficients only.
Domain whole_space(int dim);

/// Catalog lookup: square, cube, l-shape, stadium, disk, ball, empty.
Domain by_name(const std::string& name);
std::vector<std::string> catalog_names();

}  // namespace domains

}  // namespace qcw
