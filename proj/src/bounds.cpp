#include "qcw/bounds.hpp"

#include <cmath>
#include <limits>

#include "qcw/capacity.hpp"
#include "qcw/errors.hpp"

namespace qcw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Returns true when Cr == 1 (the degenerate end point).
bool validate(const BoundsInput& in) {
  if (in.n < 2) throw DimensionError("bounds need n >= 2");
  if (!(in.Q >= 1.0)) throw OutOfDomain("bounds need Q >= 1");
  if (!(in.Cn > 0.0) || !std::isfinite(in.Cn)) throw ConfigError("sphere constant Cn must be positive");
  if (std::isnan(in.Cr) || in.Cr < 1.0) throw OutOfDomain("embedding coefficient must exceed 1");
  return in.Cr == 1.0;
}

LogValue from_log(double log) { return LogValue{std::exp(log), log}; }

}  // namespace

LogValue image_ball_dilatation_bound(const BoundsInput& in) {
  if (validate(in)) return LogValue{kInf, kInf};
  const double w = sphere_area(in.n);
  const double c = in.Cr - 1.0;
  const double m = std::min(std::log(2.0), std::min(c, 1.0) * std::log1p(2.0 * c));
  return from_log(std::pow(w / (in.Cn * m), 1.0 / (in.n - 1)));
}

LogValue diameter_distance_upper_factor(double K_r, const BoundsInput& in) {
  if (!(K_r >= 1.0)) throw OutOfDomain("interior dilatation must be at least 1");
  if (validate(in)) return LogValue{kInf, kInf};
  if (std::isinf(in.Cr)) return from_log(-std::log(K_r));
  const double w = sphere_area(in.n);
  return from_log(w / (in.Cn * std::pow(std::log(in.Cr), in.n - 1)) - std::log(K_r));
}

LowerConstant diameter_distance_lower_constant(const BoundsInput& in) {
  LowerConstant out;
  if (validate(in)) {
    // ln(1 + 1/0) is infinite, so C0 -> 0 and C3 -> infinity.
    out.C0 = LogValue{0.0, -kInf};
    out.C3 = LogValue{kInf, kInf};
    return out;
  }
  const double w = sphere_area(in.n);
  const double c0 = (in.Q * w / in.Cn) * w / std::log1p(1.0 / (in.Cr - 1.0));
  out.C0 = LogValue{c0, std::log(c0)};
  const double t = std::pow(c0, 1.0 / (in.n - 1));
  // ln C3 = -ln(e^t - 1) = -t - ln(1 - e^{-t}).
  const double log_c3 = -t - std::log1p(-std::exp(-t));
  out.C3 = LogValue{std::exp(log_c3), log_c3};
  return out;
}

BoundsReport evaluate_bounds(const BoundsInput& in) {
  BoundsReport r;
  r.K_r_bound = image_ball_dilatation_bound(in);
  r.delta_upper_factor = diameter_distance_upper_factor(1.0, in);
  const LowerConstant lc = diameter_distance_lower_constant(in);
  r.C0 = lc.C0;
  r.C3 = lc.C3;
  return r;
}

}  // namespace qcw
