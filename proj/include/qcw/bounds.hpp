#pragma once

namespace qcw {

/// Parameters of the distortion constants: dilatation Q of the map, embedding
/// coefficient Cr of the ball, dimension n and the sphere constant Cn = 1/K(n).
struct BoundsInput {
  double Q = 1.0;
  double Cr = 2.0;
  int n = 2;
  double Cn = 0.0;
};

/// A constant together with its natural logarithm. The logarithm stays
/// representable when the value over- or underflows a double.
struct LogValue {
  double value = 0.0;
  double log = 0.0;
};

struct BoundsReport {
  LogValue K_r_bound;
  LogValue delta_upper_factor;
  LogValue C0;
  LogValue C3;
};

/// Upper bound on the interior dilatation of the image of a ball with
/// embedding coefficient Cr:
/// exp[{w / (Cn min[ln 2, min(Cr-1, 1) ln(1 + 2(Cr-1))])}^{1/(n-1)}],
/// w the area of the unit sphere. Q does not enter the closed form.
/// Cr == 1 gives +infinity; Cr < 1 throws OutOfDomain.
LogValue image_ball_dilatation_bound(const BoundsInput& in);

/// Factor F with diam(image ball) <= F dist(image ball, image boundary):
/// K_r^{-1} exp[w / (Cn (ln Cr)^{n-1})].
LogValue diameter_distance_upper_factor(double K_r, const BoundsInput& in);

struct LowerConstant {
  /// (Q w / Cn) w / ln(1 + 1/(Cr - 1))
  LogValue C0;
  /// [exp(C0^{1/(n-1)}) - 1]^{-1}, with diam(image ball) >= C3 dist.
  LogValue C3;
};

LowerConstant diameter_distance_lower_constant(const BoundsInput& in);

/// All constants at once; the upper factor uses K_r = 1.
BoundsReport evaluate_bounds(const BoundsInput& in);

}  // namespace qcw
