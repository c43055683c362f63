#pragma once

// Hyperbolic plane geometry in the hyperboloid model, plus the product
// H^2 x R used for blocks of a graph manifold.
//
// Points live on the upper sheet {<x,x> = -1, x0 > 0} of the Minkowski form
// <x,y> = -x0*y0 + x1*y1 + x2*y2. A geodesic line is stored by its unit
// spacelike polar vector p; the line is {x : <x,p> = 0} and its positive side
// is {x : <x,p> > 0}. Lines are oriented so that the positive side lies to the
// left of the direction of travel.

#include <array>
#include <cstdint>
#include <utility>

namespace graphent {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<double, 9>;  // row-major

inline double minkowski(const Vec3& a, const Vec3& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

enum class Side : int { Negative = -1, Positive = 1 };

inline double sign_of(Side s) { return s == Side::Positive ? 1.0 : -1.0; }

struct HPoint {
  Vec3 x{1.0, 0.0, 0.0};

  static HPoint origin() { return HPoint{}; }
  /// Rescales an approximately-on-sheet timelike vector back onto the sheet.
  static HPoint normalized(const Vec3& v);
  /// Upper half-plane z = re + i*im (im > 0).
  static HPoint from_half_plane(double re, double im);
  std::pair<double, double> to_half_plane() const;

  bool valid(double tol = 1e-9) const;
};

struct HLine {
  Vec3 p{0.0, 0.0, 1.0};

  static HLine normalized(const Vec3& v);
  /// Half-plane semicircle |z - center| = radius.
  static HLine from_half_plane_circle(double center, double radius);
  /// Half-plane vertical line Re z = re.
  static HLine from_half_plane_vertical(double re);

  double side_value(const HPoint& q) const { return minkowski(q.x, p); }
  bool contains(const HPoint& q, double tol = 1e-9) const;
  HLine reversed() const { return HLine{{-p[0], -p[1], -p[2]}}; }
  /// Unit tangent at a point of the line, in the direction of travel.
  Vec3 tangent_at(const HPoint& on_line) const;
  /// Ideal endpoints (null vectors), backward then forward.
  std::pair<Vec3, Vec3> ideal_endpoints(const HPoint& on_line) const;

  bool valid(double tol = 1e-9) const;
};

/// Isometry of H^2 realized as a 3x3 matrix preserving the Minkowski form.
class HIsometry {
 public:
  HIsometry() = default;
  explicit HIsometry(const Mat3& m);

  static HIsometry identity() { return HIsometry{}; }
  static HIsometry reflection(const HLine& line);
  /// Translation by `length` along the oriented line.
  static HIsometry translation(const HLine& line, const HPoint& on_line, double length);
  /// Orientation-preserving isometry induced by an SL(2,R) matrix on the half-plane.
  static HIsometry from_sl2(double a, double b, double c, double d);

  const Mat3& matrix() const { return m_; }
  bool orientation_preserving() const { return orientation_preserving_; }

  HPoint apply(const HPoint& q) const;
  HLine apply(const HLine& l) const;
  Vec3 apply(const Vec3& v) const;

  /// this * other (apply `other` first). Re-orthonormalizes every 16 compositions.
  HIsometry compose(const HIsometry& other) const;
  HIsometry inverse() const;
  void reorthonormalize();

  double trace() const { return m_[0] + m_[4] + m_[8]; }
  /// Translation length of a hyperbolic isometry; 0 when not hyperbolic.
  double translation_length() const;
  /// Axis of a hyperbolic orientation-preserving isometry (orientation arbitrary).
  HLine axis() const;

  /// Max |(M^T J M - J)_ij|.
  double form_defect() const;

 private:
  Mat3 m_{1, 0, 0, 0, 1, 0, 0, 0, 1};
  bool orientation_preserving_ = true;
  std::uint32_t compositions_ = 0;
};

struct PrismPoint {
  HPoint base;
  double height = 0.0;
};

double dist_h2(const HPoint& p, const HPoint& q);

struct FootResult {
  HPoint foot;
  double dist = 0.0;
};
FootResult foot_and_dist(const HPoint& o, const HLine& line);

/// Point at distance l from `line` over `foot`, on the requested side.
HPoint erect_perpendicular(const HLine& line, const HPoint& foot, double l, Side side);

/// Unit-speed parametrization of the oriented line starting at `origin`.
HPoint point_at_arclength(const HLine& line, const HPoint& origin, double s);
/// Inverse of point_at_arclength for a point on the line.
double signed_arclength(const HLine& line, const HPoint& origin, const HPoint& q);

/// Arc-length chart on an oriented line through the null vectors of its ideal
/// endpoints: at(s) = (e^s plus + e^-s minus) / 2, with <plus, minus> = -2.
/// Stays accurate for lines far from the hyperboloid's origin.
struct LineChart {
  Vec3 plus{};
  Vec3 minus{};

  static LineChart on(const HLine& line, const HPoint& origin);
  LineChart transformed(const HIsometry& g) const;
  HPoint at(double s) const;
  /// Arc coordinate of the foot of q on the line.
  double coordinate(const HPoint& q) const;
};

/// Full angle under which a geodesic at distance d is seen: 4*atan(exp(-d)).
double visual_angle(double d);
/// Distance at which a geodesic subtends the angle psi (inverse of visual_angle).
double distance_for_visual_angle(double psi);

/// Hypotenuse of a right triangle with legs a, b.
double right_hypotenuse(double a, double b);

double prism_dist(const PrismPoint& p, const PrismPoint& q);

/// H^2 length of o->t minus the H^2 x R length of o->s, where the triangles
/// o o0 t (in H^2) and o o0 s (tilted by alpha inside the wall) share the leg
/// |o o0| = l and have |o0 t| = |o0 s| = d.
double delta_correction(double l, double d, double alpha);

/// Distance between two ultraparallel lines (0 if they meet or are asymptotic).
double line_distance(const HLine& a, const HLine& b);

/// Line orthogonal to both ultraparallel lines (orientation arbitrary).
HLine common_perpendicular(const HLine& a, const HLine& b);

/// Intersection point of two crossing lines.
HPoint intersection(const HLine& a, const HLine& b);

/// Unit tangent vector at `from` pointing to `to`.
Vec3 direction_to(const HPoint& from, const HPoint& to);

}  // namespace graphent
