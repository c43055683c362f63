#pragma once

#include <cmath>
#include <random>
#include <string>

#include "graphent/hyperbolic.hpp"
#include "graphent/manifold.hpp"

namespace graphent::test {

inline std::string data_path(const std::string& name) {
  return std::string(GRAPHENT_DATA_DIR) + "/" + name;
}

inline Manifold two_pants() { return Manifold(load_manifold(data_path("two_pants.json"))); }

/// Unequal pants glued at oblique angles, with a flip and nonzero offsets.
inline const Manifold& two_pants_generic_angles() {
  static const Manifold m(parse_manifold(R"({
    "blocks": [
      {"id": "P", "surface": {"type": "pants", "lengths": [2, 2, 2]}},
      {"id": "Q", "surface": {"type": "pants", "lengths": [2, 2.5, 3]}, "fiber_length": 3}
    ],
    "edges": [
      {"id": "e1", "a": {"block": "P", "class": 1}, "b": {"block": "Q", "class": 2}, "alpha_deg": 90},
      {"id": "e2", "a": {"block": "P", "class": 2}, "b": {"block": "Q", "class": 1}, "alpha_deg": 60},
      {"id": "e3", "a": {"block": "P", "class": 3}, "b": {"block": "Q", "class": 3}, "alpha_deg": 45,
       "flip": true, "offset_u": 0.5, "offset_r": -1}
    ]
  })"));
  return m;
}

/// Delta by building both triangles in coordinates: o over the foot of the
/// x-axis line, t along that line in H^2, s inside the flat wall line x R.
inline double delta_by_construction(double l, double d, double alpha) {
  const HLine line{{0.0, 0.0, 1.0}};
  const HPoint o0 = HPoint::origin();
  const HPoint o = erect_perpendicular(line, o0, l, Side::Negative);
  const HPoint t = point_at_arclength(line, o0, d);
  const PrismPoint s{point_at_arclength(line, o0, d * std::cos(alpha)), d * std::sin(alpha)};
  return dist_h2(o, t) - prism_dist({o, 0.0}, s);
}

inline HPoint random_point(std::mt19937_64& rng, double radius = 3.0) {
  std::uniform_real_distribution<double> r(0.0, radius), a(0.0, 2.0 * 3.141592653589793);
  const double rho = r(rng), th = a(rng);
  return HPoint{{std::cosh(rho), std::sinh(rho) * std::cos(th), std::sinh(rho) * std::sin(th)}};
}

inline HLine random_line(std::mt19937_64& rng) {
  const HPoint q = random_point(rng, 2.0);
  std::uniform_real_distribution<double> a(0.0, 2.0 * 3.141592653589793);
  const double th = a(rng);
  const Vec3 p{0.0, -std::sin(th), std::cos(th)};
  // p + <q,p> q is orthogonal to q, so the line passes through q.
  const double s = minkowski(q.x, p);
  return HLine::normalized({p[0] + s * q.x[0], p[1] + s * q.x[1], p[2] + s * q.x[2]});
}

}  // namespace graphent::test
