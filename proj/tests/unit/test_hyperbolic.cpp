#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "graphent/hyperbolic.hpp"
#include "support.hpp"

using namespace graphent;
using graphent::test::delta_by_construction;
using graphent::test::random_line;
using graphent::test::random_point;

TEST_CASE("dist_h2 basics") {
  const HPoint p = HPoint::from_half_plane(0.3, 1.7);
  CHECK(dist_h2(p, p) == 0.0);
  const HPoint i1 = HPoint::from_half_plane(0.0, 1.0), i2 = HPoint::from_half_plane(0.0, 2.0);
  CHECK(dist_h2(i1, i2) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  // Half-plane oracle: cosh d = 1 + |z1 - z2|^2 / (2 y1 y2).
  const HPoint a = HPoint::from_half_plane(-1.2, 0.4), b = HPoint::from_half_plane(2.5, 3.1);
  const double dz2 = 3.7 * 3.7 + 2.7 * 2.7;
  CHECK(dist_h2(a, b) == doctest::Approx(std::acosh(1.0 + dz2 / (2.0 * 0.4 * 3.1))).epsilon(1e-13));
}

TEST_CASE("dist_h2 triangle inequality on random triples") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const HPoint p = random_point(rng), q = random_point(rng), r = random_point(rng);
    CHECK(dist_h2(p, r) <= dist_h2(p, q) + dist_h2(q, r) + 1e-9);
  }
}

TEST_CASE("points stay on the sheet") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const HPoint p = random_point(rng, 8.0);
    CHECK(std::abs(minkowski(p.x, p.x) + 1.0) < 1e-9 * p.x[0] * p.x[0]);
    CHECK(p.x[0] > 0.0);
  }
}

TEST_CASE("foot_and_dist") {
  SUBCASE("point on the line") {
    const HLine line = HLine::from_half_plane_circle(0.0, 1.0);
    const HPoint o = HPoint::from_half_plane(0.6, 0.8);
    REQUIRE(line.contains(o));
    const FootResult f = foot_and_dist(o, line);
    CHECK(f.dist == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dist_h2(f.foot, o) < 1e-7);
  }
  SUBCASE("2i over the unit semicircle") {
    const FootResult f =
        foot_and_dist(HPoint::from_half_plane(0.0, 2.0), HLine::from_half_plane_circle(0.0, 1.0));
    const auto [re, im] = f.foot.to_half_plane();
    CHECK(re == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(im == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.dist == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  }
  SUBCASE("minimality and orthogonality") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
      const HPoint o = random_point(rng);
      const HLine line = random_line(rng);
      const FootResult f = foot_and_dist(o, line);
      CHECK(line.contains(f.foot, 1e-9));
      CHECK(std::abs(dist_h2(o, f.foot) - f.dist) < 1e-9);
      for (double s : {-2.0, -0.5, -0.01, 0.01, 0.5, 2.0})
        CHECK(dist_h2(o, point_at_arclength(line, f.foot, s)) >= f.dist - 1e-9);
      // Pythagoras for the right angle at the foot.
      const HPoint q = point_at_arclength(line, f.foot, 0.7);
      CHECK(dist_h2(o, q) == doctest::Approx(right_hypotenuse(f.dist, 0.7)).epsilon(1e-9));
    }
  }
}

TEST_CASE("erect_perpendicular") {
  std::mt19937_64 rng(7);
  const HLine line = random_line(rng);
  const HPoint foot = foot_and_dist(HPoint::origin(), line).foot;
  CHECK(dist_h2(erect_perpendicular(line, foot, 0.0, Side::Positive), foot) < 1e-12);
  CHECK_THROWS_AS(erect_perpendicular(line, foot, -0.1, Side::Positive), std::invalid_argument);
  for (double l : {0.1, 1.0, 3.5}) {
    for (Side side : {Side::Positive, Side::Negative}) {
      const HPoint o = erect_perpendicular(line, foot, l, side);
      const FootResult f = foot_and_dist(o, line);
      CHECK(f.dist == doctest::Approx(l).epsilon(1e-9));
      CHECK(dist_h2(f.foot, foot) < 1e-7);
      CHECK(line.side_value(o) * sign_of(side) > 0.0);
    }
  }
}

TEST_CASE("point_at_arclength is unit speed and inverted by signed_arclength") {
  std::mt19937_64 rng(9);
  const HLine line = random_line(rng);
  const HPoint origin = foot_and_dist(HPoint::origin(), line).foot;
  for (double s : {-4.0, -1.0, 0.0, 0.3, 2.5}) {
    const HPoint q = point_at_arclength(line, origin, s);
    CHECK(line.contains(q, 1e-9));
    CHECK(dist_h2(origin, q) == doctest::Approx(std::abs(s)).epsilon(1e-9));
    CHECK(signed_arclength(line, origin, q) == doctest::Approx(s).epsilon(1e-9));
  }
  // Travel direction keeps the positive side on the left: the tangent rotated
  // a quarter turn toward the positive side is the inward normal.
  const HPoint ahead = point_at_arclength(line, origin, 0.5);
  CHECK(signed_arclength(line, origin, ahead) > 0.0);
}

TEST_CASE("LineChart matches the line's arc length, including far lines") {
  std::mt19937_64 rng(13);
  const HLine line = random_line(rng);
  const HPoint origin = foot_and_dist(HPoint::origin(), line).foot;
  const LineChart c = LineChart::on(line, origin);
  CHECK(minkowski(c.plus, c.minus) == doctest::Approx(-2.0).epsilon(1e-12));
  for (double s : {-3.0, 0.0, 1.25}) {
    const HPoint q = c.at(s);
    CHECK(dist_h2(q, point_at_arclength(line, origin, s)) < 1e-7);
    CHECK(c.coordinate(q) == doctest::Approx(s).epsilon(1e-12));
    const HPoint off = erect_perpendicular(line, q, 0.8, Side::Positive);
    CHECK(c.coordinate(off) == doctest::Approx(s).epsilon(1e-9));
  }
  // Pushed 8 units away the chart still resolves arc coordinates to 1e-8.
  const HIsometry push = HIsometry::translation(HLine{{0.0, 1.0, 0.0}}, HPoint::origin(), 8.0);
  const LineChart far = c.transformed(push);
  for (double s : {-1.0, 0.0, 1e-3, 1.0})
    CHECK(std::abs(far.coordinate(far.at(s)) - s) < 1e-8);
}

TEST_CASE("visual_angle") {
  CHECK(visual_angle(0.0) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(visual_angle(std::log(2.0)) == doctest::Approx(4.0 * std::atan(0.5)).epsilon(1e-15));
  CHECK(visual_angle(std::log(2.0)) == doctest::Approx(1.8545904360032244).epsilon(1e-14));

  // Cross-check: the angle between the ideal endpoint directions of the unit
  // semicircle seen from 2i.
  const HPoint o = HPoint::from_half_plane(0.0, 2.0);
  const HLine line = HLine::from_half_plane_circle(0.0, 1.0);
  const FootResult f = foot_and_dist(o, line);
  const auto [back, fwd] = line.ideal_endpoints(f.foot);
  auto dir = [&](const Vec3& ideal) {
    // Unit tangent at o toward an ideal point: the null vector projected off o.
    const double k = -minkowski(ideal, o.x);
    Vec3 v{ideal[0] / k - o.x[0], ideal[1] / k - o.x[1], ideal[2] / k - o.x[2]};
    const double n = std::sqrt(minkowski(v, v));
    return Vec3{v[0] / n, v[1] / n, v[2] / n};
  };
  const double angle = std::acos(minkowski(dir(back), dir(fwd)));
  CHECK(angle == doctest::Approx(visual_angle(f.dist)).epsilon(1e-12));

  for (double d = 0.1; d <= 10.0; d += 0.37)
    CHECK(std::abs(std::exp(d) * std::tan(visual_angle(d) / 4.0) - 1.0) < 1e-12);
  CHECK(distance_for_visual_angle(visual_angle(1.3)) == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("right_hypotenuse") {
  CHECK(right_hypotenuse(0.0, 1.7) == doctest::Approx(1.7).epsilon(1e-14));
  CHECK(right_hypotenuse(1.0, 1.0) == doctest::Approx(std::acosh(std::cosh(1.0) * std::cosh(1.0))));
  CHECK(right_hypotenuse(0.4, 2.3) == right_hypotenuse(2.3, 0.4));
  // Explicit right triangle with the right angle at the origin.
  const HLine x_axis{{0.0, 0.0, 1.0}};
  const HPoint a = erect_perpendicular(x_axis, HPoint::origin(), 1.0, Side::Positive);
  const HPoint b = point_at_arclength(x_axis, HPoint::origin(), 1.0);
  CHECK(dist_h2(a, b) == doctest::Approx(right_hypotenuse(1.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("prism_dist") {
  const HPoint p = HPoint::from_half_plane(0.2, 1.0), q = HPoint::from_half_plane(1.0, 2.0);
  CHECK(prism_dist({p, 3.0}, {q, 3.0}) == doctest::Approx(dist_h2(p, q)));
  CHECK(prism_dist({p, -1.0}, {p, 2.5}) == doctest::Approx(3.5));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> h(-3.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    const PrismPoint a{random_point(rng), h(rng)}, b{random_point(rng), h(rng)},
        c{random_point(rng), h(rng)};
    CHECK(prism_dist(a, c) <= prism_dist(a, b) + prism_dist(b, c) + 1e-9);
  }
}

TEST_CASE("delta_correction") {
  CHECK(delta_correction(1.3, 0.0, 0.7) == 0.0);
  CHECK(delta_correction(0.0, 2.0, 0.7) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(delta_correction(1.0, 1.0, std::numbers::pi / 2) ==
        doctest::Approx(0.0991604442234089).epsilon(1e-13));
  CHECK(delta_by_construction(1.0, 1.0, std::numbers::pi / 2) ==
        doctest::Approx(0.0991604442234089).epsilon(1e-12));
  CHECK_THROWS_AS(delta_correction(1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(delta_correction(1.0, 1.0, 1.6), std::invalid_argument);

  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 4.0), a(1e-6, std::numbers::pi / 2);
  for (int i = 0; i < 300; ++i) {
    const double l = u(rng), d = u(rng), alpha = a(rng);
    const double delta = delta_correction(l, d, alpha);
    CHECK(std::abs(delta - delta_by_construction(l, d, alpha)) < 1e-10);
    CHECK(delta >= 0.0);
    if (l > 0.05 && d > 0.05 && alpha > 0.05) CHECK(delta > 0.0);
  }
}

TEST_CASE("delta_correction is nondecreasing in alpha") {
  for (double l : {0.3, 1.0, 2.5})
    for (double d : {0.2, 1.0, 3.0}) {
      double prev = 0.0;
      for (int k = 1; k <= 64; ++k) {
        const double v = delta_correction(l, d, std::numbers::pi / 2 * k / 64.0);
        CHECK(v >= prev - 1e-14);
        prev = v;
      }
    }
}

TEST_CASE("isometries preserve the form through long compositions") {
  std::mt19937_64 rng(23);
  const HLine line = random_line(rng);
  const HPoint on = foot_and_dist(HPoint::origin(), line).foot;
  const HIsometry step = HIsometry::translation(line, on, 0.01);
  HIsometry g;
  for (int i = 0; i < 400; ++i) {
    g = g.compose(step);
    CHECK(g.form_defect() < 1e-9 * std::max(1.0, g.matrix()[0] * g.matrix()[0]));
  }
  const HIsometry direct = HIsometry::translation(line, on, 4.0);
  for (int k = 0; k < 9; ++k)
    CHECK(g.matrix()[k] == doctest::Approx(direct.matrix()[k]).epsilon(1e-11).scale(1.0));
  const HPoint p = random_point(rng, 1.0);
  CHECK(dist_h2(g.inverse().apply(g.apply(p)), p) < 1e-7);

  const HIsometry r = HIsometry::reflection(HLine{{0.0, 1.0, 0.0}});
  CHECK_FALSE(r.orientation_preserving());
  CHECK(r.compose(r).orientation_preserving());
  const HIsometry t = HIsometry::translation(HLine{{0.0, 0.0, 1.0}}, HPoint::origin(), 2.0);
  CHECK(t.translation_length() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("kernel operations are pure") {
  const HPoint a = HPoint::from_half_plane(0.1, 0.9), b = HPoint::from_half_plane(-2.0, 0.3);
  CHECK(dist_h2(a, b) == dist_h2(a, b));
  CHECK(delta_correction(0.7, 1.9, 0.4) == delta_correction(0.7, 1.9, 0.4));
}
