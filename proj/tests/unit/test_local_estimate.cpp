#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "graphent/local_estimate.hpp"
#include "support.hpp"

using namespace graphent;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

ExpansionState state_at(int cls, double u, double l, double alpha) {
  ExpansionState s;
  s.attach_class = cls;
  s.u = u;
  s.l = l;
  s.alpha = alpha;
  return s;
}

// Line through two points: polar J (a x b), Euclidean cross product.
HLine line_through(const HPoint& a, const HPoint& b) {
  const Vec3& x = a.x;
  const Vec3& y = b.x;
  const Vec3 c{x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
  return HLine::normalized({-c[0], c[1], c[2]});
}

}  // namespace

TEST_CASE("root state children") {
  const FuchsianSurface s = FuchsianSurface::pants({2, 2, 2});
  const Expansion e = expand_children(s, state_at(1, 0.4, 0.0, kHalfPi), 1e-3);
  REQUIRE(!e.children.empty());
  for (const ChildRecord& c : e.children) {
    CHECK(c.delta == 0.0);
    CHECK(c.l_tilde == c.sight.dist);
    CHECK(c.l_second == c.sight.dist);
    CHECK(c.weight_factor == doctest::Approx(std::tan(c.sight.psi / 4)).epsilon(1e-12));
  }
  CHECK(e.psi_total == doctest::Approx(std::numbers::pi));
}

TEST_CASE("child record invariants") {
  const FuchsianSurface s = FuchsianSurface::pants({1, 2, 3});
  for (double l : {0.3, 1.0, 2.5}) {
    for (double alpha : {0.2, 1.0, kHalfPi}) {
      const ExpansionState st = state_at(2, 0.6, l, alpha);
      const Observer obs = make_observer(s, 2, 0.6, l);
      const Expansion e = expand_children(s, st, 1e-3);
      for (const ChildRecord& c : e.children) {
        CHECK(obs.attach_line.contains(c.t_point, 1e-9));
        CHECK(std::abs(std::abs(c.t_offset) - dist_h2(obs.foot, c.t_point)) < 1e-10);
        CHECK(c.d == std::abs(c.t_offset));
        CHECK(std::abs(c.l_tilde - (c.l_tilde_prime + c.l_second)) < 1e-10);
        CHECK(std::abs(c.l_tilde_prime - right_hypotenuse(l, c.d)) < 1e-9);
        CHECK(std::abs(c.delta - delta_correction(l, c.d, alpha)) < 1e-10);
        CHECK(c.weight_factor == doctest::Approx(c.tau * std::exp(c.delta)).epsilon(1e-12));
        // The observer and the foot on the far line are on opposite sides of the wall.
        CHECK(obs.attach_line.side_value(obs.position) * obs.attach_line.side_value(c.sight.foot) <
              0.0);
        // Delta vanishes exactly in the degenerate configuration.
        CHECK((c.delta > 0.0) == (c.d > 1e-12));
      }
    }
  }
}

TEST_CASE("largest children match a rebuild from raw kernel calls") {
  const FuchsianSurface s = FuchsianSurface::pants({2, 2, 2});
  const double l = 1.0;
  const Expansion e = expand_children(s, state_at(1, 0.0, l, kHalfPi), 1e-3);
  std::vector<const ChildRecord*> kids;
  for (const ChildRecord& c : e.children) kids.push_back(&c);
  std::sort(kids.begin(), kids.end(),
            [](const ChildRecord* a, const ChildRecord* b) { return a->sight.psi > b->sight.psi; });
  REQUIRE(kids.size() >= 3);

  const BoundaryClass& bc = s.boundary(1);
  const HPoint foot = point_at_arclength(bc.axis, bc.arc_origin, 0.0);
  const HPoint o = erect_perpendicular(bc.axis, foot, l, Side::Negative);
  for (int k = 0; k < 3; ++k) {
    const ChildRecord& c = *kids[k];
    const FootResult ow = foot_and_dist(o, c.sight.line);
    CHECK(std::abs(ow.dist - c.sight.dist) < 1e-10);
    const HPoint t = intersection(line_through(o, ow.foot), bc.axis);
    const double d = dist_h2(foot, t);
    CHECK(std::abs(d - c.d) < 1e-10);
    CHECK(std::abs(dist_h2(o, t) - c.l_tilde_prime) < 1e-10);
    CHECK(std::abs(dist_h2(t, ow.foot) - c.l_second) < 1e-10);
    CHECK(std::abs(graphent::test::delta_by_construction(l, d, kHalfPi) - c.delta) < 1e-10);
  }
}

TEST_CASE("lambda_value") {
  const FuchsianSurface s = FuchsianSurface::pants({2, 2, 2});
  const ExpansionState st = state_at(1, 0.0, 1.0, kHalfPi);
  const Expansion e = expand_children(s, st, 1e-4);
  double two_ways = 0.0, tau = 0.0;
  for (const ChildRecord& c : e.children) {
    two_ways += c.tau * std::exp(c.delta);
    tau += c.tau;
  }
  CHECK(lambda_value(e) == doctest::Approx(two_ways).epsilon(1e-12));
  CHECK(lambda_value(e) >= tau);

  double prev = 0.0;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const double v = lambda_value(s, st, eps);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(lambda_value(s, st, kDefaultSweepEps) > 1.0);
}

TEST_CASE("sum of tau stays at or below 1") {
  // tan is superadditive on [0, pi/4], so sum tan(psi_w / 4) <= tan(sum psi_w / 4) <= 1.
  const FuchsianSurface s = FuchsianSurface::pants({2, 2, 2});
  for (double l : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const Expansion e = expand_children(s, state_at(3, 0.7, l, 1.0), 1e-5);
    double tau = 0.0;
    for (const ChildRecord& c : e.children) tau += c.tau;
    CHECK(tau <= 1.0 + 1e-9);
  }
}

TEST_CASE("lambda is invariant under a full boundary translation") {
  const FuchsianSurface s = FuchsianSurface::pants({1, 2, 3});
  const double L = s.boundary(1).translation_length;
  const double a = lambda_value(s, state_at(1, 0.3, 1.2, 0.9), 1e-4);
  const double b = lambda_value(s, state_at(1, 0.3 + 2 * L, 1.2, 0.9), 1e-4);
  CHECK(std::abs(a - b) < 1e-8);
}

TEST_CASE("grids") {
  CHECK(linspace(0.0, 1.0, 5) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  const auto g = logspace(0.25, 6.0, 12);
  CHECK(g.size() == 12);
  CHECK(g.front() == 0.25);
  CHECK(g.back() == 6.0);
  const FuchsianSurface s = FuchsianSurface::pants({2, 2, 2});
  const SweepGrids d = default_sweep_grids(s, 1, min_boundary_gap(s), std::numbers::pi / 6);
  CHECK(d.l.size() == 12);
  CHECK(d.l.front() == doctest::Approx(1.7049128323580137));
  CHECK(d.alpha.size() == 8);
  CHECK(d.alpha.back() == kHalfPi);
  CHECK(d.u.size() == 8);
  CHECK(default_sweep_grids(s, 1, 0.1, kHalfPi).alpha.size() == 1);
  CHECK(default_sweep_grids(s, 1, 0.1, kHalfPi).l.front() == 0.25);
}

TEST_CASE("lemma sweep rows and chain inequality") {
  const FuchsianSurface s = FuchsianSurface::pants({2, 2, 2});
  SweepGrids g;
  g.l = {0.5, 1.0, 2.0, 4.0};
  g.alpha = {std::numbers::pi / 4, kHalfPi};
  g.u = {0.0, 0.5, 1.0};
  const SweepTable t = lemma_sweep(s, 1, g, 1e-4);
  CHECK(t.rows.size() == 4 * 2 * 3);
  double min_lambda = INFINITY;
  for (const SweepRow& r : t.rows) {
    CHECK(r.lambda >= r.sum_tau);
    CHECK(r.lambda >= (std::exp(r.delta0_hat) - 1.0) * r.m0_hat + r.sum_tau - 1e-9);
    CHECK(r.m0_hat <= r.sum_tau + 1e-15);
    min_lambda = std::min(min_lambda, r.lambda);
  }
  CHECK(t.lambda0_hat == min_lambda);
  CHECK(t.to_csv().rfind("l,alpha,u,lambda,sum_tau,m0_hat,delta0_hat\n", 0) == 0);
  CHECK(t.to_csv() == lemma_sweep(s, 1, g, 1e-4).to_csv());
  CHECK_THROWS_AS(lemma_sweep(s, 1, SweepGrids{}, 1e-3), std::invalid_argument);
}
