#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "graphent/entropy.hpp"
#include "support.hpp"

using namespace graphent;

namespace {

const Manifold& manifold() {
  static const Manifold m(graphent::test::two_pants());
  return m;
}

TruncationParams coarse() {
  TruncationParams t;
  t.eps = 1e-3;
  return t;
}

EntropyOptions small_run(std::vector<int> n_list) {
  EntropyOptions o;
  o.n_list = std::move(n_list);
  o.trunc = coarse();
  o.config_budget = 8;
  o.bisection_steps = 6;
  o.lemma_sweeps = false;
  return o;
}

}  // namespace

TEST_CASE("sample_configs") {
  const Manifold& m = manifold();
  for (std::size_t budget : {6u, 8u, 32u, 100u}) {
    CAPTURE(budget);
    const auto cs = sample_configs(m, 1, budget);
    CHECK(cs.size() <= budget);
    std::set<std::tuple<int, int, double, double>> seen;
    std::size_t pilot = 0;
    for (const RootConfig& c : cs) {
      CHECK(seen.insert({c.block, c.attach_class, c.u, c.r}).second);
      CHECK(c.u >= 0.0);
      CHECK(c.u < m.surface(c.block).boundary(c.attach_class).translation_length);
      CHECK((c.source == "grid" || c.source == "pilot"));
      pilot += c.source == "pilot";
    }
    CHECK(pilot <= budget / 4);
    // Every (block, class) pair is represented on the grid.
    std::set<std::pair<int, int>> pairs;
    for (const RootConfig& c : cs)
      if (c.source == "grid") pairs.insert({c.block, c.attach_class});
    CHECK(pairs.size() == 6);
  }
  const auto a = sample_configs(m, 2, 32), b = sample_configs(m, 2, 32);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].u == b[i].u);
    CHECK(a[i].r == b[i].r);
  }
  CHECK_THROWS_AS(sample_configs(m, -1, 8), std::invalid_argument);
  CHECK_THROWS_AS(sample_configs(m, 1, 5), std::invalid_argument);
}

TEST_CASE("pn_at matches the tree and decreases in t") {
  const Manifold& m = manifold();
  const RootConfig c{1, 2, 0.4, 0.1, "grid"};
  TreeOptions o;
  o.eps = 1e-3;
  o.beam.reset();
  o.t_values = {1.0};
  const WallTree t = build_levels(m, root_state(m, 1, 2, 0.4, 0.1), 1, o);
  CHECK(pn_at(m, c, 1, 1.0, coarse()) == doctest::Approx(t.levels[1].p_hat[0]).epsilon(1e-12));
  double prev = INFINITY;
  for (double h : {0.5, 1.0, 1.5, 2.0}) {
    const double p = pn_at(m, c, 1, h, coarse());
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("certify margins are monotone in the exponent") {
  const Manifold& m = manifold();
  const auto configs = sample_configs(m, 1, 8);
  const CertifyResult lo = certify(m, 1, 1.0, coarse(), configs);
  const CertifyResult hi = certify(m, 1, 1.2, coarse(), configs);
  REQUIRE(lo.configs.size() == configs.size());
  double smallest = INFINITY;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    CHECK(hi.configs[i].margin < lo.configs[i].margin);
    smallest = std::min(smallest, lo.configs[i].margin);
  }
  CHECK(lo.min_margin == smallest);
  CHECK(certify(m, 1, 1.0, coarse(), std::vector<RootConfig>{}).min_margin == 0.0);
  CHECK_THROWS_AS(certify(m, 1, 0.0, coarse(), configs), std::invalid_argument);
}

TEST_CASE("best_bound is the largest grid exponent with all margins at least 1") {
  const Manifold& m = manifold();
  const EntropyOptions o = small_run({1, 2});
  const EntropyReport r = best_bound(m, o);
  REQUIRE(r.per_level.size() == 2);
  CHECK(r.h_resolution == doctest::Approx(1.0 / 64));
  for (const PerLevelBound& pl : r.per_level) {
    CAPTURE(pl.n);
    const double steps = (pl.h_bar - o.h_lo) / r.h_resolution;
    CHECK(std::abs(steps - std::round(steps)) < 1e-9);
    CHECK(pl.certified == (pl.h_bar > o.h_lo));
    if (!pl.certified) continue;
    CHECK(pl.min_margin >= 1.0);
    const auto configs = sample_configs(m, pl.n, o.config_budget);
    CHECK(certify(m, pl.n, pl.h_bar, o.trunc, configs).min_margin >= 1.0);
    if (pl.h_bar + r.h_resolution <= o.h_hi)
      CHECK(certify(m, pl.n, pl.h_bar + r.h_resolution, o.trunc, configs).min_margin < 1.0);
  }
  CHECK(r.h_bar >= r.per_level[0].h_bar);
  CHECK(r.h_bar >= r.per_level[1].h_bar);
  CHECK(r.h_bar <= 2.0);
  CHECK(r.lambda0_hat == 0.0);

  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["schema"] == 1);
  CHECK(j["h_bar"].get<double>() == r.h_bar);
  CHECK(j["certified"].get<bool>() == r.certified);
  CHECK(j["beam"].is_null());
  CHECK(j["configs_tested"].size() == r.configs_tested.size());
  CHECK(j["configs_tested"][0]["block"].get<std::string>() == "P");
  CHECK(j["per_level"].size() == 2);
  CHECK(j["caveats"].size() >= 2);
  CHECK(r.to_text().find("h_bar") != std::string::npos);
}

TEST_CASE("a coarse truncation is reported, not certified") {
  const Manifold& m = manifold();
  EntropyOptions o = small_run({1});
  o.trunc.eps = 0.5;
  const EntropyReport r = best_bound(m, o);
  CHECK_FALSE(r.certified);
  CHECK(r.h_bar == o.h_lo);
  bool flagged = false;
  for (const std::string& c : r.caveats) flagged = flagged || c.rfind("truncation too coarse", 0) == 0;
  CHECK(flagged);
}

TEST_CASE("best_bound option checks") {
  const Manifold& m = manifold();
  EntropyOptions o = small_run({1});
  o.h_hi = 2.5;
  CHECK_THROWS_AS(best_bound(m, o), std::invalid_argument);
  o = small_run({});
  CHECK_THROWS_AS(best_bound(m, o), std::invalid_argument);
  o = small_run({1});
  o.bisection_steps = 0;
  CHECK_THROWS_AS(best_bound(m, o), std::invalid_argument);
  o = small_run({1});
  o.h_lo = 1.5;
  o.h_hi = 1.5;
  CHECK_THROWS_AS(best_bound(m, o), std::invalid_argument);
}
