#include "graphent/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

#include <json.hpp>

#include "graphent/parallel.hpp"

namespace graphent {
namespace {

bool same_config(const RootConfig& a, const RootConfig& b) {
  return a.block == b.block && a.attach_class == b.attach_class && std::abs(a.u - b.u) < 1e-8 &&
         std::abs(a.r - b.r) < 1e-8;
}

void add_unique(std::vector<RootConfig>& out, RootConfig c) {
  for (const RootConfig& e : out)
    if (same_config(e, c)) return;
  out.push_back(std::move(c));
}

double fiber_period(const Manifold& m, int block) {
  if (const auto& f = m.spec().blocks[block].fiber_length) return *f;
  const auto lengths = m.surface(block).boundary_lengths();
  return *std::max_element(lengths.begin(), lengths.end());
}

TreeOptions tree_options(const TruncationParams& trunc, int n) {
  TreeOptions o;
  o.eps = trunc.eps;
  o.beam = trunc.beam;
  o.depth_cap = trunc.depth_cap;
  o.node_budget = trunc.node_budget;
  o.keep_nodes = false;
  o.t_values = {1.0};
  o.record_levels = {n};
  return o;
}

struct LevelLengths {
  std::vector<double> L;
  bool truncated = false;
};

LevelLengths level_lengths(const Manifold& m, const RootConfig& c, int n,
                           const TruncationParams& trunc) {
  WallTree tree = build_levels(m, root_state(m, c.block, c.attach_class, c.u, c.r), n,
                               tree_options(trunc, n));
  LevelLengths out;
  if (static_cast<int>(tree.levels.size()) == n + 1) {
    out.L = std::move(tree.lengths[n]);
    out.truncated = tree.levels.back().truncated;
  } else {
    out.truncated = true;  // tree died out or stopped before level n
  }
  return out;
}

double level_sum(const std::vector<double>& L, double h) {
  double s = 0.0;
  for (double x : L) s += std::exp(-h * x);
  return s;
}

std::vector<double> sums_at(const std::vector<LevelLengths>& all, double h) {
  std::vector<double> out(all.size());
  parallel_for(all.size(), [&](std::size_t i) { out[i] = level_sum(all[i].L, h); });
  return out;
}

}  // namespace

std::vector<RootConfig> sample_configs(const Manifold& manifold, int n, std::size_t budget,
                                       const PilotParams& pilot) {
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
  std::vector<std::pair<int, int>> pairs;
  for (int b = 0; b < manifold.block_count(); ++b)
    for (int c = 1; c <= manifold.surface(b).class_count(); ++c) pairs.emplace_back(b, c);
  if (budget < pairs.size())
    throw std::invalid_argument("config budget " + std::to_string(budget) +
                                " is below the number of boundary classes (" +
                                std::to_string(pairs.size()) + ")");

  const std::size_t grid_room = budget - budget / 4;
  std::size_t k = 1;
  while ((k + 1) * (k + 1) * pairs.size() <= grid_room) ++k;

  std::vector<RootConfig> out;
  for (const auto& [b, c] : pairs) {
    const double period_u = manifold.surface(b).boundary(c).translation_length;
    const double period_r = fiber_period(manifold, b);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        add_unique(out, {b, c, period_u * static_cast<double>(i) / static_cast<double>(k),
                         period_r * static_cast<double>(j) / static_cast<double>(k), "grid"});
  }

  const std::size_t pilot_quota = std::min(budget / 4, budget - out.size());
  if (pilot_quota == 0) return out;
  TreeOptions o;
  o.eps = pilot.eps;
  o.beam = pilot.beam;
  o.keep_nodes = true;
  const WallTree tree = build_levels(manifold, root_state(manifold, 0, 1, 0.0, 0.0), 2 * n, o);
  std::size_t taken = 0;
  for (int level : {n, 2 * n}) {
    if (level >= static_cast<int>(tree.nodes.size())) continue;
    std::vector<std::size_t> order(tree.nodes[level].size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& nodes = tree.nodes[level];
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return nodes[a].state.L < nodes[b].state.L;
    });
    std::size_t here = 0;
    for (std::size_t idx : order) {
      if (here == pilot.states_per_level || taken == pilot_quota) break;
      const ExpansionState& s = nodes[idx].state;
      const std::size_t before = out.size();
      add_unique(out, {s.block, s.attach_class, s.u, s.r, "pilot"});
      if (out.size() > before) ++here, ++taken;
    }
  }
  return out;
}

double pn_at(const Manifold& manifold, const RootConfig& config, int n, double t,
             const TruncationParams& trunc) {
  return level_sum(level_lengths(manifold, config, n, trunc).L, t);
}

CertifyResult certify(const Manifold& manifold, int n, double h, const TruncationParams& trunc,
                      const std::vector<RootConfig>& configs) {
  if (!(h > 0.0)) throw std::invalid_argument("exponent must be positive");
  CertifyResult res;
  res.h = h;
  res.min_margin = std::numeric_limits<double>::infinity();
  for (const RootConfig& c : configs) {
    const LevelLengths ll = level_lengths(manifold, c, n, trunc);
    ConfigMargin cm{c, level_sum(ll.L, h), ll.truncated};
    res.min_margin = std::min(res.min_margin, cm.margin);
    res.configs.push_back(std::move(cm));
  }
  if (configs.empty()) res.min_margin = 0.0;
  return res;
}

CertifyResult certify(const Manifold& manifold, int n, double h, const TruncationParams& trunc,
                      std::size_t config_budget) {
  return certify(manifold, n, h, trunc, sample_configs(manifold, n, config_budget));
}

EntropyReport best_bound(const Manifold& manifold, const EntropyOptions& options) {
  if (options.n_list.empty()) throw std::invalid_argument("n_list must be nonempty");
  if (!(options.h_lo > 0.0) || !(options.h_hi > options.h_lo) || options.h_hi > 2.0)
    throw std::invalid_argument("need 0 < h_lo < h_hi <= 2");
  if (options.bisection_steps < 1 || options.bisection_steps > 40)
    throw std::invalid_argument("bisection_steps must lie in [1, 40]");

  EntropyReport rep;
  rep.h_lo = options.h_lo;
  rep.h_hi = options.h_hi;
  const long long K = 1LL << options.bisection_steps;
  rep.h_resolution = (options.h_hi - options.h_lo) / static_cast<double>(K);
  rep.trunc = options.trunc;
  rep.config_budget = options.config_budget;
  rep.alpha_0 = manifold.alpha_0();
  rep.l0 = manifold.l0();
  rep.h_bar = options.h_lo;
  for (const BlockSpec& b : manifold.spec().blocks) rep.block_ids.push_back(b.id);
  auto grid_h = [&](long long k) { return options.h_lo + static_cast<double>(k) * rep.h_resolution; };

  bool any_truncated = false;
  bool best_set = false;
  for (int n : options.n_list) {
    if (n < 0) throw std::invalid_argument("n must be nonnegative");
    const std::vector<RootConfig> configs =
        sample_configs(manifold, n, options.config_budget, options.pilot);
    std::vector<LevelLengths> all;
    all.reserve(configs.size());
    for (const RootConfig& c : configs) {
      all.push_back(level_lengths(manifold, c, n, options.trunc));
      any_truncated = any_truncated || all.back().truncated;
    }
    auto holds = [&](long long k) {
      const std::vector<double> s = sums_at(all, grid_h(k));
      return std::all_of(s.begin(), s.end(), [](double x) { return x >= 1.0; });
    };

    PerLevelBound pl;
    pl.n = n;
    pl.configs = configs.size();
    const std::vector<double> at_lo = sums_at(all, options.h_lo);
    pl.min_p_at_lo = *std::min_element(at_lo.begin(), at_lo.end());
    long long best_k = 0;
    if (holds(0)) {
      // Largest grid index with the predicate true; it is monotone in h.
      long long lo = 0, hi = K + 1;
      while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        (mid <= K && holds(mid) ? lo : hi) = mid;
      }
      best_k = lo;
    }
    pl.h_bar = grid_h(best_k);
    pl.certified = best_k > 0;
    const std::vector<double> margins = sums_at(all, pl.h_bar);
    pl.min_margin = *std::min_element(margins.begin(), margins.end());
    rep.per_level.push_back(pl);

    if (!best_set || pl.h_bar > rep.h_bar) {
      best_set = true;
      rep.h_bar = pl.h_bar;
      rep.n = n;
      rep.certified = pl.certified;
      rep.min_margin = pl.min_margin;
      rep.configs_tested.clear();
      for (std::size_t i = 0; i < configs.size(); ++i)
        rep.configs_tested.push_back({configs[i], margins[i], all[i].truncated});
    }
  }

  if (rep.h_bar > 2.0) throw std::logic_error("entropy bound above 2 contradicts the comparison with H^3");

  if (options.lemma_sweeps) {
    rep.lambda0_hat = std::numeric_limits<double>::infinity();
    for (int b = 0; b < manifold.block_count(); ++b) {
      const FuchsianSurface& s = manifold.surface(b);
      for (int c = 1; c <= s.class_count(); ++c) {
        const SweepGrids g = default_sweep_grids(s, c, manifold.l0(), manifold.alpha_0());
        rep.lambda0_hat = std::min(rep.lambda0_hat,
                                   lemma_sweep(s, c, g, options.sweep_eps).lambda0_hat);
      }
    }
  }

  rep.caveats.push_back("sampled-configurations: the bound is certified only over the tested "
                        "re-rooting configurations");
  rep.caveats.push_back("eps-truncation: walls seen under an angle below eps are omitted, so every "
                        "level sum is a lower bound");
  if (any_truncated)
    rep.caveats.push_back("pruned: beam, node budget or enumeration depth limits removed walls");
  if (!rep.certified) rep.caveats.push_back("truncation too coarse: no exponent above h_lo certified");
  return rep;
}

std::string EntropyReport::to_json() const {
  using nlohmann::json;
  json j;
  j["schema"] = kSchema;
  j["h_bar"] = h_bar;
  j["n"] = n;
  j["certified"] = certified;
  j["h_lo"] = h_lo;
  j["h_hi"] = h_hi;
  j["h_resolution"] = h_resolution;
  j["epsilon"] = trunc.eps;
  j["beam"] = trunc.beam ? json(*trunc.beam) : json(nullptr);
  j["depth_cap"] = trunc.depth_cap;
  j["node_budget"] = trunc.node_budget;
  j["config_budget"] = config_budget;
  j["min_margin"] = min_margin;
  j["lambda0_hat"] = lambda0_hat;
  j["alpha_0"] = alpha_0;
  j["l0"] = l0;
  j["configs_tested"] = json::array();
  for (const ConfigMargin& c : configs_tested)
    j["configs_tested"].push_back({{"block", block_ids.at(c.config.block)},
                                   {"class", c.config.attach_class},
                                   {"u", c.config.u},
                                   {"r", c.config.r},
                                   {"source", c.config.source},
                                   {"margin", c.margin},
                                   {"truncated", c.truncated}});
  j["per_level"] = json::array();
  for (const PerLevelBound& p : per_level)
    j["per_level"].push_back({{"n", p.n},
                              {"h_bar", p.h_bar},
                              {"min_margin", p.min_margin},
                              {"min_p_at_h_lo", p.min_p_at_lo},
                              {"configs", p.configs},
                              {"certified", p.certified}});
  j["caveats"] = caveats;
  j["divergence"] = certified
                        ? "every tested level-n block sum is >= 1 at h_bar, so the series over "
                          "re-rooted levels kn diverges there and h >= h_bar"
                        : "not established at this truncation";
  return j.dump(2) + "\n";
}

std::string EntropyReport::to_text() const {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "h_bar = %.6f at n = %d (%s)\n", h_bar, n,
                certified ? "certified above h_lo" : "not certified");
  out << buf;
  std::snprintf(buf, sizeof buf, "min margin %.6f over %zu configurations; eps %.3g, beam %s\n",
                min_margin, configs_tested.size(), trunc.eps,
                trunc.beam ? std::to_string(*trunc.beam).c_str() : "none");
  out << buf;
  if (lambda0_hat > 0.0) {
    std::snprintf(buf, sizeof buf, "lambda0_hat = %.6f (alpha_0 %.6f, l0 %.6f)\n", lambda0_hat,
                  alpha_0, l0);
    out << buf;
  }
  for (const PerLevelBound& p : per_level) {
    std::snprintf(buf, sizeof buf, "  n = %d: h_bar %.6f, min P_n(h_lo) %.6f, %zu configs\n", p.n,
                  p.h_bar, p.min_p_at_lo, p.configs);
    out << buf;
  }
  for (const std::string& c : caveats) out << "caveat: " << c << '\n';
  return out.str();
}

}  // namespace graphent
