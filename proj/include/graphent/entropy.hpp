#pragma once

// Self-similarity driver: level sums re-rooted at sampled base configurations,
// and the largest exponent at which all of them stay at or above 1.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "graphent/wall_tree.hpp"

namespace graphent {

struct RootConfig {
  int block = 0;
  int attach_class = 1;
  double u = 0.0;
  double r = 0.0;
  std::string source;  // "grid" or "pilot"
};

struct TruncationParams {
  double eps = 1e-5;
  std::optional<std::size_t> beam;  // none: keep every node
  int depth_cap = kDefaultDepthCap;
  std::size_t node_budget = 20'000'000;
};

/// Pilot run used to harvest re-rooting states; fixed so that the sampled
/// configuration set does not depend on the truncation being certified.
struct PilotParams {
  double eps = 1e-3;
  std::size_t beam = 2000;
  std::size_t states_per_level = 4;
};

/// Grid over (u, r) for every (block, class) plus pilot states at levels n and
/// 2n, deduplicated, at most `budget` entries. The budget must cover one grid
/// point per (block, class).
std::vector<RootConfig> sample_configs(const Manifold& manifold, int n, std::size_t budget,
                                       const PilotParams& pilot = {});

/// Sum over the level-n walls of exp(-t L) for the tree rooted at `config`.
double pn_at(const Manifold& manifold, const RootConfig& config, int n, double t,
             const TruncationParams& trunc);

struct ConfigMargin {
  RootConfig config;
  double margin = 0.0;  // level-n sum at the tested exponent
  bool truncated = false;
};

struct CertifyResult {
  double h = 0.0;
  double min_margin = 0.0;
  std::vector<ConfigMargin> configs;
};

CertifyResult certify(const Manifold& manifold, int n, double h, const TruncationParams& trunc,
                      const std::vector<RootConfig>& configs);
CertifyResult certify(const Manifold& manifold, int n, double h, const TruncationParams& trunc,
                      std::size_t config_budget);

struct EntropyOptions {
  std::vector<int> n_list{2};
  double h_lo = 1.0;
  double h_hi = 2.0;
  int bisection_steps = 10;  // h is searched on a grid of spacing (h_hi - h_lo) / 2^steps
  TruncationParams trunc;
  std::size_t config_budget = 32;
  PilotParams pilot;
  bool lemma_sweeps = true;
  double sweep_eps = kDefaultSweepEps;
};

struct PerLevelBound {
  int n = 0;
  double h_bar = 1.0;
  double min_margin = 0.0;     // at h_bar
  double min_p_at_lo = 0.0;    // at h_lo
  std::size_t configs = 0;
  bool certified = false;
};

struct EntropyReport {
  static constexpr int kSchema = 1;
  double h_bar = 1.0;
  int n = 0;
  bool certified = false;  // h_bar > h_lo with every tested margin >= 1
  double h_lo = 1.0;
  double h_hi = 2.0;
  double h_resolution = 0.0;
  TruncationParams trunc;
  std::size_t config_budget = 0;
  std::vector<ConfigMargin> configs_tested;  // margins at h_bar for the reported n
  double min_margin = 0.0;
  double lambda0_hat = 0.0;  // 0 when sweeps were skipped
  double alpha_0 = 0.0;
  double l0 = 0.0;
  std::vector<PerLevelBound> per_level;
  std::vector<std::string> caveats;
  std::vector<std::string> block_ids;  // indexed by RootConfig::block

  std::string to_json() const;
  std::string to_text() const;
};

EntropyReport best_bound(const Manifold& manifold, const EntropyOptions& options);

}  // namespace graphent
