#pragma once

// Level-by-level expansion of the walls of the universal cover, carrying the
// broken-geodesic length L of each wall and the truncated level sums.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphent/local_estimate.hpp"
#include "graphent/manifold.hpp"

namespace graphent {

/// A wall of the cover; `state` describes the block beyond it.
struct WallNode {
  std::int64_t parent = -1;  // index into the previous level's retained nodes, -1 for the root
  std::int32_t child_index = 0;  // position among the parent's sorted children
  std::int32_t edge = -1;
  End from = End::A;    // side of `edge` the node was reached from
  double u_shift = 0.0; // far-side offset removed when reducing u
  ExpansionState state;
};

ExpansionState root_state(const Manifold& manifold, int root_block, int root_class, double u0,
                          double r0);

struct NodeExpansion {
  Expansion records;             // sorted by (class_id, theta)
  std::vector<WallNode> children;  // parallel to records.children
  double lambda = 0.0;           // sum of weight factors
};

NodeExpansion expand_node(const Manifold& manifold, const ExpansionState& state, double eps,
                          int depth_cap = kDefaultDepthCap);

struct TreeOptions {
  double eps = 1e-3;
  int depth_cap = kDefaultDepthCap;
  std::optional<std::size_t> beam = 200000;
  std::vector<double> t_values{1.0};
  std::size_t node_budget = 20'000'000;  // generated nodes per level before a graceful stop
  bool keep_nodes = true;                // retain every level's nodes (needed by the oracles)
  std::vector<int> record_levels;        // levels whose generated lengths L are kept
};

struct LevelSummary {
  int n = 0;
  std::size_t count = 0;     // generated nodes at this level
  std::size_t retained = 0;  // after the beam
  std::vector<double> p_hat; // one per t value: sum of exp(-t L) over generated nodes
  double lambda_min = 0.0;   // min over expanded parents of their weight sums
  bool truncated = false;
  bool stabilized = true;
};

struct WallTree {
  ExpansionState root;
  double eps = 0.0;
  int depth_cap = kDefaultDepthCap;
  std::vector<double> t_values;
  double root_psi_sum = 0.0;
  double root_psi_total = 0.0;
  double tail = 0.0;  // (psi_total - psi_sum) / 4 at the root
  std::vector<LevelSummary> levels;
  std::vector<std::vector<WallNode>> nodes;  // retained nodes per level
  std::map<int, std::vector<double>> lengths;
  bool budget_exceeded = false;

  std::string to_csv() const;
};

WallTree build_levels(const Manifold& manifold, const ExpansionState& root, int n_max,
                      const TreeOptions& options);

/// Vertices of a node's broken geodesic, one segment per block, recomputed
/// from raw geometry along the ancestor path.
struct BrokenPath {
  std::vector<PrismPoint> start;  // segment i starts here, in block i's chart
  std::vector<PrismPoint> end;    // and ends here, same chart
  std::vector<double> end_arc;    // arc coordinate of `end` on the crossed wall's line
  double length = 0.0;
};

BrokenPath reconstruct_path(const Manifold& manifold, const WallTree& tree, int level,
                            std::size_t index);

struct OracleResult {
  double oracle_dist = 0.0;
  double stored_L = 0.0;
  double path_L = 0.0;  // geometric recomputation of L
  bool converged = true;
  bool sound() const { return oracle_dist <= stored_L + 1e-6; }
};

/// Minimizes the length of paths from the base point to the node's wall through
/// the same intermediate walls, by coordinate descent from `samples` starts.
OracleResult distance_lower_bound_check(const Manifold& manifold, const WallTree& tree, int level,
                                        std::size_t index, int samples, std::uint64_t seed = 1);

}  // namespace graphent
