#include "graphent/wall_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <stdexcept>
#include <tuple>

#include "graphent/format.hpp"
#include "graphent/parallel.hpp"

namespace graphent {
namespace {

End opposite(End e) { return e == End::A ? End::B : End::A; }

struct BeamKey {
  double L;
  std::int64_t parent;
  std::int32_t child;
  bool operator<(const BeamKey& o) const {
    return std::tie(L, parent, child) < std::tie(o.L, o.parent, o.child);
  }
};

// Parent's expansion result kept only as long as the fold needs it.
struct Batch {
  std::vector<WallNode> children;
  double lambda = 0.0;
  bool stabilized = true;
};

}  // namespace

ExpansionState root_state(const Manifold& manifold, int root_block, int root_class, double u0,
                          double r0) {
  if (root_block < 0 || root_block >= manifold.block_count())
    throw std::out_of_range("root block index out of range");
  const FuchsianSurface& s = manifold.surface(root_block);
  if (root_class < 1 || root_class > s.class_count())
    throw std::out_of_range("root boundary class out of range");
  ExpansionState st;
  st.block = root_block;
  st.attach_class = root_class;
  st.u = reduce_offset(u0, s.boundary(root_class).translation_length);
  st.r = r0;
  st.l = 0.0;
  st.alpha = manifold.edge(manifold.crossing(root_block, root_class).edge).alpha;
  st.L = 0.0;
  st.depth = 0;
  return st;
}

NodeExpansion expand_node(const Manifold& manifold, const ExpansionState& state, double eps,
                          int depth_cap) {
  NodeExpansion out;
  out.records = expand_children(manifold.surface(state.block), state, eps, depth_cap);
  auto& recs = out.records.children;
  std::stable_sort(recs.begin(), recs.end(), [](const ChildRecord& a, const ChildRecord& b) {
    return std::tie(a.sight.class_id, a.sight.theta) < std::tie(b.sight.class_id, b.sight.theta);
  });
  out.children.reserve(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const ChildRecord& rec = recs[i];
    const Crossing& cr = manifold.crossing(state.block, rec.sight.class_id);
    const EdgeSpec& edge = manifold.edge(cr.edge);
    const WallCoords far = transition_apply(edge, cr.from, {rec.sight.foot_offset, state.r});
    const double period = manifold.surface(cr.far_block).boundary(cr.far_class).translation_length;

    WallNode node;
    node.child_index = static_cast<std::int32_t>(i);
    node.edge = cr.edge;
    node.from = cr.from;
    node.state.block = cr.far_block;
    node.state.attach_class = cr.far_class;
    node.state.u = reduce_offset(far.u, period);
    node.u_shift = far.u - node.state.u;
    node.state.r = far.r;
    node.state.l = rec.l_second;
    node.state.alpha = edge.alpha;
    node.state.L = state.L - state.l + rec.l_tilde - rec.delta;
    node.state.depth = state.depth + 1;
    out.lambda += rec.weight_factor;
    out.children.push_back(node);
  }
  return out;
}

WallTree build_levels(const Manifold& manifold, const ExpansionState& root, int n_max,
                      const TreeOptions& options) {
  if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
  if (!(options.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (options.beam && *options.beam == 0) throw std::invalid_argument("beam must be at least 1");

  WallTree tree;
  tree.root = root;
  tree.eps = options.eps;
  tree.depth_cap = options.depth_cap;
  tree.t_values = options.t_values;
  const std::size_t nt = options.t_values.size();

  std::vector<WallNode> parents(1);
  parents[0].state = root;
  bool pruned = false;
  bool stable_so_far = true;
  constexpr std::size_t kChunk = 512;

  for (int n = 0; n <= n_max && !parents.empty(); ++n) {
    LevelSummary sum;
    sum.n = n;
    sum.p_hat.assign(nt, 0.0);
    sum.lambda_min = std::numeric_limits<double>::infinity();
    const bool last = n == n_max;
    const bool store = options.keep_nodes || !last;
    const bool record = std::find(options.record_levels.begin(), options.record_levels.end(), n) !=
                        options.record_levels.end();
    std::vector<double>* lengths = record ? &tree.lengths[n] : nullptr;

    std::vector<WallNode> next;
    std::priority_queue<BeamKey> heap;
    std::vector<WallNode> beam_pool;  // candidates referenced by heap entries
    bool beam_dropped = false;
    bool stop = false;

    for (std::size_t lo = 0; lo < parents.size() && !stop; lo += kChunk) {
      const std::size_t hi = std::min(parents.size(), lo + kChunk);
      std::vector<Batch> batches(hi - lo);
      parallel_for(hi - lo, [&](std::size_t k) {
        NodeExpansion ex = expand_node(manifold, parents[lo + k].state, options.eps,
                                       options.depth_cap);
        if (n == 0) {
          tree.root_psi_sum = ex.records.psi_sum;
          tree.root_psi_total = ex.records.psi_total;
        }
        batches[k] = Batch{std::move(ex.children), ex.lambda, ex.records.stabilized};
      });

      for (std::size_t k = 0; k < batches.size(); ++k) {
        Batch& b = batches[k];
        const std::int64_t pidx = n == 0 ? -1 : static_cast<std::int64_t>(lo + k);
        sum.stabilized = sum.stabilized && b.stabilized;
        sum.lambda_min = std::min(sum.lambda_min, b.lambda);
        for (WallNode& c : b.children) {
          c.parent = pidx;
          const double L = c.state.L;
          for (std::size_t j = 0; j < nt; ++j) sum.p_hat[j] += std::exp(-options.t_values[j] * L);
          if (lengths) lengths->push_back(L);
          ++sum.count;
          if (!store) continue;
          if (options.beam) {
            const BeamKey key{L, pidx, c.child_index};
            if (heap.size() < *options.beam) {
              heap.push(key);
              beam_pool.push_back(c);
            } else if (key < heap.top()) {
              heap.pop();
              heap.push(key);
              beam_pool.push_back(c);
              beam_dropped = true;
            } else {
              beam_dropped = true;
            }
          } else {
            next.push_back(c);
          }
        }
        if (options.beam && beam_pool.size() > 4 * *options.beam + kChunk) {
          // Compact the pool to the nodes still referenced by the heap.
          std::vector<BeamKey> keys;
          keys.reserve(heap.size());
          for (auto h = heap; !h.empty(); h.pop()) keys.push_back(h.top());
          std::sort(keys.begin(), keys.end(), [](const BeamKey& a, const BeamKey& b) {
            return std::tie(a.parent, a.child) < std::tie(b.parent, b.child);
          });
          std::vector<WallNode> kept;
          kept.reserve(keys.size());
          std::size_t ki = 0;
          for (const WallNode& c : beam_pool) {
            if (ki < keys.size() && c.parent == keys[ki].parent && c.child_index == keys[ki].child) {
              kept.push_back(c);
              ++ki;
            }
          }
          beam_pool = std::move(kept);
        }
        if (sum.count > options.node_budget) {
          tree.budget_exceeded = true;
          stop = true;
          break;
        }
      }
    }

    if (options.beam && store) {
      std::vector<BeamKey> keys;
      keys.reserve(heap.size());
      for (; !heap.empty(); heap.pop()) keys.push_back(heap.top());
      std::sort(keys.begin(), keys.end(), [](const BeamKey& a, const BeamKey& b) {
        return std::tie(a.parent, a.child) < std::tie(b.parent, b.child);
      });
      next.reserve(keys.size());
      std::size_t ki = 0;
      for (const WallNode& c : beam_pool) {
        if (ki < keys.size() && c.parent == keys[ki].parent && c.child_index == keys[ki].child) {
          next.push_back(c);
          ++ki;
        }
      }
    }

    stable_so_far = stable_so_far && sum.stabilized;
    if (!std::isfinite(sum.lambda_min)) sum.lambda_min = 0.0;
    sum.retained = store ? next.size() : 0;
    sum.truncated = pruned || stop || !stable_so_far;
    tree.levels.push_back(sum);
    pruned = pruned || beam_dropped || stop;
    if (n == 0) tree.tail = 0.25 * (tree.root_psi_total - tree.root_psi_sum);
    if (options.keep_nodes) tree.nodes.push_back(next);
    if (stop) break;
    parents = std::move(next);
  }
  return tree;
}

std::string WallTree::to_csv() const {
  std::string out = "n,count,t,p_hat,lambda_min,truncated\n";
  for (const LevelSummary& s : levels)
    for (std::size_t j = 0; j < t_values.size(); ++j)
      out += std::to_string(s.n) + ',' + std::to_string(s.count) + ',' +
             format_double(t_values[j]) + ',' + format_double(s.p_hat[j]) + ',' +
             format_double(s.lambda_min) + ',' + (s.truncated ? "1" : "0") + '\n';
  return out;
}

namespace {

// One step of a node's ancestor chain, with the geometry needed to re-enter it.
struct ChainLink {
  ExpansionState parent_state;
  WallNode node;
  ChildRecord record;
};

std::vector<ChainLink> ancestor_chain(const Manifold& manifold, const WallTree& tree, int level,
                                      std::size_t index) {
  if (level < 0 || level >= static_cast<int>(tree.nodes.size()))
    throw std::out_of_range("level not retained in this tree");
  if (index >= tree.nodes[level].size()) throw std::out_of_range("node index out of range");
  std::vector<WallNode> path;
  std::int64_t idx = static_cast<std::int64_t>(index);
  for (int j = level; j >= 0; --j) {
    const WallNode& nd = tree.nodes[j].at(static_cast<std::size_t>(idx));
    path.push_back(nd);
    idx = nd.parent;
  }
  std::reverse(path.begin(), path.end());

  std::vector<ChainLink> chain;
  ExpansionState parent = tree.root;
  for (const WallNode& nd : path) {
    NodeExpansion ex = expand_node(manifold, parent, tree.eps, tree.depth_cap);
    ChainLink link{parent, nd, ex.records.children.at(static_cast<std::size_t>(nd.child_index))};
    chain.push_back(link);
    parent = nd.state;
  }
  return chain;
}

HPoint on_attach_line(const Manifold& m, const ExpansionState& s, double arc) {
  return m.surface(s.block).boundary(s.attach_class).chart.at(arc);
}

// Far-side wall coordinates of link j's wall mapped into the near-side chart.
// Returns the near-side arc coordinate and height.
WallCoords far_to_near(const Manifold& m, const ChainLink& link, double u, double r) {
  const EdgeSpec& edge = m.edge(link.node.edge);
  const WallCoords near = transition_apply(edge, opposite(link.node.from), {u + link.node.u_shift, r});
  return {near.u + link.record.sight.offset_shift, near.r};
}

// Near-side point (raw arc a along the link's line, height b) in the far chart.
PrismPoint near_to_far(const Manifold& m, const ChainLink& link, double a, double b) {
  const EdgeSpec& edge = m.edge(link.node.edge);
  const WallCoords far =
      transition_apply(edge, link.node.from, {a - link.record.sight.offset_shift, b});
  return {on_attach_line(m, link.node.state, far.u - link.node.u_shift), far.r};
}

}  // namespace

BrokenPath reconstruct_path(const Manifold& manifold, const WallTree& tree, int level,
                            std::size_t index) {
  const std::vector<ChainLink> chain =
      ancestor_chain(manifold, tree, level, index);
  BrokenPath path;
  for (std::size_t j = 0; j < chain.size(); ++j) {
    const ChainLink& link = chain[j];
    const ExpansionState& ps = link.parent_state;
    const PrismPoint start{on_attach_line(manifold, ps, ps.u + link.record.t_offset), ps.r};
    PrismPoint end;
    double arc = 0.0;
    if (j + 1 < chain.size()) {
      const ChainLink& next = chain[j + 1];
      const WallCoords near = far_to_near(manifold, link, link.node.state.u + next.record.t_offset,
                                          link.node.state.r);
      arc = near.u;
      end = {link.record.sight.chart.at(arc), near.r};
    } else {
      arc = link.record.sight.offset_shift + link.record.sight.foot_offset;
      end = {link.record.sight.foot, ps.r};
    }
    path.start.push_back(start);
    path.end.push_back(end);
    path.end_arc.push_back(arc);
    path.length += prism_dist(start, end);
  }
  return path;
}

namespace {

// Minimizes a convex function of one variable near x by bracketing and
// golden-section search.
template <class F>
double line_minimize(F&& f, double x, double fx) {
  double step = 0.5;
  double a = x - step, b = x + step;
  double fa = f(a), fb = f(b);
  if (fa >= fx && fb >= fx) {
    // Minimum already bracketed by [a, b].
  } else {
    const double dir = fa < fb ? -1.0 : 1.0;
    double lo = x, mid = dir < 0 ? a : b, fmid = std::min(fa, fb);
    for (int i = 0; i < 60; ++i) {
      step *= 2.0;
      const double probe = x + dir * step;
      const double fp = f(probe);
      if (fp >= fmid) {
        a = std::min(lo, probe);
        b = std::max(lo, probe);
        break;
      }
      lo = mid;
      mid = probe;
      fmid = fp;
      a = std::min(lo, probe);
      b = std::max(lo, probe);
    }
  }
  constexpr double g = 0.6180339887498949;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-12 * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a), fd = f(d);
    }
  }
  const double xm = 0.5 * (a + b);
  return f(xm) < fx ? xm : x;
}

}  // namespace

OracleResult distance_lower_bound_check(const Manifold& manifold, const WallTree& tree, int level,
                                        std::size_t index, int samples, std::uint64_t seed) {
  const std::vector<ChainLink> chain = ancestor_chain(manifold, tree, level, index);
  const BrokenPath path = reconstruct_path(manifold, tree, level, index);
  const std::size_t k = chain.size();
  const PrismPoint x0{on_attach_line(manifold, tree.root, tree.root.u), tree.root.r};

  auto length = [&](const std::vector<double>& v) {
    double total = 0.0;
    PrismPoint start = x0;
    for (std::size_t j = 0; j < k; ++j) {
      const WallSight& s = chain[j].record.sight;
      const PrismPoint end{s.chart.at(v[2 * j]), v[2 * j + 1]};
      total += prism_dist(start, end);
      if (j + 1 < k) start = near_to_far(manifold, chain[j], v[2 * j], v[2 * j + 1]);
    }
    return total;
  };

  std::vector<double> base(2 * k);
  for (std::size_t j = 0; j < k; ++j) {
    base[2 * j] = path.end_arc[j];
    base[2 * j + 1] = path.end[j].height;
  }

  OracleResult res;
  res.stored_L = chain.back().node.state.L;
  res.path_L = path.length;
  res.oracle_dist = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-2.0, 2.0);
  for (int trial = 0; trial < std::max(1, samples); ++trial) {
    std::vector<double> v = base;
    if (trial > 0)
      for (double& x : v) x += jitter(rng);
    double fv = length(v);
    bool done = false;
    for (int sweep = 0; sweep < 2000 && !done; ++sweep) {
      const double before = fv;
      for (std::size_t i = 0; i < v.size(); ++i) {
        auto f = [&](double x) {
          const double keep = v[i];
          v[i] = x;
          const double r = length(v);
          v[i] = keep;
          return r;
        };
        v[i] = line_minimize(f, v[i], fv);
        fv = length(v);
      }
      done = before - fv <= 1e-14 * (1.0 + fv);
    }
    res.converged = res.converged && done;
    res.oracle_dist = std::min(res.oracle_dist, fv);
  }
  return res;
}

}  // namespace graphent
