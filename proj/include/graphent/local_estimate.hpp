#pragma once

// The single-block configuration: an observer at distance l outside one
// boundary line of the universal cover of a surface, the other boundary lines
// it sees, and the gain from tilting the first segment inside the flat wall.

#include <cstddef>
#include <string>
#include <vector>

#include "graphent/surface.hpp"

namespace graphent {

struct ExpansionState {
  int block = 0;         // index into the manifold's blocks (0 for a bare surface)
  int attach_class = 1;  // boundary class of the wall the observer looks through
  double u = 0.0;        // foot offset on the attaching line, in [0, translation length)
  double r = 0.0;        // slice height in this block
  double l = 0.0;        // length of the incoming last segment
  double alpha = 0.0;    // wall angle at the attaching wall; unused when l = 0
  double L = 0.0;        // accumulated broken-geodesic length
  int depth = 0;
};

struct ChildRecord {
  WallSight sight;
  HPoint t_point;       // where the segment observer -> foot crosses the attaching line
  double t_offset = 0;  // signed arc length of t_point from the observer's foot
  double d = 0;         // |t_offset|
  double l_tilde_prime = 0;
  double l_second = 0;
  double l_tilde = 0;
  double delta = 0;
  double tau = 0;
  double weight_factor = 0;
};

struct Expansion {
  std::vector<ChildRecord> children;
  bool stabilized = true;
  double psi_sum = 0.0;
  double psi_total = 0.0;
};

Expansion expand_children(const FuchsianSurface& surface, const ExpansionState& state, double eps,
                          int depth_cap = kDefaultDepthCap);

/// Sum of weight factors over the children: e^l * sum e^{Delta} e^{-l~}.
double lambda_value(const FuchsianSurface& surface, const ExpansionState& state, double eps,
                    int depth_cap = kDefaultDepthCap);
double lambda_value(const Expansion& expansion);

struct SweepRow {
  double l = 0;
  double alpha = 0;
  double u = 0;
  double lambda = 0;
  double sum_tau = 0;
  double m0_hat = 0;      // sum of tau over children with d >= a0_threshold
  double delta0_hat = 0;  // min delta over the same children (0 if there are none)
};

struct SweepTable {
  std::vector<SweepRow> rows;
  double lambda0_hat = 0.0;  // min lambda over rows
  bool stabilized = true;

  std::string to_csv() const;
};

struct SweepGrids {
  std::vector<double> l;
  std::vector<double> alpha;
  std::vector<double> u;
};

/// Log-spaced l in [max(0.25, l0), 6] (12 points), alpha linear in
/// [alpha0, pi/2] (8 points, or one when alpha0 = pi/2), 8 offsets per class.
SweepGrids default_sweep_grids(const FuchsianSurface& surface, int attach_class, double l0,
                               double alpha0);

inline constexpr double kDefaultSweepEps = 1e-6;

SweepTable lemma_sweep(const FuchsianSurface& surface, int attach_class, const SweepGrids& grids,
                       double eps, int depth_cap = kDefaultDepthCap, double a0_threshold = 1.0);

std::vector<double> linspace(double lo, double hi, std::size_t n);
std::vector<double> logspace(double lo, double hi, std::size_t n);

}  // namespace graphent
