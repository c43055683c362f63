#pragma once

// Compact hyperbolic surfaces with geodesic boundary and the boundary lines
// of their universal cover as seen from an observer.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "graphent/hyperbolic.hpp"

namespace graphent {

struct PantsParams {
  double L1 = 0.0;
  double L2 = 0.0;
  double L3 = 0.0;
};

/// One conjugacy class of boundary curves, realized on its canonical lift.
struct BoundaryClass {
  int class_id = 0;  // 1-based
  std::string word;  // over A, B; lowercase letters are inverses
  HIsometry representative;
  HLine axis;  // oriented so the surface lies on the positive (left) side
  double translation_length = 0.0;
  HPoint arc_origin;      // foot of the common perpendicular to the next axis
  LineChart chart;        // arc length along `axis` from arc_origin
  int interior_side = 1;  // side of `axis` holding the surface
};

class FuchsianSurface {
 public:
  /// Pants glued from two right-angled hexagons with alternate sides L/2.
  static FuchsianSurface pants(const PantsParams& params);
  /// Free group <A, B> with declared boundary words (1 to 3 classes).
  static FuchsianSurface generic(const HIsometry& a, const HIsometry& b,
                                 const std::vector<std::string>& boundary_words);

  const HIsometry& generator_a() const { return a_; }
  const HIsometry& generator_b() const { return b_; }
  const std::vector<BoundaryClass>& classes() const { return classes_; }
  const BoundaryClass& boundary(int class_id) const;
  std::vector<double> boundary_lengths() const;
  int class_count() const { return static_cast<int>(classes_.size()); }

  bool is_pants() const { return is_pants_; }
  /// Pants only: seam k is the common perpendicular of the two axes other than
  /// axis k, oriented with the base hexagon on its positive side.
  const std::array<HLine, 3>& seams() const { return seams_; }
  /// Pants only: a point inside the base hexagon.
  const HPoint& hexagon_center() const { return hexagon_center_; }

  /// Checks the structural invariants; returns an empty string when they hold.
  std::string check_invariants(double tol = 1e-9) const;

 private:
  FuchsianSurface() = default;
  void finish_classes();

  HIsometry a_, b_;
  std::vector<BoundaryClass> classes_;
  bool is_pants_ = false;
  std::array<HLine, 3> seams_{};
  HPoint hexagon_center_;
};

/// Evaluates a word over {A, a, B, b} (lowercase = inverse).
HIsometry evaluate_word(const FuchsianSurface& surface, std::string_view word);

/// Free reduction of a word over {A, a, B, b}.
std::string reduce_word(std::string_view word);

/// Seam length between boundary axes i and j, with k the third index:
/// arccosh((cosh lk + cosh li cosh lj) / (sinh li sinh lj)), l = L/2.
double hexagon_seam_length(double Li, double Lj, double Lk);

/// Observer placed at distance l outside the attaching boundary line, over the
/// point at arc length u from the class origin.
struct Observer {
  int attach_class = 0;
  HLine attach_line;
  HPoint foot;         // o_0 on the attaching line
  HPoint position;     // o
  double l = 0.0;
  Vec3 inward;         // unit tangent at o pointing into the surface
  Vec3 along;          // unit tangent at o parallel to the attaching line
  double psi_total = 0.0;
};

Observer make_observer(const FuchsianSurface& surface, int attach_class, double u, double l);

struct WallSight {
  int class_id = 0;
  std::string word;  // deck element carrying the canonical lift to this line
  HLine line;        // oriented with the surface on its positive side
  HPoint lift_origin;
  LineChart chart;   // arc length along `line` from lift_origin
  double dist = 0.0;
  HPoint foot;
  double psi = 0.0;
  double foot_offset = 0.0;  // in [0, translation length)
  double offset_shift = 0.0; // raw arc length of the foot minus foot_offset
  double theta = 0.0;        // signed direction at the observer, 0 = toward the foot
};

enum class EnumerationStrategy { Automatic, Chambers, Words };

struct WallEnumeration {
  std::vector<WallSight> walls;
  bool stabilized = true;
  std::size_t nodes_visited = 0;
  double psi_sum() const;
};

inline constexpr int kDefaultDepthCap = 64;

/// All boundary lines of the universal cover other than the attaching line
/// with visual angle >= eps from the observer, sorted by theta.
WallEnumeration enumerate_walls(const FuchsianSurface& surface, int attach_class, double u,
                                double l, double eps, int depth_cap = kDefaultDepthCap,
                                EnumerationStrategy strategy = EnumerationStrategy::Automatic);

WallEnumeration enumerate_walls(const FuchsianSurface& surface, const Observer& observer,
                                double eps, int depth_cap = kDefaultDepthCap,
                                EnumerationStrategy strategy = EnumerationStrategy::Automatic);

/// Minimum distance between distinct boundary lines found within depth_cap.
double min_boundary_gap(const FuchsianSurface& surface, int depth_cap = 4);

/// Reduces an arc length into [0, period).
double reduce_offset(double s, double period);

}  // namespace graphent
