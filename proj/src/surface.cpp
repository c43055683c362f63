#include "graphent/surface.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace graphent {
namespace {

// Lines whose polar vectors have <p,q> within this of 1 are the same line.
constexpr double kSameLineTol = 1e-7;

bool same_line(const HLine& a, const HLine& b) {
  return std::abs(minkowski(a.p, b.p) - 1.0) < kSameLineTol;
}

HPoint foot_of_common_perpendicular(const HLine& on, const HLine& other) {
  return intersection(on, common_perpendicular(on, other));
}

HLine oriented_toward(const HLine& line, const HPoint& inside) {
  return line.side_value(inside) >= 0.0 ? line : line.reversed();
}

// Seam index pairs (1-based) to generator words; C = R1 R2 = (AB)^{-1}.
std::string_view pair_word(int first, int second) {
  if (first == 2 && second == 3) return "A";
  if (first == 3 && second == 1) return "B";
  if (first == 1 && second == 2) return "ba";
  if (first == 3 && second == 2) return "a";
  if (first == 1 && second == 3) return "b";
  if (first == 2 && second == 1) return "AB";
  throw std::logic_error("not a reduced reflection pair");
}

struct Candidate {
  int class_index = 0;
  std::size_t node = 0;  // search-tree node owning the lift
  HLine line;
  double dist = 0.0;
  double psi = 0.0;
  double theta = 0.0;
  HPoint foot;
  int depth = 0;
};

double theta_of(const Observer& obs, const HPoint& target) {
  const Vec3 v = direction_to(obs.position, target);
  return std::atan2(minkowski(v, obs.along), minkowski(v, obs.inward));
}

// Sorts by theta and drops repeated lifts of the same line (shallowest kept).
// Distinct boundary lines have disjoint shadows, so lifts of one line are
// adjacent after sorting and overlap in direction.
std::vector<Candidate> deduplicate(std::vector<Candidate> cands) {
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    if (x.theta != y.theta) return x.theta < y.theta;
    if (x.depth != y.depth) return x.depth < y.depth;
    return x.node < y.node;
  });
  std::vector<Candidate> out;
  for (Candidate& c : cands) {
    if (!out.empty()) {
      Candidate& prev = out.back();
      if (c.theta - prev.theta < 0.25 * (c.psi + prev.psi)) {
        if (c.depth < prev.depth || (c.depth == prev.depth && c.node < prev.node)) prev = c;
        continue;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

WallSight make_sight(const FuchsianSurface& surface, const Observer& obs, const Candidate& c,
                     const HIsometry& lift, std::string word) {
  const BoundaryClass& bc = surface.classes()[c.class_index];
  WallSight s;
  s.class_id = bc.class_id;
  s.word = std::move(word);
  s.line = c.line;
  s.chart = bc.chart.transformed(lift);
  s.lift_origin = s.chart.at(0.0);
  s.dist = c.dist;
  s.foot = c.foot;
  s.psi = c.psi;
  s.theta = c.theta;
  // The observer's foot coordinate equals the foot's, without the cancellation
  // of two far points.
  const double raw = s.chart.coordinate(obs.position);
  s.foot_offset = reduce_offset(raw, bc.translation_length);
  s.offset_shift = raw - s.foot_offset;
  return s;
}

bool accept_line(const Observer& obs, const HLine& line, double eps, Candidate& out) {
  if (same_line(line, obs.attach_line)) return false;
  const double psi = visual_angle(std::asinh(std::abs(line.side_value(obs.position))));
  if (psi < eps) return false;
  const FootResult fr = foot_and_dist(obs.position, line);
  out.line = line;
  out.dist = fr.dist;
  out.psi = psi;
  out.foot = fr.foot;
  out.theta = theta_of(obs, fr.foot);
  return true;
}

// Breadth-first search over the chambers of the seam-reflection group. The
// chamber graph is a tree; a seam is crossed only if the observer is beyond
// it or the half-plane behind it subtends at least eps. Lines first met
// behind a seam lie in that half-plane, so the prune never drops a line with
// psi >= eps.
WallEnumeration enumerate_chambers(const FuchsianSurface& surface, const Observer& obs,
                                   double eps, int depth_cap) {
  struct Node {
    HIsometry g;
    int last = -1;  // seam index of the last reflection, 0-based
    int depth = 0;
    std::size_t parent = 0;
  };
  std::array<HIsometry, 3> reflections;
  for (int k = 0; k < 3; ++k) reflections[k] = HIsometry::reflection(surface.seams()[k]);

  WallEnumeration result;
  std::vector<Node> nodes;
  nodes.push_back(Node{});
  std::deque<std::size_t> queue{0};
  std::vector<Candidate> cands;

  while (!queue.empty()) {
    const std::size_t idx = queue.front();
    queue.pop_front();
    const Node node = nodes[idx];
    for (int i = 0; i < 3; ++i) {
      Candidate c;
      if (accept_line(obs, node.g.apply(surface.classes()[i].axis), eps, c)) {
        c.class_index = i;
        c.node = idx;
        c.depth = node.depth;
        cands.push_back(c);
      }
    }
    for (int j = 0; j < 3; ++j) {
      if (j == node.last) continue;
      const double s = minkowski(obs.position.x, node.g.apply(surface.seams()[j].p));
      const bool observer_beyond = s < 0.0;
      if (!observer_beyond && visual_angle(std::asinh(s)) < eps) continue;
      if (node.depth + 1 > depth_cap) {
        result.stabilized = false;
        continue;
      }
      nodes.push_back(Node{node.g.compose(reflections[j]), j, node.depth + 1, idx});
      queue.push_back(nodes.size() - 1);
    }
  }
  result.nodes_visited = nodes.size();

  for (const Candidate& c : deduplicate(std::move(cands))) {
    std::vector<int> seq;
    for (std::size_t k = c.node; k != 0; k = nodes[k].parent) seq.push_back(nodes[k].last + 1);
    std::reverse(seq.begin(), seq.end());
    HIsometry lift = nodes[c.node].g;
    if (seq.size() % 2 == 1) {
      // Odd elements reverse orientation; compose with a seam reflection that
      // fixes this axis (any seam other than the opposite one).
      const int opposite = c.class_index + 1;
      if (seq.back() != opposite)
        seq.pop_back();
      else
        seq.push_back(opposite % 3 + 1);
      lift = HIsometry{};
      for (int k : seq) lift = lift.compose(reflections[k - 1]);
    }
    std::string word;
    for (std::size_t k = 0; k + 1 < seq.size(); k += 2) word += pair_word(seq[k], seq[k + 1]);
    result.walls.push_back(make_sight(surface, obs, c, lift, reduce_word(word)));
  }
  return result;
}

// Breadth-first search over reduced words in A, B. Extension stops once every
// boundary axis of the current element is beyond the eps distance cutoff plus
// one generator displacement; completeness is empirical.
WallEnumeration enumerate_words(const FuchsianSurface& surface, const Observer& obs, double eps,
                                int depth_cap) {
  struct Node {
    HIsometry g;
    char last = 0;
    int depth = 0;
    std::size_t parent = 0;
  };
  const std::array<char, 4> letters{'A', 'a', 'B', 'b'};
  std::array<HIsometry, 4> gens{surface.generator_a(), surface.generator_a().inverse(),
                                surface.generator_b(), surface.generator_b().inverse()};
  // Prune on the orbit of a base point: a line near the observer has a
  // stretch near some orbit point. The slack is a heuristic diameter bound.
  const HPoint base = surface.classes().front().arc_origin;
  double slack = 0.0;
  for (const HIsometry& g : gens) slack = std::max(slack, dist_h2(base, g.apply(base)));
  for (const BoundaryClass& bc : surface.classes())
    slack = std::max(slack, dist_h2(base, bc.arc_origin) + 0.5 * bc.translation_length);
  const double cutoff = distance_for_visual_angle(eps) + slack;

  auto inverse_letter = [](char c) -> char {
    return static_cast<char>(std::islower(static_cast<unsigned char>(c)) ? std::toupper(c)
                                                                         : std::tolower(c));
  };

  WallEnumeration result;
  std::vector<Node> nodes;
  nodes.push_back(Node{});
  std::deque<std::size_t> queue{0};
  std::vector<Candidate> cands;
  while (!queue.empty()) {
    const std::size_t idx = queue.front();
    queue.pop_front();
    const Node node = nodes[idx];
    for (int i = 0; i < surface.class_count(); ++i) {
      const HLine line = node.g.apply(surface.classes()[i].axis);
      Candidate c;
      if (accept_line(obs, line, eps, c)) {
        c.class_index = i;
        c.node = idx;
        c.depth = node.depth;
        cands.push_back(c);
      }
    }
    if (dist_h2(obs.position, node.g.apply(base)) > cutoff) continue;
    for (int k = 0; k < 4; ++k) {
      if (node.last != 0 && letters[k] == inverse_letter(node.last)) continue;
      if (node.depth + 1 > depth_cap) {
        result.stabilized = false;
        continue;
      }
      nodes.push_back(Node{node.g.compose(gens[k]), letters[k], node.depth + 1, idx});
      queue.push_back(nodes.size() - 1);
    }
  }
  result.nodes_visited = nodes.size();
  for (const Candidate& c : deduplicate(std::move(cands))) {
    std::string word;
    for (std::size_t k = c.node; k != 0; k = nodes[k].parent) word += nodes[k].last;
    std::reverse(word.begin(), word.end());
    result.walls.push_back(make_sight(surface, obs, c, nodes[c.node].g, word));
  }
  return result;
}

void check_lengths(const PantsParams& p) {
  for (double L : {p.L1, p.L2, p.L3})
    if (!(L > 0.0) || !std::isfinite(L))
      throw std::invalid_argument("pants boundary lengths must be positive and finite");
}

}  // namespace

double reduce_offset(double s, double period) {
  double r = s - std::floor(s / period) * period;
  if (r >= period || r < 0.0) r = 0.0;
  return r;
}

double hexagon_seam_length(double Li, double Lj, double Lk) {
  const double li = 0.5 * Li, lj = 0.5 * Lj, lk = 0.5 * Lk;
  const double c = (std::cosh(lk) + std::cosh(li) * std::cosh(lj)) / (std::sinh(li) * std::sinh(lj));
  if (!(c > 1.0 + 1e-12)) throw std::invalid_argument("degenerate hexagon: seam length vanishes");
  return std::acosh(c);
}

std::string reduce_word(std::string_view word) {
  std::string out;
  for (char c : word) {
    if (!out.empty() && out.back() != c &&
        std::tolower(static_cast<unsigned char>(out.back())) ==
            std::tolower(static_cast<unsigned char>(c)))
      out.pop_back();
    else
      out.push_back(c);
  }
  return out;
}

HIsometry evaluate_word(const FuchsianSurface& surface, std::string_view word) {
  HIsometry g;
  const HIsometry a = surface.generator_a(), b = surface.generator_b();
  const HIsometry ai = a.inverse(), bi = b.inverse();
  for (char c : word) {
    switch (c) {
      case 'A': g = g.compose(a); break;
      case 'a': g = g.compose(ai); break;
      case 'B': g = g.compose(b); break;
      case 'b': g = g.compose(bi); break;
      default: throw std::invalid_argument(std::string("bad letter in word: ") + c);
    }
  }
  return g;
}

FuchsianSurface FuchsianSurface::pants(const PantsParams& params) {
  check_lengths(params);
  const double l1 = 0.5 * params.L1;
  const double d3 = hexagon_seam_length(params.L1, params.L2, params.L3);  // a1 to a2
  const double d2 = hexagon_seam_length(params.L1, params.L3, params.L2);  // a1 to a3
  hexagon_seam_length(params.L2, params.L3, params.L1);  // throws if the third seam degenerates

  // a1 is {x2 = 0}; seams s3, s2 cross it perpendicularly at arc 0 and l1.
  const HPoint f0{{1.0, 0.0, 0.0}};
  const HPoint f1{{std::cosh(l1), std::sinh(l1), 0.0}};
  const HLine a1{{0.0, 0.0, 1.0}};
  const HLine s3{{0.0, 1.0, 0.0}};
  const HLine s2{{std::sinh(l1), std::cosh(l1), 0.0}};
  const HPoint g{{std::cosh(d3), 0.0, std::sinh(d3)}};
  const HLine a2 = HLine::normalized({std::sinh(d3), 0.0, std::cosh(d3)});
  const Vec3 up{0.0, 0.0, 1.0};
  const HPoint h{{std::cosh(d2) * f1.x[0], std::cosh(d2) * f1.x[1], std::sinh(d2)}};
  const HLine a3 = HLine::normalized(
      {std::sinh(d2) * f1.x[0], std::sinh(d2) * f1.x[1], std::cosh(d2) * up[2]});
  const HLine s1 = common_perpendicular(a2, a3);
  const HPoint v23 = intersection(s1, a2);
  const HPoint v32 = intersection(s1, a3);

  Vec3 sum{0.0, 0.0, 0.0};
  for (const HPoint& v : {f0, f1, g, v23, v32, h})
    for (int i = 0; i < 3; ++i) sum[i] += v.x[i];
  const HPoint center = HPoint::normalized(sum);

  FuchsianSurface s;
  s.is_pants_ = true;
  s.hexagon_center_ = center;
  s.seams_ = {HLine::normalized(oriented_toward(s1, center).p),
              HLine::normalized(oriented_toward(s2, center).p),
              HLine::normalized(oriented_toward(s3, center).p)};
  const HIsometry r1 = HIsometry::reflection(s.seams_[0]);
  const HIsometry r2 = HIsometry::reflection(s.seams_[1]);
  const HIsometry r3 = HIsometry::reflection(s.seams_[2]);
  s.a_ = r2.compose(r3);
  s.b_ = r3.compose(r1);
  const HIsometry c = r1.compose(r2);

  const std::array<HLine, 3> axes{oriented_toward(a1, center), oriented_toward(a2, center),
                                  oriented_toward(a3, center)};
  const std::array<HPoint, 3> origins{f0, v23, h};
  const std::array<std::string, 3> words{"A", "B", "ba"};
  const std::array<HIsometry, 3> reps{s.a_, s.b_, c};
  const std::array<double, 3> lengths{params.L1, params.L2, params.L3};
  for (int i = 0; i < 3; ++i) {
    BoundaryClass bc;
    bc.class_id = i + 1;
    bc.word = words[i];
    bc.representative = reps[i];
    bc.axis = axes[i];
    bc.translation_length = lengths[i];
    bc.arc_origin = origins[i];
    bc.chart = LineChart::on(bc.axis, bc.arc_origin);
    bc.interior_side = 1;
    s.classes_.push_back(bc);
  }
  return s;
}

FuchsianSurface FuchsianSurface::generic(const HIsometry& a, const HIsometry& b,
                                         const std::vector<std::string>& boundary_words) {
  if (boundary_words.empty() || boundary_words.size() > 3)
    throw std::invalid_argument("generic surface needs 1 to 3 boundary words");
  if (!a.orientation_preserving() || !b.orientation_preserving())
    throw std::invalid_argument("generators must preserve orientation");
  FuchsianSurface s;
  s.a_ = a;
  s.b_ = b;
  for (std::size_t i = 0; i < boundary_words.size(); ++i) {
    BoundaryClass bc;
    bc.class_id = static_cast<int>(i) + 1;
    bc.word = boundary_words[i];
    bc.representative = evaluate_word(s, bc.word);
    bc.translation_length = bc.representative.translation_length();
    if (!(bc.translation_length > 0.0))
      throw std::invalid_argument("boundary word '" + bc.word + "' is not hyperbolic");
    bc.axis = bc.representative.axis();
    s.classes_.push_back(bc);
  }
  s.finish_classes();
  return s;
}

void FuchsianSurface::finish_classes() {
  // Reference line on the surface side of each axis: the next class's axis,
  // or the image under a generator when there is a single class.
  const std::size_t n = classes_.size();
  for (std::size_t i = 0; i < n; ++i) {
    HLine ref;
    if (n > 1) {
      ref = classes_[(i + 1) % n].axis;
    } else {
      ref = a_.apply(classes_[i].axis);
      if (same_line(ref, classes_[i].axis) || same_line(ref.reversed(), classes_[i].axis))
        ref = b_.apply(classes_[i].axis);
    }
    const HPoint on_ref = foot_of_common_perpendicular(ref, classes_[i].axis);
    classes_[i].axis = oriented_toward(classes_[i].axis, on_ref);
    classes_[i].interior_side = 1;
    classes_[i].arc_origin = foot_of_common_perpendicular(classes_[i].axis, ref);
    classes_[i].chart = LineChart::on(classes_[i].axis, classes_[i].arc_origin);
  }
}

const BoundaryClass& FuchsianSurface::boundary(int class_id) const {
  if (class_id < 1 || class_id > class_count())
    throw std::out_of_range("boundary class " + std::to_string(class_id) + " does not exist");
  return classes_[class_id - 1];
}

std::vector<double> FuchsianSurface::boundary_lengths() const {
  std::vector<double> out;
  for (const BoundaryClass& bc : classes_) out.push_back(bc.translation_length);
  return out;
}

std::string FuchsianSurface::check_invariants(double tol) const {
  std::ostringstream err;
  for (const BoundaryClass& bc : classes_) {
    const HIsometry& g = bc.representative;
    if (std::abs(g.translation_length() - bc.translation_length) > tol)
      err << "class " << bc.class_id << ": translation length mismatch; ";
    // The representative must translate its own axis.
    if (!same_line(g.apply(bc.axis), bc.axis))
      err << "class " << bc.class_id << ": representative does not preserve its axis; ";
    const HPoint moved = g.apply(bc.arc_origin);
    if (std::abs(dist_h2(bc.arc_origin, moved) - bc.translation_length) > 1e3 * tol)
      err << "class " << bc.class_id << ": displacement on axis differs from length; ";
    if (!bc.axis.contains(bc.arc_origin, 1e3 * tol))
      err << "class " << bc.class_id << ": arc origin off axis; ";
  }
  for (std::size_t i = 0; i < classes_.size(); ++i)
    for (std::size_t j = i + 1; j < classes_.size(); ++j) {
      if (!(line_distance(classes_[i].axis, classes_[j].axis) > 0.0))
        err << "axes " << i + 1 << " and " << j + 1 << " are not disjoint; ";
      const HPoint on_j = foot_of_common_perpendicular(classes_[j].axis, classes_[i].axis);
      const HPoint on_i = foot_of_common_perpendicular(classes_[i].axis, classes_[j].axis);
      if (classes_[i].axis.side_value(on_j) <= 0.0 || classes_[j].axis.side_value(on_i) <= 0.0)
        err << "axes " << i + 1 << " and " << j + 1 << " do not bound a common region; ";
    }
  return err.str();
}

Observer make_observer(const FuchsianSurface& surface, int attach_class, double u, double l) {
  if (!(l >= 0.0)) throw std::invalid_argument("observer distance must be nonnegative");
  const BoundaryClass& bc = surface.boundary(attach_class);
  Observer obs;
  obs.attach_class = attach_class;
  obs.attach_line = bc.axis;
  obs.foot = bc.chart.at(u);
  obs.position = erect_perpendicular(bc.axis, obs.foot, l, Side::Negative);
  obs.l = l;
  const double c = std::cosh(l), s = std::sinh(l);
  obs.inward = {c * bc.axis.p[0] - s * obs.foot.x[0], c * bc.axis.p[1] - s * obs.foot.x[1],
                c * bc.axis.p[2] - s * obs.foot.x[2]};
  obs.along = bc.axis.tangent_at(obs.foot);
  obs.psi_total = visual_angle(l);
  return obs;
}

double WallEnumeration::psi_sum() const {
  double s = 0.0;
  for (const WallSight& w : walls) s += w.psi;
  return s;
}

WallEnumeration enumerate_walls(const FuchsianSurface& surface, const Observer& observer,
                                double eps, int depth_cap, EnumerationStrategy strategy) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (strategy == EnumerationStrategy::Automatic)
    strategy = surface.is_pants() ? EnumerationStrategy::Chambers : EnumerationStrategy::Words;
  if (strategy == EnumerationStrategy::Chambers) {
    if (!surface.is_pants()) throw std::invalid_argument("chamber enumeration needs a pants surface");
    return enumerate_chambers(surface, observer, eps, depth_cap);
  }
  return enumerate_words(surface, observer, eps, depth_cap);
}

WallEnumeration enumerate_walls(const FuchsianSurface& surface, int attach_class, double u,
                                double l, double eps, int depth_cap,
                                EnumerationStrategy strategy) {
  return enumerate_walls(surface, make_observer(surface, attach_class, u, l), eps, depth_cap,
                         strategy);
}

double min_boundary_gap(const FuchsianSurface& surface, int depth_cap) {
  std::vector<HLine> lines;
  auto add = [&](const HLine& l) {
    for (const HLine& m : lines)
      if (same_line(m, l)) return;
    lines.push_back(l);
  };
  struct Node {
    HIsometry g;
    int last;
    int depth;
  };
  std::vector<Node> stack{{HIsometry{}, -1, 0}};
  if (surface.is_pants()) {
    std::array<HIsometry, 3> refl;
    for (int k = 0; k < 3; ++k) refl[k] = HIsometry::reflection(surface.seams()[k]);
    while (!stack.empty()) {
      const Node n = stack.back();
      stack.pop_back();
      for (const BoundaryClass& bc : surface.classes()) add(n.g.apply(bc.axis));
      if (n.depth == depth_cap) continue;
      for (int j = 0; j < 3; ++j)
        if (j != n.last) stack.push_back({n.g.compose(refl[j]), j, n.depth + 1});
    }
  } else {
    const std::array<HIsometry, 4> gens{surface.generator_a(), surface.generator_a().inverse(),
                                        surface.generator_b(), surface.generator_b().inverse()};
    while (!stack.empty()) {
      const Node n = stack.back();
      stack.pop_back();
      for (const BoundaryClass& bc : surface.classes()) add(n.g.apply(bc.axis));
      if (n.depth == depth_cap) continue;
      for (int k = 0; k < 4; ++k)
        if (n.last < 0 || k != (n.last ^ 1)) stack.push_back({n.g.compose(gens[k]), k, n.depth + 1});
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j)
      best = std::min(best, line_distance(lines[i], lines[j]));
  return best;
}

}  // namespace graphent
