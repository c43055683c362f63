#pragma once

// Graph manifold descriptions: blocks (surface x R) glued along flat walls by
// plane isometries, their validation, and the wall-coordinate transitions.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "graphent/surface.hpp"

namespace graphent {

/// Free-group surface given by explicit generators and boundary words.
struct GenericSurfaceSpec {
  Mat3 a{};
  Mat3 b{};
  std::vector<std::string> boundary_words;
};

using SurfaceSpec = std::variant<PantsParams, GenericSurfaceSpec>;

FuchsianSurface build_surface(const SurfaceSpec& spec);

struct BlockSpec {
  std::string id;
  SurfaceSpec surface;
  std::optional<double> fiber_length;
};

struct BoundaryRef {
  std::string block;
  int class_id = 0;

  friend bool operator==(const BoundaryRef&, const BoundaryRef&) = default;
};

enum class End { A, B };

struct EdgeSpec {
  std::string id;
  BoundaryRef a;
  BoundaryRef b;
  double alpha = 0.0;  // radians
  bool flip = false;
  double offset_u = 0.0;
  double offset_r = 0.0;

  const BoundaryRef& end(End e) const { return e == End::A ? a : b; }
};

struct ManifoldSpec {
  std::vector<BlockSpec> blocks;
  std::vector<EdgeSpec> edges;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string location, const std::string& message)
      : std::runtime_error(location + ": " + message), location_(std::move(location)) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

/// Parses the JSON manifold description. Angles in the file are degrees.
ManifoldSpec parse_manifold(std::string_view json_text);
ManifoldSpec load_manifold(const std::string& path);
std::string manifold_to_json(const ManifoldSpec& spec);

/// A manifold file, or a bare surface object ({"type": ...}) where a single
/// surface suffices.
using InputSpec = std::variant<ManifoldSpec, SurfaceSpec>;
InputSpec parse_input(std::string_view json_text);
InputSpec load_input(const std::string& path);

struct Diagnostic {
  std::string location;  // e.g. "edges[2].alpha_deg"
  std::string message;
};

struct ValidationReport {
  std::vector<Diagnostic> errors;
  double alpha_0 = 0.0;
  double l0 = 0.0;  // empirical: min over blocks of min_boundary_gap

  bool valid() const { return errors.empty(); }
  std::string to_text() const;
};

ValidationReport validate(const ManifoldSpec& spec);

struct WallCoords {
  double u = 0.0;
  double r = 0.0;
};

/// T(x) = F R(alpha) x + (offset_u, offset_r) for a -> b; b -> a applies T^{-1}.
WallCoords transition_apply(const EdgeSpec& edge, End from, WallCoords c);

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Where a boundary class of a block leads.
struct Crossing {
  int edge = 0;
  End from = End::A;
  int far_block = 0;
  int far_class = 0;
};

/// A validated manifold with built surfaces; immutable.
class Manifold {
 public:
  explicit Manifold(ManifoldSpec spec);

  const ManifoldSpec& spec() const { return spec_; }
  const ValidationReport& report() const { return report_; }
  int block_count() const { return static_cast<int>(surfaces_.size()); }
  const FuchsianSurface& surface(int block) const { return surfaces_.at(block); }
  const EdgeSpec& edge(int e) const { return spec_.edges.at(e); }
  const Crossing& crossing(int block, int class_id) const;
  int block_index(std::string_view id) const;
  double alpha_0() const { return report_.alpha_0; }
  double l0() const { return report_.l0; }

 private:
  ManifoldSpec spec_;
  ValidationReport report_;
  std::vector<FuchsianSurface> surfaces_;
  std::vector<std::vector<Crossing>> crossings_;  // [block][class_id - 1]
};

}  // namespace graphent
