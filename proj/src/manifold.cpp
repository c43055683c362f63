#include "graphent/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace graphent {
namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

std::string at(const std::string& base, const std::string& key) { return base + "." + key; }
std::string at(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

const json& require(const json& obj, const char* key, const std::string& loc) {
  if (!obj.is_object()) throw ParseError(loc, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(at(loc, key), "missing field");
  return *it;
}

double number(const json& v, const std::string& loc) {
  if (!v.is_number()) throw ParseError(loc, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(loc, "expected a finite number");
  return x;
}

double optional_number(const json& obj, const char* key, const std::string& loc, double fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, at(loc, key));
}

std::string identifier(const json& v, const std::string& loc) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError(loc, "expected a string or integer id");
}

Mat3 generator(const json& v, const std::string& loc) {
  if (!v.is_object()) throw ParseError(loc, "expected {\"matrix\": [...]} or {\"sl2\": [...]}");
  if (auto it = v.find("matrix"); it != v.end()) {
    if (!it->is_array() || it->size() != 9) throw ParseError(at(loc, "matrix"), "expected 9 numbers");
    Mat3 m{};
    for (std::size_t i = 0; i < 9; ++i) m[i] = number((*it)[i], at(at(loc, "matrix"), i));
    return m;
  }
  if (auto it = v.find("sl2"); it != v.end()) {
    if (!it->is_array() || it->size() != 4) throw ParseError(at(loc, "sl2"), "expected 4 numbers");
    double e[4];
    for (std::size_t i = 0; i < 4; ++i) e[i] = number((*it)[i], at(at(loc, "sl2"), i));
    try {
      return HIsometry::from_sl2(e[0], e[1], e[2], e[3]).matrix();
    } catch (const std::exception& ex) {
      throw ParseError(at(loc, "sl2"), ex.what());
    }
  }
  throw ParseError(loc, "expected a \"matrix\" or \"sl2\" field");
}

SurfaceSpec surface_spec(const json& v, const std::string& loc) {
  const json& type = require(v, "type", loc);
  if (!type.is_string()) throw ParseError(at(loc, "type"), "expected a string");
  const std::string t = type.get<std::string>();
  if (t == "pants") {
    const json& lengths = require(v, "lengths", loc);
    const std::string ll = at(loc, "lengths");
    if (!lengths.is_array() || lengths.size() != 3) throw ParseError(ll, "expected 3 lengths");
    return PantsParams{number(lengths[0], at(ll, 0)), number(lengths[1], at(ll, 1)),
                       number(lengths[2], at(ll, 2))};
  }
  if (t == "generic") {
    GenericSurfaceSpec g;
    g.a = generator(require(v, "a", loc), at(loc, "a"));
    g.b = generator(require(v, "b", loc), at(loc, "b"));
    const json& words = require(v, "boundary_words", loc);
    const std::string wl = at(loc, "boundary_words");
    if (!words.is_array()) throw ParseError(wl, "expected an array of words");
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (!words[i].is_string()) throw ParseError(at(wl, i), "expected a string");
      g.boundary_words.push_back(words[i].get<std::string>());
    }
    return g;
  }
  throw ParseError(at(loc, "type"), "unknown surface type '" + t + "'");
}

BoundaryRef boundary_ref(const json& v, const std::string& loc) {
  BoundaryRef r;
  r.block = identifier(require(v, "block", loc), at(loc, "block"));
  const json& c = require(v, "class", loc);
  if (!c.is_number_integer()) throw ParseError(at(loc, "class"), "expected an integer");
  r.class_id = c.get<int>();
  return r;
}

std::string describe(const BoundaryRef& r) {
  return "block '" + r.block + "' class " + std::to_string(r.class_id);
}

json surface_json(const SurfaceSpec& s) {
  if (const auto* p = std::get_if<PantsParams>(&s))
    return json{{"type", "pants"}, {"lengths", {p->L1, p->L2, p->L3}}};
  const auto& g = std::get<GenericSurfaceSpec>(s);
  return json{{"type", "generic"},
              {"a", {{"matrix", g.a}}},
              {"b", {{"matrix", g.b}}},
              {"boundary_words", g.boundary_words}};
}

}  // namespace

FuchsianSurface build_surface(const SurfaceSpec& spec) {
  if (const auto* p = std::get_if<PantsParams>(&spec)) return FuchsianSurface::pants(*p);
  const auto& g = std::get<GenericSurfaceSpec>(spec);
  HIsometry a(g.a), b(g.b);
  if (a.form_defect() > 1e-9 || b.form_defect() > 1e-9)
    throw std::invalid_argument("generator matrix does not preserve the Minkowski form");
  return FuchsianSurface::generic(a, b, g.boundary_words);
}

namespace {

json parse_document(std::string_view json_text) {
  try {
    return json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), "malformed JSON");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ManifoldSpec manifold_spec(const json& doc) {
  ManifoldSpec spec;
  const std::string root = "$";
  const json& blocks = require(doc, "blocks", root);
  if (!blocks.is_array()) throw ParseError("$.blocks", "expected an array");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string loc = at("$.blocks", i);
    BlockSpec b;
    b.id = identifier(require(blocks[i], "id", loc), at(loc, "id"));
    b.surface = surface_spec(require(blocks[i], "surface", loc), at(loc, "surface"));
    if (auto it = blocks[i].find("fiber_length"); it != blocks[i].end())
      b.fiber_length = number(*it, at(loc, "fiber_length"));
    spec.blocks.push_back(std::move(b));
  }
  const json& edges = require(doc, "edges", root);
  if (!edges.is_array()) throw ParseError("$.edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string loc = at("$.edges", i);
    const json& e = edges[i];
    EdgeSpec edge;
    edge.id = identifier(require(e, "id", loc), at(loc, "id"));
    edge.a = boundary_ref(require(e, "a", loc), at(loc, "a"));
    edge.b = boundary_ref(require(e, "b", loc), at(loc, "b"));
    edge.alpha = number(require(e, "alpha_deg", loc), at(loc, "alpha_deg")) * kDeg;
    if (auto it = e.find("flip"); it != e.end()) {
      if (!it->is_boolean()) throw ParseError(at(loc, "flip"), "expected a boolean");
      edge.flip = it->get<bool>();
    }
    edge.offset_u = optional_number(e, "offset_u", loc, 0.0);
    edge.offset_r = optional_number(e, "offset_r", loc, 0.0);
    spec.edges.push_back(std::move(edge));
  }
  return spec;
}

}  // namespace

ManifoldSpec parse_manifold(std::string_view json_text) {
  return manifold_spec(parse_document(json_text));
}

ManifoldSpec load_manifold(const std::string& path) { return parse_manifold(read_file(path)); }

InputSpec parse_input(std::string_view json_text) {
  const json doc = parse_document(json_text);
  if (doc.is_object() && doc.contains("type") && !doc.contains("blocks"))
    return surface_spec(doc, "$");
  return manifold_spec(doc);
}

InputSpec load_input(const std::string& path) { return parse_input(read_file(path)); }

std::string manifold_to_json(const ManifoldSpec& spec) {
  json doc{{"blocks", json::array()}, {"edges", json::array()}};
  for (const BlockSpec& b : spec.blocks) {
    json jb{{"id", b.id}, {"surface", surface_json(b.surface)}};
    if (b.fiber_length) jb["fiber_length"] = *b.fiber_length;
    doc["blocks"].push_back(std::move(jb));
  }
  for (const EdgeSpec& e : spec.edges) {
    doc["edges"].push_back(json{{"id", e.id},
                                {"a", {{"block", e.a.block}, {"class", e.a.class_id}}},
                                {"b", {{"block", e.b.block}, {"class", e.b.class_id}}},
                                {"alpha_deg", e.alpha / kDeg},
                                {"flip", e.flip},
                                {"offset_u", e.offset_u},
                                {"offset_r", e.offset_r}});
  }
  return doc.dump(2);
}

std::string ValidationReport::to_text() const {
  std::ostringstream out;
  if (valid()) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "valid: alpha_0 = %.12g rad, l0 = %.12g\n", alpha_0, l0);
    out << buf;
  } else {
    out << "invalid: " << errors.size() << " error(s)\n";
    for (const Diagnostic& d : errors) out << "  " << d.location << ": " << d.message << '\n';
  }
  return out.str();
}

ValidationReport validate(const ManifoldSpec& spec) {
  ValidationReport rep;
  auto error = [&](std::string loc, std::string msg) {
    rep.errors.push_back({std::move(loc), std::move(msg)});
  };

  std::map<std::string, int> class_counts;
  rep.l0 = std::numeric_limits<double>::infinity();
  if (spec.blocks.empty()) error("$.blocks", "a manifold needs at least one block");
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const BlockSpec& b = spec.blocks[i];
    const std::string loc = at("$.blocks", i);
    if (class_counts.count(b.id)) {
      error(at(loc, "id"), "duplicate block id '" + b.id + "'");
      continue;
    }
    if (b.fiber_length && !(*b.fiber_length > 0.0))
      error(at(loc, "fiber_length"), "fiber length must be positive");
    try {
      const FuchsianSurface s = build_surface(b.surface);
      if (const std::string bad = s.check_invariants(); !bad.empty())
        error(at(loc, "surface"), bad);
      class_counts[b.id] = s.class_count();
      rep.l0 = std::min(rep.l0, min_boundary_gap(s));
    } catch (const std::exception& e) {
      error(at(loc, "surface"), e.what());
      class_counts[b.id] = 0;
    }
  }

  if (spec.edges.empty())
    error("$.edges", "no walls: the graph manifold structure is trivial");
  rep.alpha_0 = std::numeric_limits<double>::infinity();
  std::map<std::pair<std::string, int>, std::string> used;
  std::map<std::string, std::size_t> edge_ids;
  for (std::size_t i = 0; i < spec.edges.size(); ++i) {
    const EdgeSpec& e = spec.edges[i];
    const std::string loc = at("$.edges", i);
    if (!edge_ids.emplace(e.id, i).second) error(at(loc, "id"), "duplicate edge id '" + e.id + "'");
    if (!(e.alpha > 0.0) || e.alpha > 0.5 * std::numbers::pi + 1e-12)
      error(at(loc, "alpha_deg"), "wall angle must lie in (0, 90] degrees");
    rep.alpha_0 = std::min(rep.alpha_0, e.alpha);
    if (e.a == e.b) error(loc, "edge joins " + describe(e.a) + " to itself");
    for (End end : {End::A, End::B}) {
      const BoundaryRef& r = e.end(end);
      const std::string rl = at(loc, end == End::A ? "a" : "b");
      auto it = class_counts.find(r.block);
      if (it == class_counts.end()) {
        error(at(rl, "block"), "unknown block '" + r.block + "'");
        continue;
      }
      if (r.class_id < 1 || r.class_id > it->second) {
        if (it->second > 0) error(at(rl, "class"), "no boundary class " + std::to_string(r.class_id) +
                                                       " in block '" + r.block + "'");
        continue;
      }
      auto [pos, inserted] = used.emplace(std::make_pair(r.block, r.class_id), rl);
      if (!inserted) error(rl, describe(r) + " is already glued at " + pos->second);
    }
  }
  for (const auto& [block, count] : class_counts)
    for (int c = 1; c <= count; ++c)
      if (!used.count({block, c}))
        error("$.edges", "unmatched boundary: " + describe(BoundaryRef{block, c}));

  if (spec.edges.empty()) rep.alpha_0 = 0.0;
  if (!std::isfinite(rep.l0)) rep.l0 = 0.0;
  return rep;
}

WallCoords transition_apply(const EdgeSpec& edge, End from, WallCoords c) {
  const double ca = std::cos(edge.alpha), sa = std::sin(edge.alpha);
  const double fs = edge.flip ? -1.0 : 1.0;
  if (from == End::A) {
    const double u = ca * c.u - sa * c.r;
    const double r = sa * c.u + ca * c.r;
    return {u + edge.offset_u, fs * r + edge.offset_r};
  }
  // Inverse: x = R(-alpha) F (y - offset).
  const double u = c.u - edge.offset_u;
  const double r = fs * (c.r - edge.offset_r);
  return {ca * u + sa * r, -sa * u + ca * r};
}

ValidationError::ValidationError(ValidationReport report)
    : std::runtime_error("invalid manifold:\n" + report.to_text()), report_(std::move(report)) {}

Manifold::Manifold(ManifoldSpec spec) : spec_(std::move(spec)), report_(validate(spec_)) {
  if (!report_.valid()) throw ValidationError(report_);
  for (const BlockSpec& b : spec_.blocks) {
    surfaces_.push_back(build_surface(b.surface));
    crossings_.emplace_back(surfaces_.back().class_count());
  }
  for (std::size_t e = 0; e < spec_.edges.size(); ++e) {
    const EdgeSpec& edge = spec_.edges[e];
    const int ba = block_index(edge.a.block), bb = block_index(edge.b.block);
    crossings_[ba][edge.a.class_id - 1] = {static_cast<int>(e), End::A, bb, edge.b.class_id};
    crossings_[bb][edge.b.class_id - 1] = {static_cast<int>(e), End::B, ba, edge.a.class_id};
  }
}

const Crossing& Manifold::crossing(int block, int class_id) const {
  return crossings_.at(block).at(class_id - 1);
}

int Manifold::block_index(std::string_view id) const {
  for (std::size_t i = 0; i < spec_.blocks.size(); ++i)
    if (spec_.blocks[i].id == id) return static_cast<int>(i);
  throw std::out_of_range("unknown block '" + std::string(id) + "'");
}

}  // namespace graphent
