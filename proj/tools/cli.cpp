#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>

#include "graphent/entropy.hpp"
#include "graphent/format.hpp"
#include "graphent/local_estimate.hpp"
#include "graphent/manifold.hpp"
#include "graphent/wall_tree.hpp"

namespace graphent::cli {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<std::size_t> parse_beam(const std::string& text) {
  if (text == "none") return std::nullopt;
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || v < 1) throw UsageError("--beam must be a positive integer or 'none'");
  return static_cast<std::size_t>(v);
}

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw UsageError("--eps must be positive");
}

void check_depth_cap(int cap) {
  if (cap < 1) throw UsageError("--depth-cap must be at least 1");
}

Manifold require_manifold(const std::string& path) {
  InputSpec in = load_input(path);
  if (auto* spec = std::get_if<ManifoldSpec>(&in)) return Manifold(std::move(*spec));
  throw UsageError(path + ": this command needs a manifold file, not a bare surface");
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out,
          std::ostream& err) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + out_path);
  f << text;
  err << "wrote " << out_path << '\n';
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// validate ---------------------------------------------------------------

int cmd_validate(const std::string& path, std::ostream& out) {
  InputSpec in = load_input(path);
  if (const auto* s = std::get_if<SurfaceSpec>(&in)) {
    try {
      const FuchsianSurface surface = build_surface(*s);
      out << "valid surface: " << surface.class_count() << " boundary classes, min gap "
          << fixed(min_boundary_gap(surface)) << '\n';
      return kExitOk;
    } catch (const std::invalid_argument& e) {
      out << "invalid surface: " << e.what() << '\n';
      return kExitInvalid;
    }
  }
  const ValidationReport report = validate(std::get<ManifoldSpec>(in));
  out << report.to_text();
  return report.valid() ? kExitOk : kExitInvalid;
}

// lemma-sweep ------------------------------------------------------------

struct SweepArgs {
  std::string input;
  double eps = kDefaultSweepEps;
  int depth_cap = kDefaultDepthCap;
  double alpha_min_deg = 30.0;
  std::vector<double> l_grid;
  std::vector<double> alpha_grid_deg;
  int u_samples = 0;
  double a0_threshold = 1.0;
  std::string out;
};

int cmd_lemma_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  check_eps(a.eps);
  check_depth_cap(a.depth_cap);
  if (!(a.alpha_min_deg > 0.0 && a.alpha_min_deg <= 90.0))
    throw UsageError("--alpha-min must lie in (0, 90]");
  if (a.u_samples < 0) throw UsageError("--u-samples must be nonnegative");
  for (double l : a.l_grid)
    if (!(l >= 0.0)) throw UsageError("--l-grid values must be nonnegative");
  for (double d : a.alpha_grid_deg)
    if (!(d > 0.0 && d <= 90.0)) throw UsageError("--alpha-grid values must lie in (0, 90]");

  struct Target {
    std::string block;
    const FuchsianSurface* surface;
    double l0, alpha0;
  };
  std::vector<Target> targets;
  std::optional<Manifold> manifold;
  std::optional<FuchsianSurface> bare;
  InputSpec in = load_input(a.input);
  if (auto* spec = std::get_if<ManifoldSpec>(&in)) {
    manifold.emplace(std::move(*spec));
    for (int b = 0; b < manifold->block_count(); ++b)
      targets.push_back({manifold->spec().blocks[b].id, &manifold->surface(b), manifold->l0(),
                         manifold->alpha_0()});
  } else {
    bare.emplace(build_surface(std::get<SurfaceSpec>(in)));
    targets.push_back({"surface", &*bare, min_boundary_gap(*bare), a.alpha_min_deg * kDeg});
  }

  std::string csv = "block,class,l,alpha,u,lambda,sum_tau,m0_hat,delta0_hat\n";
  double lambda0 = std::numeric_limits<double>::infinity();
  bool stable = true;
  std::string summary;
  for (const Target& t : targets) {
    for (int c = 1; c <= t.surface->class_count(); ++c) {
      SweepGrids g = default_sweep_grids(*t.surface, c, t.l0, t.alpha0);
      if (!a.l_grid.empty()) g.l = a.l_grid;
      if (!a.alpha_grid_deg.empty()) {
        g.alpha.clear();
        for (double d : a.alpha_grid_deg) g.alpha.push_back(d * kDeg);
      }
      if (a.u_samples > 0) {
        const double period = t.surface->boundary(c).translation_length;
        g.u.clear();
        for (int i = 0; i < a.u_samples; ++i) g.u.push_back(period * i / a.u_samples);
      }
      const SweepTable table = lemma_sweep(*t.surface, c, g, a.eps, a.depth_cap, a.a0_threshold);
      const std::string prefix = t.block + ',' + std::to_string(c) + ',';
      for (const SweepRow& r : table.rows)
        csv += prefix + format_double(r.l) + ',' + format_double(r.alpha) + ',' +
               format_double(r.u) + ',' + format_double(r.lambda) + ',' +
               format_double(r.sum_tau) + ',' + format_double(r.m0_hat) + ',' +
               format_double(r.delta0_hat) + '\n';
      lambda0 = std::min(lambda0, table.lambda0_hat);
      stable = stable && table.stabilized;
      summary += "  " + t.block + " class " + std::to_string(c) + ": lambda0_hat " +
                 fixed(table.lambda0_hat) + " over " + std::to_string(table.rows.size()) +
                 " rows\n";
    }
  }
  emit(csv, a.out, out, err);
  std::ostream& s = a.out.empty() ? err : out;
  s << summary << "lambda0_hat = " << fixed(lambda0) << (lambda0 > 1.0 ? " (> 1)" : " (not > 1)")
    << (stable ? "" : "; some enumerations hit the depth cap") << '\n';
  return kExitOk;
}

// series -----------------------------------------------------------------

struct SeriesArgs {
  std::string input;
  std::string block;
  int class_id = 1;
  double u0 = 0.0;
  double r0 = 0.0;
  int n = 8;
  std::vector<double> t{1.0};
  double eps = 1e-3;
  std::string beam = "200000";
  int depth_cap = kDefaultDepthCap;
  std::string out;
};

int cmd_series(const SeriesArgs& a, std::ostream& out, std::ostream& err) {
  check_eps(a.eps);
  check_depth_cap(a.depth_cap);
  if (a.n < 0) throw UsageError("--n must be nonnegative");
  if (a.t.empty()) throw UsageError("--t needs at least one value");
  for (double t : a.t)
    if (!(t > 0.0)) throw UsageError("--t values must be positive");
  const Manifold m = require_manifold(a.input);
  int block = 0;
  try {
    if (!a.block.empty()) block = m.block_index(a.block);
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  }
  if (a.class_id < 1 || a.class_id > m.surface(block).class_count())
    throw UsageError("--class out of range for block");

  TreeOptions o;
  o.eps = a.eps;
  o.beam = parse_beam(a.beam);
  o.depth_cap = a.depth_cap;
  o.t_values = a.t;
  o.keep_nodes = false;
  const auto start = std::chrono::steady_clock::now();
  const WallTree tree = build_levels(m, root_state(m, block, a.class_id, a.u0, a.r0), a.n, o);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(tree.to_csv(), a.out, out, err);

  std::ostream& s = a.out.empty() ? err : out;
  const auto it = std::find(a.t.begin(), a.t.end(), 1.0);
  const std::size_t ti = it == a.t.end() ? 0 : static_cast<std::size_t>(it - a.t.begin());
  s << "root psi sum " << fixed(tree.root_psi_sum) << ", tail " << fixed(tree.tail, 8) << '\n';
  for (std::size_t i = 1; i < tree.levels.size(); ++i) {
    const LevelSummary& cur = tree.levels[i];
    const double ratio = cur.p_hat[ti] / tree.levels[i - 1].p_hat[ti];
    s << "n = " << cur.n << ": ratio at t = " << format_double(a.t[ti]) << " " << fixed(ratio)
      << ", lambda_min " << fixed(cur.lambda_min) << ", nodes " << cur.count
      << (cur.truncated ? " (truncated)" : "") << '\n';
  }
  if (tree.budget_exceeded) s << "node budget exceeded; later levels omitted\n";
  err << "elapsed " << fixed(secs, 2) << " s\n";
  return kExitOk;
}

// entropy-bound ----------------------------------------------------------

struct EntropyArgs {
  std::string input;
  std::vector<int> n_list{2};
  double eps = 1e-5;
  std::string beam = "none";
  int depth_cap = kDefaultDepthCap;
  double h_min = 1.0;
  double h_max = 2.0;
  int bisection_steps = 10;
  int config_budget = 32;
  bool no_sweeps = false;
  std::string out;
};

int cmd_entropy_bound(const EntropyArgs& a, std::ostream& out, std::ostream& err) {
  check_eps(a.eps);
  check_depth_cap(a.depth_cap);
  if (a.n_list.empty()) throw UsageError("--n-list needs at least one value");
  for (int n : a.n_list)
    if (n < 0) throw UsageError("--n-list values must be nonnegative");
  if (!(a.h_min > 0.0 && a.h_min < a.h_max && a.h_max <= 2.0))
    throw UsageError("need 0 < --h-min < --h-max <= 2");
  if (a.bisection_steps < 1 || a.bisection_steps > 40)
    throw UsageError("--bisection-steps must lie in [1, 40]");
  if (a.config_budget < 1) throw UsageError("--config-budget must be at least 1");
  const Manifold m = require_manifold(a.input);
  int classes = 0;
  for (int b = 0; b < m.block_count(); ++b) classes += m.surface(b).class_count();
  if (a.config_budget < classes)
    throw UsageError("--config-budget must be at least the number of boundary classes (" +
                     std::to_string(classes) + ")");

  EntropyOptions o;
  o.n_list = a.n_list;
  o.h_lo = a.h_min;
  o.h_hi = a.h_max;
  o.bisection_steps = a.bisection_steps;
  o.trunc.eps = a.eps;
  o.trunc.beam = parse_beam(a.beam);
  o.trunc.depth_cap = a.depth_cap;
  o.config_budget = static_cast<std::size_t>(a.config_budget);
  o.lemma_sweeps = !a.no_sweeps;
  const auto start = std::chrono::steady_clock::now();
  const EntropyReport report = best_bound(m, o);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(report.to_json(), a.out, out, err);
  (a.out.empty() ? err : out) << report.to_text();
  err << "elapsed " << fixed(secs, 2) << " s\n";
  return report.certified ? kExitOk : kExitUncertified;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lower bounds for the volume entropy of NPC graph manifolds", "graphent"};
  app.require_subcommand(1);

  std::string validate_input;
  auto* validate_cmd = app.add_subcommand("validate", "check a manifold description");
  validate_cmd->add_option("input", validate_input, "manifold or surface JSON")->required();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("lemma-sweep", "tabulate the single-block estimate");
  sweep_cmd->add_option("input", sweep.input, "manifold or surface JSON")->required();
  sweep_cmd->add_option("--eps", sweep.eps, "visual-angle cutoff")->capture_default_str();
  sweep_cmd->add_option("--depth-cap", sweep.depth_cap, "word length cap")->capture_default_str();
  sweep_cmd->add_option("--alpha-min", sweep.alpha_min_deg, "wall angle floor for a bare surface (deg)")
      ->capture_default_str();
  sweep_cmd->add_option("--l-grid", sweep.l_grid, "comma-separated l values")->delimiter(',');
  sweep_cmd->add_option("--alpha-grid", sweep.alpha_grid_deg, "comma-separated angles (deg)")
      ->delimiter(',');
  sweep_cmd->add_option("--u-samples", sweep.u_samples, "foot offsets per class");
  sweep_cmd->add_option("--a0-threshold", sweep.a0_threshold, "offset threshold for m0/delta0")
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "CSV output path");

  SeriesArgs series;
  auto* series_cmd = app.add_subcommand("series", "level sums of the wall tree");
  series_cmd->add_option("input", series.input, "manifold JSON")->required();
  series_cmd->add_option("--block", series.block, "root block id (default: first)");
  series_cmd->add_option("--class", series.class_id, "root boundary class")->capture_default_str();
  series_cmd->add_option("--u0", series.u0, "base point offset along the root wall");
  series_cmd->add_option("--r0", series.r0, "base point height");
  series_cmd->add_option("--n", series.n, "deepest level")->capture_default_str();
  series_cmd->add_option("--t", series.t, "comma-separated exponents")->delimiter(',');
  series_cmd->add_option("--eps", series.eps, "visual-angle cutoff")->capture_default_str();
  series_cmd->add_option("--beam", series.beam, "nodes kept per level, or 'none'")
      ->capture_default_str();
  series_cmd->add_option("--depth-cap", series.depth_cap, "word length cap")->capture_default_str();
  series_cmd->add_option("--out", series.out, "CSV output path");

  EntropyArgs ent;
  auto* ent_cmd = app.add_subcommand("entropy-bound", "certify an entropy lower bound");
  ent_cmd->add_option("input", ent.input, "manifold JSON")->required();
  ent_cmd->add_option("--n-list", ent.n_list, "comma-separated levels")->delimiter(',');
  ent_cmd->add_option("--eps", ent.eps, "visual-angle cutoff")->capture_default_str();
  ent_cmd->add_option("--beam", ent.beam, "nodes kept per level, or 'none'")->capture_default_str();
  ent_cmd->add_option("--depth-cap", ent.depth_cap, "word length cap")->capture_default_str();
  ent_cmd->add_option("--h-min", ent.h_min, "bisection lower end")->capture_default_str();
  ent_cmd->add_option("--h-max", ent.h_max, "bisection upper end")->capture_default_str();
  ent_cmd->add_option("--bisection-steps", ent.bisection_steps, "grid refinement")
      ->capture_default_str();
  ent_cmd->add_option("--config-budget", ent.config_budget, "re-rooting configurations")
      ->capture_default_str();
  ent_cmd->add_flag("--no-sweeps", ent.no_sweeps, "skip the lemma sweeps for lambda0_hat");
  ent_cmd->add_option("--out", ent.out, "JSON output path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*validate_cmd) return cmd_validate(validate_input, out);
    if (*sweep_cmd) return cmd_lemma_sweep(sweep, out, err);
    if (*series_cmd) return cmd_series(series, out, err);
    return cmd_entropy_bound(ent, out, err);
  } catch (const ParseError& e) {
    err << "parse error at " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << e.report().to_text();
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace graphent::cli
