#include "graphent/local_estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "graphent/format.hpp"
#include "graphent/parallel.hpp"

namespace graphent {

Expansion expand_children(const FuchsianSurface& surface, const ExpansionState& state, double eps,
                          int depth_cap) {
  const Observer obs = make_observer(surface, state.attach_class, state.u, state.l);
  WallEnumeration walls = enumerate_walls(surface, obs, eps, depth_cap);

  Expansion out;
  out.stabilized = walls.stabilized;
  out.psi_total = obs.psi_total;
  out.children.reserve(walls.walls.size());
  const double l = state.l;
  for (WallSight& sight : walls.walls) {
    out.psi_sum += sight.psi;
    ChildRecord rec;
    if (l == 0.0) {
      rec.t_point = obs.foot;
      rec.l_second = sight.dist;
    } else {
      // The segment o -> o_w meets the attaching line where the combination
      // a*o + b*o_w has zero pairing with its polar; a, b > 0 on the segment.
      const Vec3& p = obs.attach_line.p;
      const double a = minkowski(sight.foot.x, p);
      const double b = -minkowski(obs.position.x, p);
      Vec3 t;
      for (int i = 0; i < 3; ++i) t[i] = a * obs.position.x[i] + b * sight.foot.x[i];
      rec.t_point = HPoint::normalized(t);
      rec.t_offset = signed_arclength(obs.attach_line, obs.foot, rec.t_point);
      rec.d = std::abs(rec.t_offset);
      rec.l_second = dist_h2(rec.t_point, sight.foot);
      rec.l_tilde_prime = right_hypotenuse(l, rec.d);
      rec.delta = delta_correction(l, rec.d, state.alpha);
    }
    rec.l_tilde = rec.l_tilde_prime + rec.l_second;
    rec.tau = std::exp(l - rec.l_tilde);
    rec.weight_factor = std::exp(l - rec.l_tilde + rec.delta);
    rec.sight = std::move(sight);
    out.children.push_back(std::move(rec));
  }
  return out;
}

double lambda_value(const Expansion& expansion) {
  double s = 0.0;
  for (const ChildRecord& c : expansion.children) s += c.weight_factor;
  return s;
}

double lambda_value(const FuchsianSurface& surface, const ExpansionState& state, double eps,
                    int depth_cap) {
  return lambda_value(expand_children(surface, state, eps, depth_cap));
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1 || lo == hi) return {lo};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  v.back() = hi;
  return v;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw std::invalid_argument("logspace needs positive bounds");
  std::vector<double> v = linspace(std::log(lo), std::log(hi), n);
  for (double& x : v) x = std::exp(x);
  if (!v.empty()) v.front() = lo, v.back() = hi;
  return v;
}

SweepGrids default_sweep_grids(const FuchsianSurface& surface, int attach_class, double l0,
                               double alpha0) {
  constexpr double half_pi = 0.5 * std::numbers::pi;
  SweepGrids g;
  g.l = logspace(std::max(0.25, l0), 6.0, 12);
  g.alpha = linspace(std::min(alpha0, half_pi), half_pi, 8);
  const double period = surface.boundary(attach_class).translation_length;
  for (int i = 0; i < 8; ++i) g.u.push_back(period * i / 8.0);
  return g;
}

SweepTable lemma_sweep(const FuchsianSurface& surface, int attach_class, const SweepGrids& grids,
                       double eps, int depth_cap, double a0_threshold) {
  if (grids.l.empty() || grids.alpha.empty() || grids.u.empty())
    throw std::invalid_argument("sweep grids must be nonempty");
  struct Job {
    double l, alpha, u;
  };
  std::vector<Job> jobs;
  for (double l : grids.l)
    for (double a : grids.alpha)
      for (double u : grids.u) jobs.push_back({l, a, u});

  std::vector<SweepRow> rows(jobs.size());
  std::vector<char> stable(jobs.size(), 1);
  parallel_for(jobs.size(), [&](std::size_t i) {
    const Job& j = jobs[i];
    ExpansionState st;
    st.attach_class = attach_class;
    st.u = j.u;
    st.l = j.l;
    st.alpha = j.alpha;
    st.L = j.l;
    const Expansion ex = expand_children(surface, st, eps, depth_cap);
    SweepRow row{j.l, j.alpha, j.u, 0.0, 0.0, 0.0, std::numeric_limits<double>::infinity()};
    for (const ChildRecord& c : ex.children) {
      row.lambda += c.weight_factor;
      row.sum_tau += c.tau;
      if (c.d >= a0_threshold) {
        row.m0_hat += c.tau;
        row.delta0_hat = std::min(row.delta0_hat, c.delta);
      }
    }
    if (row.m0_hat == 0.0) row.delta0_hat = 0.0;
    rows[i] = row;
    stable[i] = ex.stabilized ? 1 : 0;
  });

  SweepTable table;
  table.rows = std::move(rows);
  std::vector<SweepRow> sorted = table.rows;
  std::sort(sorted.begin(), sorted.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.l, a.alpha, a.u) < std::tie(b.l, b.alpha, b.u);
  });
  table.lambda0_hat = std::numeric_limits<double>::infinity();
  for (const SweepRow& r : sorted) table.lambda0_hat = std::min(table.lambda0_hat, r.lambda);
  table.stabilized = std::all_of(stable.begin(), stable.end(), [](char c) { return c != 0; });
  return table;
}

std::string SweepTable::to_csv() const {
  std::string out = "l,alpha,u,lambda,sum_tau,m0_hat,delta0_hat\n";
  for (const SweepRow& r : rows) {
    out += format_double(r.l) + ',' + format_double(r.alpha) + ',' + format_double(r.u) + ',' +
           format_double(r.lambda) + ',' + format_double(r.sum_tau) + ',' +
           format_double(r.m0_hat) + ',' + format_double(r.delta0_hat) + '\n';
  }
  return out;
}

}  // namespace graphent
