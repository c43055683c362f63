#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cli.hpp"
#include "graphent/entropy.hpp"
#include "graphent/local_estimate.hpp"
#include "graphent/manifold.hpp"
#include "graphent/wall_tree.hpp"

namespace py = pybind11;
using namespace graphent;

namespace {

py::dict validation_dict(const ValidationReport& r) {
  py::list errors;
  for (const Diagnostic& d : r.errors) {
    py::dict e;
    e["location"] = d.location;
    e["message"] = d.message;
    errors.append(e);
  }
  py::dict out;
  out["valid"] = r.valid();
  out["errors"] = errors;
  out["alpha_0"] = r.alpha_0;
  out["l0"] = r.l0;
  return out;
}

std::optional<std::size_t> beam_from(std::optional<long long> beam) {
  if (!beam) return std::nullopt;
  if (*beam < 1) throw std::invalid_argument("beam must be at least 1");
  return static_cast<std::size_t>(*beam);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lower bounds for the volume entropy of NPC graph manifolds.";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  m.def("visual_angle", &visual_angle, py::arg("d"));
  m.def("distance_for_visual_angle", &distance_for_visual_angle, py::arg("psi"));
  m.def("delta_correction", &delta_correction, py::arg("l"), py::arg("d"), py::arg("alpha"));

  py::class_<Manifold>(m, "Manifold")
      .def_static(
          "load", [](const std::string& path) { return Manifold(load_manifold(path)); },
          py::arg("path"))
      .def_static(
          "parse", [](const std::string& text) { return Manifold(parse_manifold(text)); },
          py::arg("text"))
      .def_property_readonly("block_count", &Manifold::block_count)
      .def_property_readonly("alpha_0", &Manifold::alpha_0)
      .def_property_readonly("l0", &Manifold::l0)
      .def_property_readonly("block_ids",
                             [](const Manifold& mf) {
                               std::vector<std::string> ids;
                               for (const BlockSpec& b : mf.spec().blocks) ids.push_back(b.id);
                               return ids;
                             })
      .def("to_json", [](const Manifold& mf) { return manifold_to_json(mf.spec()); });

  m.def(
      "validate_text", [](const std::string& text) { return validation_dict(validate(parse_manifold(text))); },
      py::arg("text"));

  m.def(
      "pants_sweep",
      [](std::tuple<double, double, double> lengths, int attach_class, std::vector<double> l,
         std::vector<double> alpha, std::vector<double> u, double eps) {
        const FuchsianSurface s =
            FuchsianSurface::pants({std::get<0>(lengths), std::get<1>(lengths), std::get<2>(lengths)});
        const SweepTable t = lemma_sweep(s, attach_class, {std::move(l), std::move(alpha), std::move(u)}, eps);
        py::list rows;
        for (const SweepRow& r : t.rows)
          rows.append(py::dict(py::arg("l") = r.l, py::arg("alpha") = r.alpha, py::arg("u") = r.u,
                               py::arg("lambda") = r.lambda, py::arg("sum_tau") = r.sum_tau,
                               py::arg("m0_hat") = r.m0_hat, py::arg("delta0_hat") = r.delta0_hat));
        return py::make_tuple(rows, t.lambda0_hat);
      },
      py::arg("lengths"), py::arg("attach_class"), py::arg("l"), py::arg("alpha"), py::arg("u"),
      py::arg("eps") = kDefaultSweepEps);

  m.def(
      "series",
      [](const Manifold& mf, int block, int attach_class, double u0, double r0, int n,
         std::vector<double> t, double eps, std::optional<long long> beam) {
        TreeOptions o;
        o.eps = eps;
        o.beam = beam_from(beam);
        o.t_values = std::move(t);
        o.keep_nodes = false;
        WallTree tree;
        {
          py::gil_scoped_release release;
          tree = build_levels(mf, root_state(mf, block, attach_class, u0, r0), n, o);
        }
        py::list levels;
        for (const LevelSummary& s : tree.levels)
          levels.append(py::dict(py::arg("n") = s.n, py::arg("count") = s.count,
                                 py::arg("p_hat") = s.p_hat, py::arg("lambda_min") = s.lambda_min,
                                 py::arg("truncated") = s.truncated));
        return py::dict(py::arg("levels") = levels, py::arg("tail") = tree.tail,
                        py::arg("root_psi_sum") = tree.root_psi_sum, py::arg("csv") = tree.to_csv());
      },
      py::arg("manifold"), py::arg("block") = 0, py::arg("attach_class") = 1, py::arg("u0") = 0.0,
      py::arg("r0") = 0.0, py::arg("n") = 2, py::arg("t") = std::vector<double>{1.0},
      py::arg("eps") = 1e-3, py::arg("beam") = std::optional<long long>(200000));

  m.def(
      "entropy_bound",
      [](const Manifold& mf, std::vector<int> n_list, double eps, std::optional<long long> beam,
         std::size_t config_budget, int bisection_steps, double h_min, double h_max, bool sweeps) {
        EntropyOptions o;
        o.n_list = std::move(n_list);
        o.trunc.eps = eps;
        o.trunc.beam = beam_from(beam);
        o.config_budget = config_budget;
        o.bisection_steps = bisection_steps;
        o.h_lo = h_min;
        o.h_hi = h_max;
        o.lemma_sweeps = sweeps;
        py::gil_scoped_release release;
        return best_bound(mf, o).to_json();
      },
      py::arg("manifold"), py::arg("n_list") = std::vector<int>{2}, py::arg("eps") = 1e-5,
      py::arg("beam") = std::nullopt, py::arg("config_budget") = 32, py::arg("bisection_steps") = 10,
      py::arg("h_min") = 1.0, py::arg("h_max") = 2.0, py::arg("sweeps") = true);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
