#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "entcert/certify.hpp"
#include "entcert/error.hpp"
#include "entcert/physmodels.hpp"
#include "entcert/seporacle.hpp"
#include "entcert/witness.hpp"
#include "entcert/witnesslab.hpp"

namespace py = pybind11;
using namespace entcert;

namespace {

Label to_label(const py::handle& h) {
  if (py::isinstance<Label>(h)) return h.cast<Label>();
  return Label::parse(h.cast<std::string>());
}

CorrelationDataset make_dataset(int n_sites, const py::dict& values) {
  std::vector<CorrelationDataset::Entry> entries;
  for (const auto& [k, v] : values) entries.emplace_back(to_label(k), v.cast<double>());
  return CorrelationDataset::make(n_sites, entries);
}

py::dict entries_of(const CorrelationDataset& ds) {
  py::dict out;
  for (const auto& [l, v] : ds.entries()) out[py::str(l.str())] = v;
  return out;
}

ModelSpec model_spec(const std::string& model, int n, double g, double j) {
  ModelSpec s;
  if (model == "heisenberg") {
    s.kind = ModelKind::Heisenberg;
  } else if (model == "ising") {
    s.kind = ModelKind::TransverseIsing;
  } else {
    throw Error(ErrorKind::InvalidArgument, "model must be heisenberg or ising, got " + model);
  }
  s.n = n;
  s.g = g;
  s.J = j;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entanglement certification from partial one- and two-body Pauli correlators";

  py::register_exception<Error>(m, "EntcertError", PyExc_ValueError);

  py::enum_<Axis>(m, "Axis").value("X", Axis::X).value("Y", Axis::Y).value("Z", Axis::Z);

  py::class_<Label>(m, "Label")
      .def_static("one_body", &Label::one_body, py::arg("site"), py::arg("axis"))
      .def_static("two_body", &Label::two_body, py::arg("i"), py::arg("j"), py::arg("a"), py::arg("b"))
      .def_static("parse", [](const std::string& s) { return Label::parse(s); })
      .def_readonly("i", &Label::i)
      .def_readonly("j", &Label::j)
      .def_readonly("a", &Label::a)
      .def_readonly("b", &Label::b)
      .def("is_one_body", &Label::is_one_body)
      .def("__str__", &Label::str)
      .def("__repr__", [](const Label& l) { return "Label('" + l.str() + "')"; })
      .def("__eq__", [](const Label& a, const Label& b) { return a == b; })
      .def("__lt__", [](const Label& a, const Label& b) { return a < b; })
      .def("__hash__", [](const Label& l) { return py::hash(py::str(l.str())); });

  py::class_<CorrelationDataset>(m, "CorrelationDataset")
      .def(py::init(&make_dataset), py::arg("n_sites"), py::arg("values"),
           "values: mapping from label (Label or text such as 'XY_0_5') to correlator")
      .def_property_readonly("n_sites", &CorrelationDataset::n_sites)
      .def("__len__", &CorrelationDataset::size)
      .def("__contains__", [](const CorrelationDataset& ds, const py::handle& l) { return ds.contains(to_label(l)); })
      .def("get", [](const CorrelationDataset& ds, const py::handle& l) { return ds.get(to_label(l)); })
      .def("entries", &entries_of)
      .def("to_json", &dataset_to_json)
      .def_static("from_json", [](const std::string& s) { return dataset_from_json(s); })
      .def("__eq__", [](const CorrelationDataset& a, const CorrelationDataset& b) { return a == b; });

  m.def("scale_noise", &scale_noise, py::arg("dataset"), py::arg("noise"));
  m.def("partial_transpose", &partial_transpose, py::arg("dataset"), py::arg("sites"));
  m.def("restrict_sites", &restrict_sites, py::arg("dataset"), py::arg("sites"));

  m.def("werner_dataset", &werner_dataset, py::arg("noise"));
  m.def(
      "quench_dataset", [](int n, double t) { return quench_dataset(quench_amplitudes(n, t)); }, py::arg("n"), py::arg("time"));
  m.def(
      "quench_concurrence_robustness", [](int n, double t) { return quench_concurrence_robustness(quench_amplitudes(n, t)); },
      py::arg("n"), py::arg("time"));
  m.def(
      "thermal_dataset",
      [](const std::string& model, int n, double temperature, double g, double j) {
        return thermal_dataset_ed(model_spec(model, n, g, j), temperature);
      },
      py::arg("model"), py::arg("n"), py::arg("temperature"), py::arg("g") = 0.0, py::arg("J") = 1.0);
  m.def(
      "structure_factor", [](const CorrelationDataset& ds, double k, Axis a) { return structure_factor(ds, k, a); },
      py::arg("dataset"), py::arg("k"), py::arg("axis"));
  m.def("commensurate_grid", &commensurate_grid, py::arg("n"));

  py::class_<Witness>(m, "Witness")
      .def_property_readonly("coefficients",
                             [](const Witness& w) {
                               py::dict out;
                               for (const auto& [l, v] : w.coefficients) out[py::str(l.str())] = v;
                               return out;
                             })
      .def_readonly("offset", &Witness::offset)
      .def_readonly("separable_bound", &Witness::separable_bound)
      .def_property_readonly("orientation", [](const Witness& w) { return to_string(w.orientation); })
      .def_property_readonly("provenance", [](const Witness& w) { return to_string(w.provenance); })
      .def("to_json", &witness_to_json)
      .def_static("from_json", [](const std::string& s) { return witness_from_json(s); });

  m.def(
      "eval_witness",
      [](const Witness& w, const CorrelationDataset& ds) {
        const auto e = eval_witness(w, ds);
        return py::dict(py::arg("value") = e.value, py::arg("violated") = e.violated, py::arg("margin") = e.margin);
      },
      py::arg("witness"), py::arg("dataset"));

  py::class_<Certification>(m, "Certification")
      .def_property_readonly("entangled", [](const Certification& c) { return c.entangled; })
      .def_property_readonly("lambda_star", [](const Certification& c) { return c.solution.lambda_star; })
      .def_property_readonly("status", [](const Certification& c) { return to_string(c.solution.status); })
      .def_property_readonly("scheme", [](const Certification& c) { return scheme_name(c.scheme); })
      .def_property_readonly("duality_gap", [](const Certification& c) { return c.solution.duality_gap; })
      .def_property_readonly("w_dot_c", [](const Certification& c) { return c.solution.w_dot_c; })
      .def_property_readonly("dual_residual", [](const Certification& c) { return c.solution.dual_residual; })
      .def_property_readonly("iterations", [](const Certification& c) { return c.solution.iterations; })
      .def_property_readonly("gamma_dim", [](const Certification& c) { return c.problem.gamma_dim(); })
      .def(
          "witness", [](const Certification& c, double threshold) { return extract_witness(c.solution, c.problem, threshold); },
          py::arg("threshold") = kDetectionThreshold);

  m.def(
      "certify",
      [](const CorrelationDataset& ds, int level, std::optional<std::string> scheme, double tol, int max_iter) {
        CertifyOptions o;
        o.level = level;
        if (scheme && *scheme != "auto") o.scheme = parse_scheme_kind(*scheme);
        o.solver.gap_tol = tol;
        o.solver.feas_tol = tol;
        o.solver.max_iter = max_iter;
        py::gil_scoped_release release;
        return certify(ds, o);
      },
      py::arg("dataset"), py::arg("level") = 1, py::arg("scheme") = py::none(), py::arg("tol") = 1e-8, py::arg("max_iter") = 200);

  m.def(
      "phase_witness_value",
      [](const CorrelationDataset& ds, std::vector<std::array<double, 3>> phi) {
        return phase_witness_value(ds, PhaseAssignment{std::move(phi)});
      },
      py::arg("dataset"), py::arg("phases"));
  m.def(
      "structure_witness_value",
      [](const CorrelationDataset& ds, std::array<double, 3> k) {
        return structure_witness_value(ds, {Vec2{k[0], 0.0}, Vec2{k[1], 0.0}, Vec2{k[2], 0.0}}, chain_positions(ds.n_sites()));
      },
      py::arg("dataset"), py::arg("k"));
  m.def(
      "bipartite_witness_value",
      [](const CorrelationDataset& ds, std::vector<std::array<double, 3>> phi) {
        return bipartite_witness_value(ds, PhaseAssignment{std::move(phi)});
      },
      py::arg("dataset"), py::arg("phases"));
  m.def(
      "spin_squeezing_values",
      [](const CorrelationDataset& ds) {
        std::vector<double> out;
        for (const auto& r : spin_squeezing_check(collective_moments(ds), ds.n_sites())) out.push_back(r.value);
        return out;
      },
      py::arg("dataset"), "Left-hand sides of the eight inequalities; separable data give values <= 1");
  m.def(
      "cmc_check",
      [](const CorrelationDataset& ds, double tol) {
        const auto r = cmc_check(ds, tol);
        return py::dict(py::arg("feasible") = r.feasible, py::arg("t_star") = r.t_star);
      },
      py::arg("dataset"), py::arg("tol") = kCmcTolerance);

  m.def(
      "random_product_dataset", [](int n, std::uint64_t seed) { return dataset_of(random_product_state(n, seed)); },
      py::arg("n"), py::arg("seed"));
  m.def(
      "max_over_product_states",
      [](const Witness& w, int n, int restarts, std::uint64_t seed) {
        OracleOptions o;
        o.restarts = restarts;
        o.seed = seed;
        OracleResult r;
        {
          py::gil_scoped_release release;
          r = max_over_product_states(w, n, o);
        }
        return py::dict(py::arg("best_value") = r.best_value, py::arg("bloch") = r.best_state.bloch(),
                        py::arg("converged_restarts") = r.converged_restarts);
      },
      py::arg("witness"), py::arg("n"), py::arg("restarts") = 1000, py::arg("seed") = 1);
}
