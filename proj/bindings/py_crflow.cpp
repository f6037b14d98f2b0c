#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "crflow/analysis.hpp"
#include "crflow/commands.hpp"
#include "crflow/config.hpp"
#include "crflow/initial_data.hpp"
#include "crflow/oracle.hpp"

namespace py = pybind11;
using namespace crflow;

namespace {

// Python-side handles keep the grid alive through shared ownership.
struct PyGrid {
  std::shared_ptr<NilmanifoldGrid> grid;
};

struct PyMap {
  std::shared_ptr<NilmanifoldGrid> grid;
  MapField field;
};

py::dict report_to_dict(const EnergyReport& r) {
  py::dict d;
  d["step"] = r.step;
  d["t"] = r.t;
  d["E"] = r.E;
  d["E_b"] = r.E_b;
  d["E_0"] = r.E_0;
  d["sup_e"] = r.sup_e;
  d["sup_e_b"] = r.sup_e_b;
  d["sup_e_0"] = r.sup_e_0;
  d["sup_tau"] = r.sup_tau;
  d["sup_ut"] = r.sup_ut;
  auto opt = [](const std::optional<double>& v) -> py::object {
    return v ? py::cast(*v) : py::none();
  };
  d["dissipation_residual"] = opt(r.dissipation_residual);
  d["bochner_min_residual"] = opt(r.bochner_min_residual);
  d["g_bound"] = opt(r.g_bound);
  d["vertical_control_ratio"] = opt(r.vertical_control_ratio);
  d["mean_value_ratio"] = opt(r.mean_value_ratio);
  return d;
}

}  // namespace

PYBIND11_MODULE(_crflow, m) {
  m.doc() = "pseudoharmonic heat flow on Heisenberg nilmanifolds";

  py::class_<PyGrid>(m, "Grid")
      .def(py::init([](int mm, int N) { return PyGrid{std::make_shared<NilmanifoldGrid>(mm, N)}; }),
           py::arg("m"), py::arg("N"))
      .def_property_readonly("m", [](const PyGrid& g) { return g.grid->m(); })
      .def_property_readonly("N", [](const PyGrid& g) { return g.grid->N(); })
      .def_property_readonly("h", [](const PyGrid& g) { return g.grid->h(); })
      .def_property_readonly("n_points", [](const PyGrid& g) { return g.grid->n_points(); })
      .def_property_readonly("cell_weight", [](const PyGrid& g) { return g.grid->cell_weight(); })
      .def("total_volume", [](const PyGrid& g) { return g.grid->total_volume(); })
      .def("cfl_timestep",
           [](const PyGrid& g, double cfl) { return cfl_timestep(*g.grid, cfl); },
           py::arg("cfl_factor") = 0.5);

  py::class_<TargetManifold>(m, "Target")
      .def_property_readonly("n_amb", &TargetManifold::n_amb)
      .def_property_readonly("kappa", &TargetManifold::kappa);
  m.def("unit_sphere", &TargetManifold::unit_sphere, py::arg("n"));
  m.def("flat_torus", &TargetManifold::flat_torus, py::arg("n"));

  py::class_<PyMap>(m, "Map")
      .def_property_readonly("n_comp", [](const PyMap& u) { return u.field.n_comp; })
      .def_property_readonly("values", [](const PyMap& u) { return u.field.values; })
      .def("sphere_constraint_defect",
           [](const PyMap& u) { return u.field.sphere_constraint_defect(); })
      .def("total_energies",
           [](const PyMap& u) {
             TotalEnergies te = total_energies(u.field);
             return py::make_tuple(te.E, te.E_b, te.E_0);
           })
      .def("sup_densities",
           [](const PyMap& u) {
             EnergyDensities d = energy_densities(u.field);
             return py::make_tuple(sup_abs(d.e), sup_abs(d.e_b), sup_abs(d.e_0));
           })
      .def("tension_sup", [](const PyMap& u) { return sup_norm_pointwise(tension_field(u.field)); });

  m.def(
      "make_initial_map",
      [](const PyGrid& g, const TargetManifold& target, const std::string& family,
         double amplitude, std::vector<int> modes, std::uint64_t seed, std::vector<double> base,
         int smoothing_steps) {
        InitialDataSpec spec;
        spec.family = parse_family(family);
        spec.amplitude = amplitude;
        spec.modes = std::move(modes);
        spec.base = std::move(base);
        spec.smoothing_steps = smoothing_steps;
        return PyMap{g.grid, make_initial_map(*g.grid, target, spec, seed)};
      },
      py::arg("grid"), py::arg("target"), py::arg("family"), py::arg("amplitude") = 0.0,
      py::arg("modes") = std::vector<int>{}, py::arg("seed") = 1,
      py::arg("base") = std::vector<double>{}, py::arg("smoothing_steps") = 50);

  m.def(
      "run_flow",
      [](const PyMap& initial, double cfl_factor, double t_max, double tol_tau, int cadence,
         double rho_max, double D, double C1, double C2, double s) {
        FlowConfig fc;
        fc.cfl_factor = cfl_factor;
        fc.t_max = t_max;
        fc.tol_tau = tol_tau;
        fc.cadence = cadence;
        fc.rho_max = rho_max;
        EnergyDensities dens = energy_densities(initial.field);
        ControlParams cp;
        cp.D = D > 0.0 ? D : std::max(sup_abs(dens.e), 1e-9);
        cp.C1 = C1;
        cp.C2 = C2 > 0.0 ? C2
                         : (initial.field.target.kappa() > 0.0
                                ? 4.0 * initial.field.target.kappa()
                                : 1.0);
        cp.s = s > 0.0 ? s : std::min(0.5 * cp.s_max(), 0.25);
        cp.validate();
        Trajectory traj = run_flow(initial.field, fc, cp);
        TerminationReport cls = classify_termination(traj, cp);
        py::dict out;
        out["termination"] = to_string(traj.reason);
        out["dt"] = traj.dt;
        out["rho"] = cls.rho;
        out["summary"] = cls.summary;
        out["density_bound_held"] = cls.density_bound_held;
        out["tail_ut_decreasing"] = cls.tail_ut_decreasing;
        out["control"] = py::dict(py::arg("D") = cp.D, py::arg("C1") = cp.C1,
                                  py::arg("C2") = cp.C2, py::arg("s") = cp.s);
        py::list reports;
        for (const EnergyReport& r : traj.reports) reports.append(report_to_dict(r));
        out["reports"] = reports;
        out["final"] = PyMap{initial.grid, traj.final_state};
        return out;
      },
      py::arg("initial"), py::arg("cfl_factor") = 0.5, py::arg("t_max") = 2.0,
      py::arg("tol_tau") = 1e-4, py::arg("cadence") = 10, py::arg("rho_max") = -1.0,
      py::arg("D") = -1.0, py::arg("C1") = 0.0, py::arg("C2") = -1.0, py::arg("s") = -1.0);

  m.def("comparison_bounds",
        [](double D, double C1, double C2, double t) {
          ControlParams p{D, C1, C2, 0.0};
          ComparisonBound cb = comparison_bounds(p, t);
          return py::make_tuple(cb.T0, cb.g ? py::cast(*cb.g) : py::none());
        },
        py::arg("D"), py::arg("C1"), py::arg("C2"), py::arg("t"));

  m.def("threshold_constants",
        [](double D, double C2, double s) {
          ControlParams p{D, 0.0, C2, s};
          ThresholdConstants th = threshold_constants(p);
          py::dict d;
          d["s_max"] = th.s_max;
          d["x0"] = th.x0;
          d["phi_x0"] = th.phi_x0;
          d["t0_2D"] = th.t0_2D;
          return d;
        },
        py::arg("D"), py::arg("C2"), py::arg("s"));

  m.def("spectral_decay", &spectral_decay, py::arg("modes"), py::arg("t"));

  m.def(
      "gradient_check",
      [](const PyMap& u, const PyMap& v, double delta) {
        GradientCheck gc = gradient_check(u.field, v.field, delta);
        return py::make_tuple(gc.fd_derivative, gc.pairing, gc.rel_error);
      },
      py::arg("u"), py::arg("v"), py::arg("delta") = 1e-4);
}
