#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "richards/cases.hpp"

namespace py = pybind11;
using namespace richards;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict run_py(const ConfigValues& values, bool write_files)
{
    const CaseConfig cfg = resolve_config(values);
    RunHooks hooks;
    hooks.write_files = write_files;
    RunReport r;
    {
        py::gil_scoped_release release;
        r = run_case(cfg, hooks);
    }
    const Problem pb = make_problem(cfg);
    std::vector<double> cx, cy, area;
    for (const auto& c : pb.mesh().cells) {
        cx.push_back(c.cx);
        cy.push_back(c.cy);
        area.push_back(c.measure());
    }
    py::dict out;
    out["steps"] = r.newton.steps;
    out["newton_total"] = r.newton.total;
    out["newton_average"] = r.newton.average();
    out["newton_max"] = r.newton.max;
    out["iterations"] = r.iterations;
    out["times"] = to_array(r.times);
    out["time"] = r.final_state.time;
    out["saturation"] = to_array(r.final_state.saturation);
    out["pressure"] = to_array(r.final_state.pressure);
    out["x"] = to_array(cx);
    out["y"] = to_array(cy);
    out["area"] = to_array(area);
    out["max_energy_identity"] = r.energy.max_relative_identity();
    out["max_mass_defect"] = r.max_mass_defect;
    out["files"] = r.files;
    return out;
}

std::string resolved_py(const ConfigValues& values)
{
    std::ostringstream os;
    write_config(os, resolve_config(values));
    return os.str();
}

} // namespace

PYBIND11_MODULE(_richards_fv, m)
{
    m.doc() = "Finite-volume Richards equation solver for layered porous media";

    py::register_exception<SolverFailure>(m, "SolverFailure", PyExc_RuntimeError);

    m.def("rock_presets", &rock_preset_names, "Names of the built-in rock types.");
    m.def(
        "saturation", [](const std::string& rock, double p) { return saturation(rock_preset(rock), p); },
        py::arg("rock"), py::arg("pressure"));
    m.def(
        "saturation_inverse", [](const std::string& rock, double s) { return saturation_inverse(rock_preset(rock), s); },
        py::arg("rock"), py::arg("saturation"));
    m.def(
        "rel_perm", [](const std::string& rock, double s) { return rel_perm(rock_preset(rock), s); }, py::arg("rock"),
        py::arg("saturation"));
    m.def(
        "mobility", [](const std::string& rock, double s) { return mobility(rock_preset(rock), s); }, py::arg("rock"),
        py::arg("saturation"));
    m.def("resolved_config", &resolved_py, py::arg("values") = ConfigValues{},
          "Config text after defaults and overrides, as written to resolved_config.txt.");
    m.def("run", &run_py, py::arg("values") = ConfigValues{}, py::arg("write_files") = false,
          "Runs one case. Keys are the config-file keys, e.g. {'case': 'filling', 'nx': '20'}.\n"
          "Returns Newton statistics, the final fields and the audit maxima.");
}
