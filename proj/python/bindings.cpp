#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xvem/errors.hpp"
#include "xvem/mesh.hpp"
#include "xvem/study.hpp"

namespace py = pybind11;
using namespace xvem;

namespace {

RemovedQuadrant parse_quadrant(const std::string& s)
{
    if (s == "top-right")
        return RemovedQuadrant::TopRight;
    if (s == "bottom-right")
        return RemovedQuadrant::BottomRight;
    throw ConfigError("unknown quadrant '" + s + "' (expected top-right or bottom-right)");
}

Eigen::MatrixX2d vertex_array(const Mesh& m)
{
    Eigen::MatrixX2d v(m.n_vertices(), 2);
    for (int i = 0; i < m.n_vertices(); ++i)
        v.row(i) = m.vertex(i).position.transpose();
    return v;
}

std::string csv_text(const std::vector<ErrorReport>& reports)
{
    std::ostringstream os;
    write_csv(os, reports);
    return os.str();
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Enriched virtual element solver for the Poisson problem";

    auto base = py::register_exception<Error>(m, "XvemError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<MeshError>(m, "MeshError", base.ptr());
    py::register_exception<SolverError>(m, "SolverError", base.ptr());

    py::class_<Mesh>(m, "Mesh")
        .def_property_readonly("n_vertices", &Mesh::n_vertices)
        .def_property_readonly("n_edges", &Mesh::n_edges)
        .def_property_readonly("n_elements", &Mesh::n_elements)
        .def_property_readonly("h", &Mesh::h)
        .def_property_readonly("area", &Mesh::total_area)
        .def_property_readonly("vertices", &vertex_array)
        .def_property_readonly("elements",
                               [](const Mesh& mesh) {
                                   std::vector<std::vector<int>> cells;
                                   for (const auto& e : mesh.elements())
                                       cells.push_back(e.vertex_ids);
                                   return cells;
                               })
        .def("__repr__", [](const Mesh& mesh) {
            return "<Mesh " + std::to_string(mesh.n_elements()) + " elements, " + std::to_string(mesh.n_vertices())
                   + " vertices>";
        });

    m.def("cartesian_fractured_mesh", &build_cartesian_fractured_mesh, py::arg("n"));
    m.def(
        "cartesian_lshape_mesh",
        [](int n, const std::string& removed) { return build_cartesian_lshape_mesh(n, parse_quadrant(removed)); },
        py::arg("n"), py::arg("removed") = "bottom-right");
    m.def(
        "hexagonal_lshape_mesh",
        [](int level, const std::string& removed) {
            return build_hexagonal_lshape_mesh(level, parse_quadrant(removed));
        },
        py::arg("level"), py::arg("removed") = "top-right");
    m.def("read_mesh", &read_mesh_file, py::arg("path"));
    m.def("write_mesh", &write_mesh_file, py::arg("path"), py::arg("mesh"));
    m.def(
        "min_star_ratio", [](const Mesh& mesh) { return validate_mesh(mesh).min_star_ratio; }, py::arg("mesh"));

    py::class_<ErrorReport>(m, "ErrorReport")
        .def_readonly("mesh_size", &ErrorReport::mesh_size)
        .def_readonly("cells", &ErrorReport::cells)
        .def_readonly("edges", &ErrorReport::edges)
        .def_readonly("vertices", &ErrorReport::vertices)
        .def_readonly("dofs", &ErrorReport::dofs)
        .def_readonly("l2", &ErrorReport::l2)
        .def_readonly("h1", &ErrorReport::h1)
        .def_readonly("energy", &ErrorReport::energy)
        .def_readonly("condition", &ErrorReport::condition)
        .def_readonly("projector_condition", &ErrorReport::projector_condition)
        .def_readonly("solved", &ErrorReport::solved)
        .def_readonly("status", &ErrorReport::status)
        .def("__repr__", [](const ErrorReport& r) {
            return "<ErrorReport h=" + std::to_string(r.mesh_size) + " dofs=" + std::to_string(r.dofs) + " "
                   + r.status + ">";
        });

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("domain", &RunConfig::domain)
        .def_property(
            "mesh_family", [](const RunConfig& c) { return to_string(c.mesh_family); },
            [](RunConfig& c, const std::string& s) { c.mesh_family = parse_mesh_family(s); })
        .def_readwrite("k", &RunConfig::k)
        .def_property(
            "enrichment", [](const RunConfig& c) { return to_string(c.mode); },
            [](RunConfig& c, const std::string& s) { c.mode = parse_enrichment_mode(s); })
        .def_readwrite("gamma", &RunConfig::gamma)
        .def_readwrite("refine", &RunConfig::refine)
        .def_readwrite("mesh_files", &RunConfig::mesh_files)
        .def_property(
            "solver", [](const RunConfig& c) { return to_string(c.solver.kind); },
            [](RunConfig& c, const std::string& s) { c.solver.kind = parse_solver_kind(s); })
        .def_property(
            "tol", [](const RunConfig& c) { return c.solver.tol; }, [](RunConfig& c, double t) { c.solver.tol = t; })
        .def_property(
            "max_iterations", [](const RunConfig& c) { return c.solver.max_iterations; },
            [](RunConfig& c, int n) { c.solver.max_iterations = n; })
        .def_readwrite("grading_levels", &RunConfig::grading_levels)
        .def_readwrite("tau_rank", &RunConfig::tau_rank)
        .def_readwrite("out", &RunConfig::out)
        .def_readwrite("export_mesh", &RunConfig::export_mesh)
        .def("validate", &validate);

    m.def("run_convergence_study", &run_convergence_study, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_single", &run_single, py::arg("config"), py::arg("mesh"), py::call_guard<py::gil_scoped_release>());
    m.def("emit_report", &emit_report, py::arg("reports"), py::arg("k"));
    m.def("to_csv", &csv_text, py::arg("reports"));
    m.def(
        "fit_rates",
        [](const std::vector<double>& h, const std::vector<double>& dofs, const std::vector<double>& errors) {
            const RateFit f = fit_rates(h, dofs, errors);
            py::dict d;
            d["pairwise_h"] = f.pairwise_h;
            d["pairwise_dofs"] = f.pairwise_dofs;
            d["asymptotic_h"] = f.asymptotic_h;
            d["asymptotic_dofs"] = f.asymptotic_dofs;
            return d;
        },
        py::arg("h"), py::arg("dofs"), py::arg("errors"));
}
