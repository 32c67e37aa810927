#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "steinb/report.hpp"

namespace py = pybind11;
using namespace steinb;

namespace {

Tolerances tolerances(std::optional<double> tol)
{
    if (!tol)
        return {};
    if (!(*tol > 0.0))
        throw SteinError(ErrorKind::InvalidParameter, "tol must be positive");
    return Tolerances::from_quad(*tol);
}

std::string run(const std::string& jsonl, std::optional<double> tol, unsigned jobs, bool identity_only)
{
    std::istringstream in(jsonl);
    const auto specs = parse_scenarios(in);
    const Tolerances t = tolerances(tol);
    py::gil_scoped_release release;
    return emit_json(run_scenarios(specs, t, std::max(1u, jobs), identity_only));
}

std::string builtin_jsonl()
{
    std::string out;
    for (const auto& s : builtin_scenarios())
        out += to_json(s).dump() + "\n";
    return out;
}

std::string table(std::optional<double> tol)
{
    const Tolerances t = tolerances(tol);
    py::gil_scoped_release release;
    return emit_table_json(worked_example_table(t));
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    // Held for the life of the interpreter; the translator raises instances carrying the error kind.
    static py::handle stein_error = py::exception<SteinError>(m, "SteinError", PyExc_RuntimeError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const SteinError& e) {
            py::object err = stein_error(e.what());
            err.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(stein_error.ptr(), err.ptr());
        }
    });

    m.def("run", &run, py::arg("jsonl"), py::arg("tol") = py::none(), py::arg("jobs") = 1,
          py::arg("identity_only") = false);
    m.def("builtin_jsonl", &builtin_jsonl);
    m.def("table", &table, py::arg("tol") = py::none());
    m.def("table_row_ids", &worked_example_row_ids);
}
