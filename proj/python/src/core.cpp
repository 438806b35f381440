// SPDX-License-Identifier: Apache-2.0
// JSON crosses the boundary as text; the Python package decodes it.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mcpsolver/backend.hpp"
#include "mcpsolver/mcp/session.hpp"
#include "mcpsolver/sat/cnf.hpp"
#include "mcpsolver/sat/items.hpp"
#include "mcpsolver/sat/solver.hpp"

namespace py = pybind11;
using namespace mcpsolver;

namespace {

BackendMode mode_from(const std::string& name) {
    auto m = parse_mode(name);
    if (!m) throw py::value_error("unknown mode '" + name + "' (expected minizinc, sat or smt)");
    return *m;
}

BackendOptions options_from(std::optional<std::string> mzn_exe, std::optional<std::string> smt_exe,
                            const std::string& mzn_solver) {
    BackendOptions o;
    o.paths.minizinc = std::move(mzn_exe);
    o.paths.smt = std::move(smt_exe);
    o.mzn_solver_tag = mzn_solver;
    return o;
}

Json parse_arg(const std::string& text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw py::value_error("arguments are not valid JSON");
    return j;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of mcp_solver";

    py::class_<mcp::Session>(m, "Session")
        .def(py::init([](const std::string& mode, double max_timeout, std::optional<std::string> mzn_exe,
                         std::optional<std::string> smt_exe, const std::string& mzn_solver) {
                 mcp::SessionConfig cfg;
                 if (max_timeout <= 0) throw py::value_error("max_timeout must be positive");
                 cfg.max_timeout_s = max_timeout;
                 cfg.default_timeout_s = std::min(cfg.default_timeout_s, max_timeout);
                 return std::make_unique<mcp::Session>(
                     make_backend(mode_from(mode), options_from(std::move(mzn_exe), std::move(smt_exe), mzn_solver)),
                     cfg);
             }),
             py::arg("mode"), py::arg("max_timeout") = 30.0, py::arg("mzn_exe") = py::none(),
             py::arg("smt_exe") = py::none(), py::arg("mzn_solver") = "gecode")
        .def(
            "handle_line",
            [](mcp::Session& s, const std::string& line) {
                py::gil_scoped_release unlocked;
                return s.handle_line(line);
            },
            py::arg("line"), "Answers one JSON-RPC line; None for notifications.")
        .def(
            "call_tool_json",
            [](mcp::Session& s, const std::string& name, const std::string& arguments) {
                Json args = parse_arg(arguments);
                mcp::ToolOutcome out;
                {
                    py::gil_scoped_release unlocked;
                    out = s.call_tool(name, args);
                }
                return to_json(out).dump();
            },
            py::arg("name"), py::arg("arguments"))
        .def_property_readonly("mode", [](const mcp::Session& s) { return std::string(to_string(s.mode())); })
        .def_property_readonly("items", [](const mcp::Session& s) { return s.model().items; })
        .def_property_readonly("version", [](const mcp::Session& s) { return s.model().version; });

    m.def("tools_json", [] {
        Json out = Json::array();
        for (const auto& t : mcp::tool_descriptors()) out.push_back(to_json(t));
        return out.dump();
    });

    m.def(
        "validate_json",
        [](const std::string& mode, const std::vector<std::string>& items, std::optional<std::string> mzn_exe,
           std::optional<std::string> smt_exe) {
            auto backend = make_backend(mode_from(mode), options_from(std::move(mzn_exe), std::move(smt_exe), "gecode"));
            std::vector<Diagnostic> ds;
            {
                py::gil_scoped_release unlocked;
                ds = backend->validate(items);
            }
            return to_json(ds).dump();
        },
        py::arg("mode"), py::arg("items"), py::arg("mzn_exe") = py::none(), py::arg("smt_exe") = py::none());

    m.def(
        "solve_json",
        [](const std::string& mode, const std::vector<std::string>& items, double timeout,
           std::optional<std::string> mzn_exe, std::optional<std::string> smt_exe, const std::string& mzn_solver) {
            if (timeout <= 0) throw py::value_error("timeout must be positive");
            auto backend = make_backend(mode_from(mode), options_from(std::move(mzn_exe), std::move(smt_exe), mzn_solver));
            Solution s;
            {
                py::gil_scoped_release unlocked;
                s = backend->solve(items, timeout);
            }
            return to_json(enforce_invariants(s)).dump();
        },
        py::arg("mode"), py::arg("items"), py::arg("timeout") = 10.0, py::arg("mzn_exe") = py::none(),
        py::arg("smt_exe") = py::none(), py::arg("mzn_solver") = "gecode");

    m.def(
        "to_dimacs",
        [](const std::vector<std::string>& items) {
            auto parsed = sat::parse_items(items);
            if (has_errors(parsed.diagnostics)) throw py::value_error(format(parsed.diagnostics));
            return sat::to_dimacs(sat::compile(parsed.items));
        },
        py::arg("items"), "DIMACS text for SAT-mode items; ValueError when they do not parse.");

    m.def(
        "sat_solve",
        [](int num_vars, const std::vector<std::vector<int>>& clauses, bool learning) -> py::object {
            sat::SolveResult r;
            try {
                py::gil_scoped_release unlocked;
                r = sat::solve(num_vars, clauses, std::nullopt, {.learning = learning});
            } catch (const std::invalid_argument& e) {
                throw py::value_error(e.what());
            }
            if (r.verdict != sat::Verdict::sat) return py::none();
            std::vector<bool> a(r.assignment->begin() + 1, r.assignment->end());
            return py::cast(a);
        },
        py::arg("num_vars"), py::arg("clauses"), py::arg("learning") = true,
        "Values of variables 1..num_vars when satisfiable, else None.");

    m.def("check_invariants_json", [](const std::string& text) -> std::optional<std::string> {
        Solution s;
        try {
            s = solution_from_json(parse_arg(text));
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return check_invariants(s);
    });
}
