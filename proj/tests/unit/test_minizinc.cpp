// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "doctest.h"
#include "mcpsolver/minizinc.hpp"
#include "mcpsolver/sandbox.hpp"
#include "oracles.hpp"

using namespace mcpsolver;
using namespace mcpsolver::mzn;

namespace {

std::optional<std::string> mzn_exe() { return find_executable(std::nullopt, "MCP_SOLVER_MZN", "minizinc"); }

std::vector<std::string> tsp_items() {
    auto j = Json::parse(oracle::read_file(MCP_FIXTURES "/tsp/items.json"));
    return j.get<std::vector<std::string>>();
}

bool has_message(const std::vector<Diagnostic>& ds, const std::string& needle, Severity sev) {
    for (const auto& d : ds)
        if (d.severity == sev && d.message.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("comments and strings are blanked") {
    std::string text = "int: x; % trailing ; note\n/* block\n; */ string: s = \"a;b\";";
    std::string out = strip_comments_and_strings(text);
    CHECK(out.size() == text.size());
    CHECK(std::count(out.begin(), out.end(), '\n') == 2);
    CHECK(std::count(out.begin(), out.end(), ';') == 2);
    CHECK(out.find("\"   \"") != std::string::npos);
}

TEST_CASE("item terminators") {
    auto ds = local_checks({"var int: x"});
    REQUIRE(has_errors(ds));
    CHECK(ds[0].line == 1);
    CHECK(ds[0].column == 10);
    CHECK(ds[0].message.find("';'") != std::string::npos);
    CHECK(ds[0].item == 1);

    auto second = local_checks({"var 1..3: x;", "constraint x > 1 % no semicolon here;", "solve satisfy;"});
    REQUIRE(has_errors(second));
    CHECK(second[0].line == 2);
    CHECK(local_checks({"var 1..3: x; % done", "solve satisfy; /* end */"}).empty());
}

TEST_CASE("include safety and solve presence") {
    CHECK(local_checks({"include \"globals.mzn\";", "solve satisfy;"}).empty());
    CHECK(has_message(local_checks({"include \"../etc/passwd\";", "solve satisfy;"}), "not permitted", Severity::error));
    CHECK(has_message(local_checks({"include \"/abs.mzn\";", "solve satisfy;"}), "not permitted", Severity::error));
    auto nosolve = local_checks({"var 1..3: x;"});
    CHECK_FALSE(has_errors(nosolve));
    CHECK(has_message(nosolve, "no solve item", Severity::warning));
    CHECK(has_message(local_checks({"% solve satisfy;", "var 1..3: x;"}), "no solve item", Severity::warning));
}

TEST_CASE("optimization detection") {
    CHECK(is_optimization("var int: c;\nsolve minimize c;"));
    CHECK(is_optimization("solve :: int_search(x, input_order, indomain_min)\n  maximize c;"));
    CHECK_FALSE(is_optimization("solve satisfy;"));
    CHECK_FALSE(is_optimization("var int: minimize_me; solve satisfy;"));
}

TEST_CASE("json stream transcripts") {
    std::string raw =
        "{\"type\": \"solution\", \"output\": {\"json\": {\"tour\": [1,2,3], \"_objective\": 1700}}}\n"
        "{\"type\": \"solution\", \"output\": {\"json\": {\"tour\": [1,3,2], \"_objective\": 1564, \"_checker\": \"\"}}}\n"
        "{\"type\": \"status\", \"status\": \"OPTIMAL_SOLUTION\"}\n";
    auto run = parse_run(raw);
    CHECK(run.saw_solution);
    CHECK(run.objective == 1564.0);
    CHECK(run.objective_history == std::vector<double>{1700.0, 1564.0});
    CHECK(run.proven_optimal);
    CHECK(run.search_complete);
    CHECK(run.assignments == Json{{"tour", {1, 3, 2}}});

    auto unsat = parse_run("{\"type\": \"status\", \"status\": \"UNSATISFIABLE\"}\n");
    CHECK(unsat.proven_unsat);
    CHECK_FALSE(unsat.saw_solution);
    CHECK(parse_run("=====UNSATISFIABLE=====\n").proven_unsat);

    auto err = parse_run("{\"type\": \"error\", \"what\": \"type error\", \"message\": \"bad\"}\n");
    CHECK(err.errors.size() == 1);
    CHECK(parse_run("{\"type\": \"solution\", \n").malformed);
}

TEST_CASE("compiler diagnostics mapping") {
    std::string line =
        "{\"type\": \"error\", \"what\": \"type error\", \"location\": {\"filename\": \"model.mzn\", \"firstLine\": 3, "
        "\"firstColumn\": 12, \"lastLine\": 3, \"lastColumn\": 12}, \"message\": \"undefined identifier `y'\"}\n";
    auto ds = compiler_diagnostics(line, "");
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].line == 3);
    CHECK(ds[0].column == 12);
    CHECK(ds[0].message.find("undefined identifier") != std::string::npos);

    auto text = compiler_diagnostics("", "/tmp/mcpsolver-x/model.mzn:4.2:\nMiniZinc: syntax error\n");
    REQUIRE_FALSE(text.empty());
    CHECK(text[0].line == 4);
}

TEST_CASE("missing executable") {
    MiniZincBackend backend(MznConfig{});
    auto ds = backend.validate({"var 1..3: x;", "solve satisfy;"});
    CHECK(has_message(ds, "MiniZinc executable not found", Severity::error));
    auto s = backend.solve({"var 1..3: x;", "solve satisfy;"}, 1.0);
    CHECK(s.status == SolveStatus::error);
}

TEST_CASE("compiler validation and solving") {
    auto exe = mzn_exe();
    if (!exe) {
        MESSAGE("SKIPPED: no MiniZinc executable found");
        return;
    }
    MznConfig cfg;
    cfg.executable = exe;
    MiniZincBackend backend(cfg);

    auto undefined = backend.validate({"constraint y > 1;", "solve satisfy;"});
    REQUIRE(has_errors(undefined));
    CHECK(undefined[0].line == 1);

    auto unsat = backend.solve({"var 1..2: x;", "constraint x > 5;", "solve satisfy;"}, 20.0);
    CHECK(unsat.status == SolveStatus::unsat);
    CHECK(unsat.success);

    auto tsp = backend.solve(tsp_items(), 30.0);
    REQUIRE(tsp.status == SolveStatus::sat);
    CHECK(tsp.objective == 1564.0);
    CHECK(tsp.values["_optimal"] == true);
    auto tour = tsp.values["tour"].get<std::vector<int>>();
    CHECK(tour.front() == 1);
    std::sort(tour.begin(), tour.end());
    CHECK(tour == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9});
}
