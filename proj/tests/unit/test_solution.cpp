// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "mcpsolver/solution.hpp"

using namespace mcpsolver;

namespace {

void check_schema(const Json& j) {
    REQUIRE(j.is_object());
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == solution_field_names());
}

}  // namespace

TEST_CASE("mode names and legacy aliases") {
    CHECK(parse_mode("minizinc") == BackendMode::minizinc);
    CHECK(parse_mode("sat") == BackendMode::sat);
    CHECK(parse_mode("smt") == BackendMode::smt);
    CHECK(parse_mode("pysat") == BackendMode::sat);
    CHECK(parse_mode("z3") == BackendMode::smt);
    CHECK_FALSE(parse_mode("cplex"));
}

TEST_CASE("SAT outcome normalizes to a sat solution") {
    SatOutcome o;
    o.kind = SatOutcome::Kind::sat;
    o.assignment = Json{{"x", true}};
    auto s = normalize(o, 0.01, 10.0);
    CHECK(s.status == SolveStatus::sat);
    CHECK(s.satisfiable);
    CHECK(s.values == Json{{"x", true}});
    CHECK_FALSE(s.objective);
    CHECK(s.solve_time == doctest::Approx(0.01));
    CHECK(s.success);
    auto j = to_json(s);
    check_schema(j);
    CHECK(j["objective"].is_null());
}

TEST_CASE("MiniZinc optimum reports objective and optimality") {
    MznOutcome o;
    o.kind = MznOutcome::Kind::solved;
    o.is_optimization = true;
    o.proven_optimal = true;
    o.objective = 1564;
    o.assignments = Json{{"tour", {1, 3, 5, 6, 8, 9, 7, 4, 2}}};
    auto s = normalize(o, 1.5, 30.0);
    CHECK(s.objective == 1564.0);
    CHECK(s.message.find("Optimal") != std::string::npos);
    CHECK(s.values["_optimal"] == true);
    CHECK(to_json(s)["objective"] == 1564);
    CHECK(to_json(s)["objective"].is_number_integer());

    o.proven_optimal = false;
    auto weak = normalize(o, 1.5, 30.0);
    CHECK(weak.values["_optimal"] == false);
    CHECK(weak.message.find("not proven") != std::string::npos);

    MznOutcome satisfy;
    satisfy.kind = MznOutcome::Kind::solved;
    satisfy.assignments = Json{{"x", 3}};
    auto plain = normalize(satisfy, 0.2, 30.0);
    CHECK_FALSE(plain.objective);
    CHECK_FALSE(plain.values.contains("_optimal"));
}

TEST_CASE("timeout keeps success and mentions the limit") {
    SatOutcome o;
    o.kind = SatOutcome::Kind::timeout;
    auto s = normalize(o, 1.0, 1.0);
    CHECK(s.status == SolveStatus::timeout);
    CHECK_FALSE(s.satisfiable);
    CHECK(s.success);
    CHECK(s.message.find("1 s") != std::string::npos);
}

TEST_CASE("failures become error solutions") {
    for (BackendOutcome o : {BackendOutcome{MznOutcome{}}, BackendOutcome{SatOutcome{}}, BackendOutcome{SmtOutcome{}}}) {
        auto s = normalize(o, -3.0, 1.0);
        CHECK(s.status == SolveStatus::error);
        CHECK_FALSE(s.success);
        CHECK_FALSE(s.satisfiable);
        CHECK(s.solve_time == 0.0);
        check_schema(to_json(s));
    }
    auto e = execution_error("could not start solver");
    CHECK(e.status == SolveStatus::error);
    CHECK(e.message == "could not start solver");
}

TEST_CASE("invariant chokepoint rejects inconsistent solutions") {
    Solution s;
    s.status = SolveStatus::sat;
    s.satisfiable = false;
    s.success = true;
    s.message = "x";
    CHECK(check_invariants(s));
    CHECK_THROWS_AS(enforce_invariants(s), std::logic_error);
    CHECK_THROWS_AS(to_json(s), std::logic_error);

    s.satisfiable = true;
    CHECK_FALSE(check_invariants(s));
    s.success = false;
    CHECK(check_invariants(s));

    Solution err;
    err.status = SolveStatus::error;
    err.success = true;
    err.message = "x";
    CHECK(check_invariants(err));
}

TEST_CASE("JSON round trip") {
    SmtOutcome o;
    o.kind = SmtOutcome::Kind::sat;
    o.values = Json{{"b", {{"width", 8}, {"value", 253}}}};
    auto s = normalize(o, 0.5, 2.0);
    CHECK(solution_from_json(to_json(s)) == s);
    CHECK_THROWS_AS(solution_from_json(Json{{"status", "sat"}}), std::invalid_argument);
    auto bad = to_json(s);
    bad["status"] = "passed";
    CHECK_THROWS_AS(solution_from_json(bad), std::invalid_argument);
}

TEST_CASE("error classification maps origins to tiers") {
    std::vector<Diagnostic> ds = {Diagnostic::error(1, 2, "a"), Diagnostic::warning(3, 0, "b")};
    auto v = classify_error(ErrorOrigin::edit_validation, ds);
    CHECK(v.tier == ErrorTierKind::validation);
    CHECK(v.diagnostics == ds);

    auto e = classify_error(ErrorOrigin::solver_run, std::string("spawn failed"));
    CHECK(e.tier == ErrorTierKind::execution);
    CHECK(e.rpc_code == 0);

    auto p = classify_error(ErrorOrigin::transport, RpcFault{-32700, "parse error"});
    CHECK(p.tier == ErrorTierKind::protocol);
    CHECK(p.rpc_code == -32700);
}
