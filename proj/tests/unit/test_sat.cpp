// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <random>

#include "doctest.h"
#include "mcpsolver/sat/backend.hpp"
#include "mcpsolver/sat/cnf.hpp"
#include "mcpsolver/sat/items.hpp"
#include "mcpsolver/sat/solver.hpp"
#include "oracles.hpp"

using namespace mcpsolver;
using namespace mcpsolver::sat;

namespace {

CnfFormula compile_text(const std::vector<std::string>& items) {
    auto parsed = parse_items(items);
    REQUIRE_FALSE(has_errors(parsed.diagnostics));
    return compile(parsed.items);
}

bool any_message(const std::vector<Diagnostic>& ds, const std::string& needle) {
    for (const auto& d : ds)
        if (d.message.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("item parser accepts the five forms") {
    auto out = parse_items({"var x y", "clause x -y"});
    CHECK_FALSE(has_errors(out.diagnostics));
    REQUIRE(out.items.size() == 2);
    CHECK(out.items[0].form == ItemForm::var_decl);
    CHECK(out.items[1].form == ItemForm::clause);
    CHECK(out.items[1].literals == std::vector<Literal>{{"x", false}, {"y", true}});

    auto card = parse_items({"var a b c\natmost 1 a b c\natleast 1 a b\nexactly 2 a b c  # comment"});
    CHECK_FALSE(has_errors(card.diagnostics));
    REQUIRE(card.items.size() == 4);
    CHECK(card.items[1].k == 1);
    CHECK(card.items[3].form == ItemForm::exactly);
    CHECK(card.items[3].line == 4);
}

TEST_CASE("item parser diagnostics") {
    auto undeclared = parse_items({"clause x"});
    REQUIRE(undeclared.diagnostics.size() == 1);
    CHECK(undeclared.diagnostics[0].message == "undeclared variable x");
    CHECK(undeclared.diagnostics[0].line == 1);
    CHECK(undeclared.diagnostics[0].column == 8);

    auto dup = parse_items({"var x", "var x"});
    CHECK(any_message(dup.diagnostics, "duplicate declaration"));
    CHECK(dup.diagnostics[0].line == 2);

    auto unknown = parse_items({"var a", "clauze a"});
    REQUIRE(has_errors(unknown.diagnostics));
    REQUIRE(unknown.diagnostics[0].suggestion);
    for (const char* kw : {"var", "clause", "atmost", "atleast", "exactly"})
        CHECK(unknown.diagnostics[0].suggestion->find(kw) != std::string::npos);

    CHECK(has_errors(parse_items({"var a b", "atmost 3 a b"}).diagnostics));
    CHECK(has_errors(parse_items({"var a b", "atmost -1 a b"}).diagnostics));
    CHECK(has_errors(parse_items({"var a b", "atmost 1 a -b"}).diagnostics));
    CHECK(has_errors(parse_items({"var 1a"}).diagnostics));
    CHECK(has_errors(parse_items({"var a", "clause"}).diagnostics));
}

TEST_CASE("unconstrained variables only warn") {
    auto out = parse_items({"var a b", "clause a"});
    CHECK_FALSE(has_errors(out.diagnostics));
    REQUIRE(out.diagnostics.size() == 1);
    CHECK(out.diagnostics[0].severity == Severity::warning);
    CHECK(out.diagnostics[0].message.find("b") != std::string::npos);
}

TEST_CASE("compile numbers variables in declaration order") {
    auto cnf = compile_text({"var x y", "clause x -y", "clause y"});
    CHECK(cnf.num_base_vars == 2);
    CHECK(cnf.num_aux_vars == 0);
    CHECK(cnf.name_map.at("x") == 1);
    CHECK(cnf.name_map.at("y") == 2);
    CHECK(cnf.clauses == std::vector<Clause>{{1, -2}, {2}});
    CHECK(to_dimacs(cnf) == "c x = 1\nc y = 2\np cnf 2 2\n1 -2 0\n2 0\n");
}

TEST_CASE("degenerate cardinality bounds") {
    auto zero = compile_text({"var a", "atmost 0 a"});
    CHECK(zero.clauses == std::vector<Clause>{{-1}});
    CHECK(zero.num_aux_vars == 0);

    auto loose = compile_text({"var a b", "atmost 2 a b"});
    CHECK(loose.clauses.empty());

    auto all = compile_text({"var a b", "atleast 2 a b"});
    CHECK(all.clauses == std::vector<Clause>{{1}, {2}});
}

TEST_CASE("sequential counter uses n*k registers") {
    auto cnf = compile_text({"var a b c d e", "atmost 2 a b c d e"});
    CHECK(cnf.num_aux_vars == 10);
}

TEST_CASE("compilation is deterministic") {
    std::vector<std::string> items = {"var a b c d", "exactly 2 a b c d", "clause a -d", "atleast 1 b c"};
    CHECK(compile_text(items) == compile_text(items));
}

TEST_CASE("cardinality encodings have exact projected model counts") {
    for (int n = 1; n <= 5; ++n) {
        std::string vars = "var";
        std::string names;
        for (int i = 0; i < n; ++i) {
            vars += " v" + std::to_string(i);
            names += " v" + std::to_string(i);
        }
        for (int k = 0; k <= n; ++k) {
            long at_most = 0;
            long at_least = 0;
            for (int i = 0; i <= n; ++i) {
                if (i <= k) at_most += oracle::binomial(n, i);
                if (i >= k) at_least += oracle::binomial(n, i);
            }
            for (auto [kw, expected] : {std::pair{"atmost", at_most}, std::pair{"atleast", at_least},
                                        std::pair{"exactly", oracle::binomial(n, k)}}) {
                auto cnf = compile_text({vars, std::string(kw) + " " + std::to_string(k) + names});
                CAPTURE(n);
                CAPTURE(k);
                CAPTURE(kw);
                CHECK(oracle::projected_count(cnf.num_base_vars, cnf.num_vars(), cnf.clauses) == expected);
            }
        }
    }
}

TEST_CASE("solver basics") {
    auto one = solve(1, {{1}});
    REQUIRE(one.verdict == Verdict::sat);
    CHECK((*one.assignment)[1]);
    CHECK(solve(1, {{1}, {-1}}).verdict == Verdict::unsat);
    CHECK(solve(0, {}).verdict == Verdict::sat);
    CHECK(solve(2, {{}}).verdict == Verdict::unsat);
    CHECK_THROWS_AS(solve(2, {{3}}), std::invalid_argument);
    CHECK_THROWS_AS(solve(2, {{0}}), std::invalid_argument);
}

TEST_CASE("pigeonhole formulas are unsat") {
    CHECK_FALSE(oracle::truth_table_sat(6, oracle::pigeonhole(3, 2)));
    CHECK(solve(6, oracle::pigeonhole(3, 2)).verdict == Verdict::unsat);
    for (int h = 1; h <= 6; ++h) {
        auto cs = oracle::pigeonhole(h + 1, h);
        CHECK(solve((h + 1) * h, cs).verdict == Verdict::unsat);
        CHECK(solve((h + 1) * h, cs, std::nullopt, {.learning = false}).verdict == Verdict::unsat);
        auto fits = oracle::pigeonhole(h, h);
        auto r = solve(h * h, fits);
        REQUIRE(r.verdict == Verdict::sat);
        CHECK(satisfies(*r.assignment, fits));
    }
}

TEST_CASE("truth-table oracle agreement on small random CNFs") {
    std::mt19937 rng(20240501);
    for (int i = 0; i < 2000; ++i) {
        auto [n, cs] = oracle::random_cnf(rng, 4, 6);
        bool expected = oracle::truth_table_sat(n, cs);
        for (bool learning : {true, false}) {
            auto r = solve(n, cs, std::nullopt, {.learning = learning});
            CHECK((r.verdict == Verdict::sat) == expected);
            if (r.verdict == Verdict::sat) CHECK(satisfies(*r.assignment, cs));
        }
    }
}

TEST_CASE("CDCL and DPLL agree on random 3-SAT near the threshold") {
    std::mt19937 rng(7);
    for (int i = 0; i < 60; ++i) {
        int n = 40;
        std::vector<Clause> cs;
        for (int j = 0; j < 170; ++j) {
            Clause c;
            for (int t = 0; t < 3; ++t) {
                int v = std::uniform_int_distribution<int>(1, n)(rng);
                c.push_back(std::bernoulli_distribution(0.5)(rng) ? v : -v);
            }
            cs.push_back(c);
        }
        auto a = solve(n, cs);
        auto b = solve(n, cs, std::nullopt, {.learning = false});
        CHECK(a.verdict == b.verdict);
        if (a.verdict == Verdict::sat) CHECK(satisfies(*a.assignment, cs));
    }
}

TEST_CASE("learned clauses are entailed") {
    std::mt19937 rng(99);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        int n = 12;
        std::vector<Clause> cs;
        for (int j = 0; j < 55; ++j) {
            Clause c;
            for (int t = 0; t < 3; ++t) {
                int v = std::uniform_int_distribution<int>(1, n)(rng);
                c.push_back(std::bernoulli_distribution(0.5)(rng) ? v : -v);
            }
            cs.push_back(c);
        }
        auto r = solve(n, cs, std::nullopt, {.record_learned = true});
        for (const auto& learned : r.learned) {
            // F entails C iff F and not-C is unsat.
            auto probe = cs;
            for (int lit : learned) probe.push_back({-lit});
            CHECK_FALSE(oracle::truth_table_sat(n, probe));
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("deadline is honoured") {
    auto cs = oracle::pigeonhole(14, 13);
    auto start = std::chrono::steady_clock::now();
    auto r = solve(14 * 13, cs, start + std::chrono::milliseconds(300));
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(r.verdict == Verdict::timeout);
    CHECK_FALSE(r.assignment);
    CHECK(elapsed < 0.3 + 0.1);
}

TEST_CASE("decode projects onto named variables") {
    CnfFormula cnf;
    cnf.num_base_vars = 1;
    cnf.num_aux_vars = 1;
    cnf.name_map = {{"x", 1}};
    CHECK(decode({false, true, false}, cnf) == Json{{"x", true}});
    CHECK(decode({false}, CnfFormula{}) == Json::object());

    auto three = compile_text({"var a b c", "atmost 2 a b c"});
    CHECK(three.num_aux_vars == 6);
    auto r = solve(three);
    REQUIRE(r.verdict == Verdict::sat);
    CHECK(decode(*r.assignment, three).size() == 3);
}

TEST_CASE("backend produces normalized solutions") {
    SatBackend backend;
    CHECK(backend.validate({"var x", "clause x"}).empty());
    auto s = backend.solve({"var x y", "clause x", "clause -y"}, 5.0);
    CHECK(s.status == SolveStatus::sat);
    CHECK(s.satisfiable);
    CHECK(s.values == Json{{"x", true}, {"y", false}});
    CHECK_FALSE(s.objective);
    CHECK(s.success);

    auto u = backend.solve({"var x", "clause x", "clause -x"}, 5.0);
    CHECK(u.status == SolveStatus::unsat);
    CHECK(u.success);

    auto t = backend.solve({}, 5.0);
    CHECK(t.status == SolveStatus::sat);
    CHECK(t.values == Json::object());
}
