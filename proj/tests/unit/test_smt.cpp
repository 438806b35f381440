// SPDX-License-Identifier: Apache-2.0
#include <random>

#include "doctest.h"
#include "mcpsolver/model_store.hpp"
#include "mcpsolver/sandbox.hpp"
#include "mcpsolver/smt/backend.hpp"
#include "mcpsolver/smt/value.hpp"
#include "oracles.hpp"

using namespace mcpsolver;
using namespace mcpsolver::smt;

namespace {

SExpr parse_one(const std::string& text) {
    auto p = parse_sexprs(text);
    REQUIRE(p.diagnostics.empty());
    REQUIRE(p.forms.size() == 1);
    return p.forms[0];
}

std::optional<std::string> smt_exe() { return find_executable(std::nullopt, "MCP_SOLVER_SMT", "z3"); }

bool has_message(const std::vector<Diagnostic>& ds, const std::string& needle, Severity sev) {
    for (const auto& d : ds)
        if (d.severity == sev && d.message.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("s-expression parsing with spans") {
    auto p = parse_sexprs("(declare-const x Int)\n(assert (> x 0)) ; note\n|odd name| \"a \"\"q\"\" b\"");
    CHECK(p.diagnostics.empty());
    REQUIRE(p.forms.size() == 4);
    CHECK(p.forms[1].begin == Position{2, 1});
    CHECK(p.forms[1].end == Position{2, 16});
    CHECK(p.forms[1].children[1].children[1].begin == Position{2, 12});
    CHECK(p.forms[2].atom == "|odd name|");
    CHECK(symbol_name(p.forms[2].atom) == "odd name");
    CHECK(p.forms[3].atom == "\"a \"\"q\"\" b\"");
}

TEST_CASE("unbalanced parentheses are reported at the opening span") {
    auto p = parse_sexprs("(declare-const x Int)\n  (assert (> x 0)");
    REQUIRE(p.diagnostics.size() == 1);
    CHECK(p.diagnostics[0].line == 2);
    CHECK(p.diagnostics[0].column == 3);
    CHECK(p.diagnostics[0].message.find("unbalanced") != std::string::npos);

    auto extra = parse_sexprs("(check-sat))");
    REQUIRE(extra.diagnostics.size() == 1);
    CHECK(extra.diagnostics[0].column == 12);
    CHECK_FALSE(parse_sexprs("\"open").diagnostics.empty());
    CHECK_FALSE(parse_sexprs("|open").diagnostics.empty());
}

TEST_CASE("print/parse closure") {
    std::mt19937 rng(3);
    const char* atoms[] = {"x", "42", "#xff", "|a b|", "\"s\"\"t\"", ":named", "bvadd", "2.5"};
    for (int i = 0; i < 300; ++i) {
        std::function<SExpr(int)> gen = [&](int depth) -> SExpr {
            if (depth == 0 || std::bernoulli_distribution(0.4)(rng))
                return SExpr::make_atom(atoms[std::uniform_int_distribution<int>(0, 7)(rng)]);
            std::vector<SExpr> kids;
            int n = std::uniform_int_distribution<int>(0, 4)(rng);
            for (int k = 0; k < n; ++k) kids.push_back(gen(depth - 1));
            return SExpr::make_list(std::move(kids));
        };
        SExpr e = gen(4);
        auto back = parse_sexprs(to_string(e));
        REQUIRE(back.forms.size() == 1);
        CHECK(same_structure(back.forms[0], e));
    }
}

TEST_CASE("command whitelist") {
    auto ok = parse_script("(declare-const x Int)(assert (> x 0))");
    CHECK(ok.diagnostics.empty());
    CHECK(ok.commands.size() == 2);
    auto bad = parse_script("(exit)");
    REQUIRE(bad.diagnostics.size() == 1);
    CHECK(bad.diagnostics[0].message == "command not permitted: exit");
    CHECK(has_message(parse_script("(set-option :produce-models true)").diagnostics, "not permitted", Severity::error));
    CHECK(has_message(parse_script("x").diagnostics, "expected a command", Severity::error));
    CHECK(permitted_commands().size() == 11);
}

TEST_CASE("symbol validation") {
    CHECK(validate_script("(declare-const x Int)(assert (> x 0))(check-sat)(get-model)").empty());

    auto undeclared = validate_script("(declare-const x Int)\n(assert (> y 0))\n(check-sat)(get-model)");
    REQUIRE(undeclared.size() == 1);
    CHECK(undeclared[0].message == "undeclared symbol y");
    CHECK(undeclared[0].line == 2);
    CHECK(undeclared[0].column == 12);

    auto dup = validate_script("(declare-const x Int)(declare-fun x () Bool)(check-sat)(get-model)");
    CHECK(has_message(dup, "duplicate declaration of x", Severity::error));

    auto warn = validate_script("(declare-const x Int)(assert (= x 1))");
    CHECK_FALSE(has_errors(warn));
    CHECK(has_message(warn, "check-sat", Severity::warning));
    CHECK(has_message(warn, "get-model", Severity::warning));

    // Binders, indexed identifiers, annotations, and push/pop scoping.
    CHECK(validate_script("(declare-const a (Array Int Int))"
                          "(assert (let ((y 3)) (= (select a y) y)))"
                          "(assert (forall ((k Int)) (>= (select a k) 0)))"
                          "(assert ((_ extract 0 0) (_ bv5 8)))"
                          "(assert (! (= a ((as const (Array Int Int)) 0)) :named fact))"
                          "(push 1)(declare-const t Int)(pop 1)(declare-const t Int)"
                          "(define-fun sq ((v Int)) Int (* v v))(assert (> (sq 2) 3))"
                          "(check-sat)(get-model)")
              .empty());
    CHECK(has_message(validate_script("(define-fun f ((v Int)) Int (+ v w))"), "undeclared symbol w", Severity::error));
    CHECK(has_message(validate_script("(pop 1)"), "pop below", Severity::error));
}

TEST_CASE("solver script auto-append is idempotent") {
    auto count = [](const std::string& s, const std::string& needle) {
        std::size_t n = 0;
        for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
        return n;
    };
    auto full = solver_script(parse_script("(declare-const x Int)(check-sat)(get-model)").commands);
    CHECK(count(full, "(check-sat)") == 1);
    CHECK(count(full, "(get-model)") == 1);
    auto bare = solver_script(parse_script("(declare-const x Int)").commands);
    CHECK(bare == "(declare-const x Int)\n(check-sat)\n(get-model)\n");
    auto model_only = solver_script(parse_script("(declare-const x Int)(get-model)").commands);
    CHECK(model_only == "(declare-const x Int)\n(check-sat)\n(get-model)\n");
}

TEST_CASE("blanking keeps positions") {
    std::string text = "(declare-const x Int)\n(check-sat) (assert (> x y))";
    auto cmds = parse_script(text).commands;
    std::string blanked = blank_commands(text, cmds, {"check-sat"});
    CHECK(blanked == "(declare-const x Int)\n            (assert (> x y))");
}

TEST_CASE("model values") {
    auto m = parse_model(parse_one("((define-fun x () Int 5))"));
    CHECK(m.values.at("x") == Value::integer(5));
    auto b = parse_model(parse_one("((define-fun b () (_ BitVec 8) #xfd))"));
    CHECK(b.values.at("b") == Value::bitvector(8, 253));
    CHECK(b.values.at("b").to_json() == Json{{"width", 8}, {"value", 253}});
    auto r = parse_model(parse_one("((define-fun r () Real (/ 1 2)))"));
    CHECK(r.values.at("r") == Value::real(Rational(1, 2)));
    CHECK(r.values.at("r").to_json() == Json{{"num", 1}, {"den", 2}});

    auto mixed = parse_model(parse_one(
        "(model (define-fun n () Int (- 7)) (define-fun q () Real (- (/ 3.0 4.0))) (define-fun d () Real 2.0)"
        " (define-fun p () Bool true) (define-fun w () (_ BitVec 3) #b101) (define-fun c () (_ BitVec 16) (_ bv300 16))"
        " (define-fun big () Int 123456789012345678901234567890)"
        " (define-fun f ((a Int)) Int a) (define-fun g () Int (foo 1)))"));
    CHECK(mixed.values.at("n") == Value::integer(-7));
    CHECK(mixed.values.at("q") == Value::real(Rational(-3, 4)));
    CHECK(mixed.values.at("d") == Value::real(Rational(2)));
    CHECK(mixed.values.at("p") == Value::boolean(true));
    CHECK(mixed.values.at("w") == Value::bitvector(3, 5));
    CHECK(mixed.values.at("c") == Value::bitvector(16, 300));
    CHECK(mixed.values.at("big").to_json() == "123456789012345678901234567890");
    CHECK(mixed.skipped.size() == 2);
    CHECK_FALSE(mixed.values.count("f"));
    CHECK_FALSE(mixed.values.count("g"));

    std::set<std::string> only = {"n"};
    CHECK(parse_model(parse_one("((define-fun n () Int 1) (define-fun g () Int (foo 1)))"), &only).skipped.empty());
}

TEST_CASE("array values") {
    auto c = read_value(parse_one("((as const (Array (_ BitVec 3) (_ BitVec 8))) #x01)"));
    REQUIRE(c);
    CHECK(c->array_select(Value::bitvector(3, 5)) == Value::bitvector(8, 1));
    auto s = read_value(parse_one("(store (store ((as const (Array Int Int)) 0) 1 10) 2 20)"));
    REQUIRE(s);
    CHECK(s->array_select(Value::integer(2)) == Value::integer(20));
    CHECK(s->array_select(Value::integer(9)) == Value::integer(0));
    CHECK(s->to_json() == Json{{"default", 0}, {"entries", Json::array({Json::array({1, 10}), Json::array({2, 20})})}});
    auto l = read_value(parse_one("(lambda ((x!1 Int)) (ite (= x!1 1) 10 (ite (= 2 x!1) 20 0)))"));
    REQUIRE(l);
    CHECK(*l == *s);
    CHECK_FALSE(read_value(parse_one("(_ as-array k!0)")));
}

TEST_CASE("evaluator semantics") {
    Evaluator ev({{"x", Value::bitvector(8, 253)}, {"i", Value::integer(-7)}});
    auto eval = [&](const std::string& t) { return ev.eval(parse_one(t)); };
    CHECK(eval("(bvadd x #x05)") == Value::bitvector(8, 2));
    CHECK(eval("((_ extract 2 0) x)") == Value::bitvector(3, 5));
    CHECK(eval("((_ sign_extend 8) x)") == Value::bitvector(16, 0xfffd));
    CHECK(eval("(bvslt x #x00)") == Value::boolean(true));
    CHECK(eval("(bvsdiv #xf9 #x02)") == Value::bitvector(8, 0xfd));  // -7 / 2 = -3
    CHECK(eval("(bvsrem #xf9 #x02)") == Value::bitvector(8, 0xff));  // -1
    CHECK(eval("(bvsmod #xf9 #x02)") == Value::bitvector(8, 1));
    CHECK(eval("(bvashr #xf0 #x02)") == Value::bitvector(8, 0xfc));
    CHECK(eval("(bvudiv x #x00)") == Value::bitvector(8, 0xff));
    CHECK(eval("(concat #b1 #x0)") == Value::bitvector(5, 16));
    CHECK(eval("((_ rotate_left 1) #b100)") == Value::bitvector(3, 1));
    CHECK(eval("(div i 2)") == Value::integer(-4));
    CHECK(eval("(mod i 2)") == Value::integer(1));
    CHECK(eval("(div 7 (- 2))") == Value::integer(-3));
    CHECK(eval("(/ 1 3)") == Value::real(Rational(1, 3)));
    CHECK(eval("(= 2 2.0)") == Value::boolean(true));
    CHECK(eval("(let ((y 3)) (ite (> y 2) (+ y 1) 0))") == Value::integer(4));
    CHECK(eval("(=> false (= 1 2))") == Value::boolean(true));
    CHECK(eval("(distinct 1 2 1)") == Value::boolean(false));
    CHECK(eval("(select (store ((as const (Array Int Int)) 0) 3 9) 3)") == Value::integer(9));
    CHECK_THROWS_AS(eval("(forall ((k Int)) true)"), EvalError);
    CHECK_THROWS_AS(eval("(unknown-op 1)"), EvalError);
    CHECK_THROWS_AS(eval("zz"), EvalError);
}

TEST_CASE("known witness satisfies the processor-parity fixture") {
    std::string text = oracle::read_file(MCP_FIXTURES "/smt/parity.smt2");
    auto parsed = parse_script(text);
    REQUIRE(parsed.diagnostics.empty());
    CHECK(validate_script(text).empty());

    Value mem = Value::array(Value::bitvector(8, 0));
    mem.array_store(Value::bitvector(3, 5), Value::bitvector(8, 1));
    auto witness = check_witness(parsed.commands, {{"R0", Value::bitvector(8, 253)}, {"mem", mem}});
    CHECK(witness.checked == 1);
    CHECK(witness.holds());

    // R0 = 0 has even parity and R3 = mem[0] & 1 = 0: the property holds there.
    auto holds = check_witness(parsed.commands, {{"R0", Value::bitvector(8, 0)}, {"mem", mem}});
    CHECK(holds.violated.size() == 1);
}

TEST_CASE("solver reply parsing") {
    auto r = parse_solver_reply("sat\n(\n  (define-fun x () Int\n    5)\n)\n");
    CHECK(r.verdict == SolverReply::Verdict::sat);
    REQUIRE(r.model);
    CHECK(parse_model(*r.model).values.at("x") == Value::integer(5));
    CHECK(parse_solver_reply("unsat\n(error \"line 3 column 10: model is not available\")\n").verdict ==
          SolverReply::Verdict::unsat);
    CHECK(parse_solver_reply("timeout\n").verdict == SolverReply::Verdict::timeout);
    auto garbage = parse_solver_reply("Segmentation fault ((\n");
    CHECK(garbage.verdict == SolverReply::Verdict::none);

    auto diags = solver_errors_to_diagnostics({"line 2 column 13: unknown constant y", "Parse Error: <stdin>:4.7: bad",
                                               "weird"});
    REQUIRE(diags.size() == 3);
    CHECK(diags[0].line == 2);
    CHECK(diags[0].column == 13);
    CHECK(diags[1].line == 4);
    CHECK(diags[1].column == 7);
    CHECK(diags[2].column == 0);
}

TEST_CASE("timeout option expansion") {
    CHECK(expand_timeout_option("-T:{s}", 2.7) == "-T:2");
    CHECK(expand_timeout_option("-T:{s}", 0.3) == "-T:1");
    CHECK(expand_timeout_option("--tlimit={ms}", 1.0) == "--tlimit=900");
}

TEST_CASE("missing solver yields an error solution") {
    SmtBackend backend(SmtConfig{});
    auto s = backend.solve({"(declare-const x Int)"}, 1.0);
    CHECK(s.status == SolveStatus::error);
    CHECK(s.message.find("not found") != std::string::npos);
    CHECK(backend.validate({"(declare-const x Int)", "(check-sat)", "(get-model)"}).empty());
}

TEST_CASE("external solver fixtures") {
    auto exe = smt_exe();
    if (!exe) {
        MESSAGE("SKIPPED: no SMT solver executable found");
        return;
    }
    SmtConfig cfg;
    cfg.executable = exe;
    SmtBackend backend(cfg);

    auto five = backend.solve({"(declare-const x Int)", "(assert (= x 5))"}, 10.0);
    CHECK(five.status == SolveStatus::sat);
    CHECK(five.values == Json{{"x", 5}});

    auto contra = backend.solve({"(declare-const p Bool)", "(assert (and p (not p)))"}, 10.0);
    CHECK(contra.status == SolveStatus::unsat);

    std::string text = oracle::read_file(MCP_FIXTURES "/smt/parity.smt2");
    auto parity = backend.solve({text}, 10.0);
    REQUIRE(parity.status == SolveStatus::sat);
    CHECK(parity.values.contains("R0"));
    CHECK(parity.values.contains("mem"));
    CHECK_FALSE(parity.values.contains("R1"));

    double wall = -1.0;
    auto direct = solve_script(text, cfg, 10.0, &wall);
    CHECK(direct.kind == SmtOutcome::Kind::sat);
    CHECK(wall >= 0.0);
}

TEST_CASE("solver-side type errors become diagnostics") {
    auto exe = smt_exe();
    if (!exe) {
        MESSAGE("SKIPPED: no SMT solver executable found");
        return;
    }
    SmtConfig cfg;
    cfg.executable = exe;
    SmtBackend backend(cfg);
    auto ds = backend.validate({"(declare-const x Int)", "(assert (> x \"a\"))"});
    REQUIRE(has_errors(ds));
    CHECK(ds.back().line == 2);
    // The local check and the solver agree on undeclared symbols.
    auto local = backend.validate({"(declare-const x Int)", "(assert (> y 0))"});
    CHECK(local[0].message == "undeclared symbol y");
}

TEST_CASE("hard instance times out") {
    auto exe = smt_exe();
    if (!exe) {
        MESSAGE("SKIPPED: no SMT solver executable found");
        return;
    }
    SmtConfig cfg;
    cfg.executable = exe;
    SmtBackend backend(cfg);
    auto start = std::chrono::steady_clock::now();
    auto s = backend.solve({"(declare-const x Int)(declare-const y Int)(declare-const z Int)",
                            "(assert (= (+ (* x x x) (* y y y) (* z z z)) 33))"},
                           1.0);
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(s.status == SolveStatus::timeout);
    CHECK(s.success);
    CHECK(elapsed < 2.0);
}
