// SPDX-License-Identifier: Apache-2.0
// Acceptance checks. Prints one line per criterion and exits nonzero when
// any of them fails. Skipped criteria (missing external solver) do not fail.
#include <dirent.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "mcpsolver/agent/agent.hpp"
#include "mcpsolver/mcp/rpc.hpp"
#include "mcpsolver/mcp/session.hpp"
#include "mcpsolver/model_store.hpp"
#include "mcpsolver/sandbox.hpp"
#include "mcpsolver/sat/solver.hpp"
#include "mcpsolver/smt/backend.hpp"
#include "mcpsolver/smt/value.hpp"
#include "oracles.hpp"

using namespace mcpsolver;

namespace {

// Pinned limits, in seconds unless noted.
constexpr double kProtocolBudget = 1.0;
constexpr double kPurityBudget = 10.0;
constexpr double kOracleBudget = 5.0;
constexpr double kCardinalityBudget = 30.0;
constexpr double kTspTimeout = 30.0;
constexpr double kTspObjective = 1564.0;
constexpr double kObjectiveTolerance = 1e-9;
constexpr double kHardTimeout = 1.0;
constexpr double kHardReturnBudget = 2.0;
constexpr double kFuzzBudget = 10.0;
constexpr double kSolveTimeSlack = 1.0;  // solve_time may exceed the timeout by the kill grace
constexpr double kReplayBudget = 5.0;    // excluding time spent inside MiniZinc
constexpr int kPuritySequences = 1000;
constexpr int kOracleFormulas = 600;
constexpr int kFuzzCalls = 240;

enum class Outcome { pass, fail, skip };

struct Result {
    Outcome outcome = Outcome::fail;
    std::string detail;
};

Result pass(std::string d) { return {Outcome::pass, std::move(d)}; }
Result fail(std::string d) { return {Outcome::fail, std::move(d)}; }
Result skip(std::string d) { return {Outcome::skip, std::move(d)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 2) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(prec) << v;
    return ss.str();
}

std::optional<std::string> mzn_exe() { return find_executable(std::nullopt, "MCP_SOLVER_MZN", "minizinc"); }
std::optional<std::string> smt_exe() { return find_executable(std::nullopt, "MCP_SOLVER_SMT", "z3"); }

std::vector<std::string> tsp_items() {
    Json j = Json::parse(oracle::read_file(MCP_FIXTURES "/tsp/items.json"));
    return j.get<std::vector<std::string>>();
}

/// Skips validation so that solve() sees whatever items the fuzzer builds.
class Permissive final : public Backend {
public:
    explicit Permissive(std::unique_ptr<Backend> inner) : inner_(std::move(inner)) {}
    BackendMode mode() const override { return inner_->mode(); }
    std::vector<Diagnostic> validate(const std::vector<std::string>&) override { return {}; }
    Solution solve(const std::vector<std::string>& items, double t) override { return inner_->solve(items, t); }

private:
    std::unique_ptr<Backend> inner_;
};

/// Accumulates the wall time spent in the wrapped backend.
class Timed final : public Backend {
public:
    Timed(std::unique_ptr<Backend> inner, double& total) : inner_(std::move(inner)), total_(total) {}
    BackendMode mode() const override { return inner_->mode(); }
    std::vector<Diagnostic> validate(const std::vector<std::string>& items) override {
        auto t0 = std::chrono::steady_clock::now();
        auto r = inner_->validate(items);
        total_ += seconds_since(t0);
        return r;
    }
    Solution solve(const std::vector<std::string>& items, double t) override {
        auto t0 = std::chrono::steady_clock::now();
        auto r = inner_->solve(items, t);
        total_ += seconds_since(t0);
        return r;
    }

private:
    std::unique_ptr<Backend> inner_;
    double& total_;
};

/// Answers every solve with a fixed solution; stands in for MiniZinc when
/// it is not installed.
class Canned final : public Backend {
public:
    explicit Canned(Solution s) : s_(std::move(s)) {}
    BackendMode mode() const override { return BackendMode::minizinc; }
    std::vector<Diagnostic> validate(const std::vector<std::string>&) override { return {}; }
    Solution solve(const std::vector<std::string>&, double) override { return s_; }

private:
    Solution s_;
};

// ---------------------------------------------------------------- 1

/// Replaces ids by their order of first appearance and solve_time values
/// (plain or inside escaped text) by a fixed marker.
std::string normalize_transcript(const std::string& raw) {
    static const std::regex solve_time(R"((\\?"solve_time\\?":)-?[0-9][0-9.eE+-]*)");
    std::istringstream in(raw);
    std::ostringstream out;
    std::map<std::string, int> ids;
    std::string line;
    while (std::getline(in, line)) {
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            out << "<<unparseable>> " << line << "\n";
            continue;
        }
        // Re-serializing must reproduce the line, or the comparison below
        // would not be byte-for-byte.
        if (j.dump(-1, ' ', false, Json::error_handler_t::replace) != line) out << "<<noncanonical>> ";
        if (j.contains("id")) {
            auto key = j["id"].dump();
            auto [it, fresh] = ids.emplace(key, static_cast<int>(ids.size()) + 1);
            j["id"] = it->second;
        }
        out << std::regex_replace(j.dump(-1, ' ', false, Json::error_handler_t::replace), solve_time, "$1NORMALIZED")
            << "\n";
    }
    return out.str();
}

std::string golden_output(const std::string& input) {
    ProcessSpec spec;
    spec.argv = {MCP_SOLVER_EXE, "serve", "--mode", "sat"};
    spec.stdin_text = input;
    spec.timeout_s = 5.0;
    auto r = run_isolated(spec);
    if (r.timed_out || r.exit_code != 0)
        throw std::runtime_error("server exited abnormally: " + r.stderr_text.substr(0, 200));
    return normalize_transcript(r.stdout_text);
}

Result protocol_conformance() {
    std::string input = oracle::read_file(MCP_FIXTURES "/golden/sat_session.in.jsonl");
    std::string expected = oracle::read_file(MCP_FIXTURES "/golden/sat_session.out.jsonl");
    auto t0 = std::chrono::steady_clock::now();
    std::string got = golden_output(input);
    double elapsed = seconds_since(t0);
    if (got != expected) {
        std::istringstream a(expected), b(got);
        std::string la, lb;
        int n = 0;
        while (true) {
            bool ea = !std::getline(a, la), eb = !std::getline(b, lb);
            ++n;
            if (ea && eb) break;
            if (ea != eb || la != lb) return fail("response line " + std::to_string(n) + " differs: " + lb.substr(0, 120));
        }
        return fail("transcripts differ");
    }
    std::istringstream lines(got);
    std::string line;
    std::vector<std::string> names;
    while (std::getline(lines, line)) {
        Json j = Json::parse(line, nullptr, false);  // lines with a normalized solve_time do not parse
        if (j.is_object() && j.contains("result") && j["result"].contains("tools"))
            for (const auto& t : j["result"]["tools"]) names.push_back(t["name"]);
    }
    std::vector<std::string> want = {"clear_model", "add_item", "replace_item", "delete_item", "get_model",
                                     "solve_model"};
    if (names != want) return fail("tools/list names differ");
    if (elapsed >= kProtocolBudget) return fail("took " + fmt(elapsed) + " s");
    return pass("byte-identical transcript, six tools");
}

// ---------------------------------------------------------------- 2

Result rejection_purity() {
    std::mt19937 rng(20241105);
    auto backend = make_backend(BackendMode::sat);
    const std::vector<std::string> pool = {
        "var a b c",   "var d",         "clause a -b",   "clause c d",     "atmost 1 a b c", "exactly 2 a b d",
        "clause zz",   "bogus line",    "var 9x",        "atleast 5 a b",  "var a",          "",
        "# note",      "clause -a\nclause a", "atmost -1 a", "clause"};
    auto pick = [&](const auto& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
    long committed = 0, rejected = 0;
    for (int seq = 0; seq < kPuritySequences; ++seq) {
        ModelState model;
        int len = std::uniform_int_distribution<int>(1, 12)(rng);
        for (int step = 0; step < len; ++step) {
            long n = static_cast<long>(model.size());
            long idx = std::uniform_int_distribution<long>(-1, n + 2)(rng);
            EditRequest edit;
            switch (std::uniform_int_distribution<int>(0, 9)(rng)) {
                case 0: edit = EditRequest::clear(); break;
                case 1: case 2: edit = EditRequest::remove(idx); break;
                case 3: case 4: edit = EditRequest::replace(idx, pick(pool)); break;
                default: edit = EditRequest::add(idx, pick(pool)); break;
            }
            ModelState before = model;
            auto r = apply_edit(model, edit, *backend);
            std::string where = "sequence " + std::to_string(seq) + " step " + std::to_string(step);
            if (std::holds_alternative<EditRejected>(r)) {
                ++rejected;
                if (!(model == before)) return fail(where + ": rejected edit changed the model");
                continue;
            }
            ++committed;
            if (model.version != before.version + 1) return fail(where + ": version not bumped by one");
            long want = n;
            switch (edit.kind) {
                case EditKind::add: want = n + 1; break;
                case EditKind::remove: want = n - 1; break;
                case EditKind::replace: break;
                case EditKind::clear: want = 0; break;
            }
            if (static_cast<long>(model.size()) != want) return fail(where + ": wrong item count");
            if ((edit.kind == EditKind::add || edit.kind == EditKind::replace) &&
                model.items[static_cast<std::size_t>(edit.index - 1)] != edit.content)
                return fail(where + ": item not at its index");
            auto reparsed = parse_numbered(render_numbered(model));
            if (!reparsed || *reparsed != model.items) return fail(where + ": numbering not contiguous");
        }
    }
    if (committed == 0 || rejected == 0) return fail("the generator did not exercise both outcomes");
    return pass(std::to_string(committed) + " committed, " + std::to_string(rejected) + " rejected");
}

// ---------------------------------------------------------------- 3

Result sat_oracle() {
    std::mt19937 rng(7);
    int sat_count = 0;
    for (int i = 0; i < kOracleFormulas; ++i) {
        auto [n, clauses] = oracle::random_cnf(rng, 4, 6);
        bool expected = oracle::truth_table_sat(n, clauses);
        for (bool learning : {true, false}) {
            auto r = sat::solve(n, clauses, std::nullopt, {.learning = learning});
            if ((r.verdict == sat::Verdict::sat) != expected || r.verdict == sat::Verdict::timeout)
                return fail("verdict mismatch on formula " + std::to_string(i));
            if (r.verdict == sat::Verdict::sat && !(r.assignment && sat::satisfies(*r.assignment, clauses)))
                return fail("assignment does not verify on formula " + std::to_string(i));
        }
        sat_count += expected;
    }
    return pass(std::to_string(kOracleFormulas) + " formulas (" + std::to_string(sat_count) +
                " sat), both search modes agree with enumeration");
}

// ---------------------------------------------------------------- 4

Result cardinality() {
    int cases = 0;
    for (int n = 1; n <= 5; ++n) {
        std::string names;
        for (int i = 1; i <= n; ++i) names += " x" + std::to_string(i);
        for (int k = 0; k <= n; ++k) {
            for (std::string kw : {"atmost", "atleast", "exactly"}) {
                auto parsed = sat::parse_items({"var" + names, kw + " " + std::to_string(k) + names});
                for (const auto& d : parsed.diagnostics)
                    if (d.severity == Severity::error) return fail(kw + " rejected: " + d.message);
                auto cnf = sat::compile(parsed.items);
                long expected = 0;
                for (int i = 0; i <= n; ++i) {
                    bool in = kw == "atmost" ? i <= k : kw == "atleast" ? i >= k : i == k;
                    if (in) expected += oracle::binomial(n, i);
                }
                long got = oracle::projected_count(cnf.num_base_vars, cnf.num_vars(), cnf.clauses);
                if (got != expected)
                    return fail(kw + " " + std::to_string(k) + " of " + std::to_string(n) + ": " +
                                std::to_string(got) + " != " + std::to_string(expected));
                ++cases;
            }
        }
    }
    return pass(std::to_string(cases) + " (n, k, form) cases exact");
}

// ---------------------------------------------------------------- 5

Result tsp(double& elapsed_out) {
    if (!mzn_exe()) return skip("no MiniZinc executable found");
    auto backend = make_backend(BackendMode::minizinc);
    auto t0 = std::chrono::steady_clock::now();
    auto s = backend->solve(tsp_items(), kTspTimeout);
    elapsed_out = seconds_since(t0);
    if (s.status != SolveStatus::sat) return fail("status " + std::string(to_string(s.status)) + ": " + s.message);
    if (!s.objective || std::fabs(*s.objective - kTspObjective) > kObjectiveTolerance)
        return fail("objective " + (s.objective ? fmt(*s.objective, 3) : std::string("missing")));
    if (s.values.value("_optimal", false) != true) return fail("optimality not proven");
    auto tour = s.values.value("tour", Json::array());
    std::set<int> seen;
    for (const auto& v : tour) seen.insert(v.get<int>());
    if (tour.size() != 9 || seen.size() != 9 || *seen.begin() != 1 || *seen.rbegin() != 9 || tour[0] != 1)
        return fail("tour is not a permutation starting at 1: " + tour.dump());
    return pass("objective 1564, proven optimal, tour " + tour.dump());
}

// ---------------------------------------------------------------- 6

std::string temp_root() {
    const char* t = std::getenv("TMPDIR");
    return (t && *t) ? t : "/tmp";
}

std::set<std::string> sandbox_dirs() {
    std::set<std::string> out;
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(temp_root(), ec))
        if (e.path().filename().string().rfind("mcpsolver-", 0) == 0) out.insert(e.path().string());
    return out;
}

/// Processes that are our children or run inside a sandbox directory.
std::vector<std::string> stray_processes() {
    std::vector<std::string> out;
    std::string prefix = temp_root() + "/mcpsolver-";
    pid_t self = ::getpid();
    for (const auto& e : std::filesystem::directory_iterator("/proc")) {
        std::string name = e.path().filename().string();
        if (name.find_first_not_of("0123456789") != std::string::npos) continue;
        std::error_code ec;
        auto cwd = std::filesystem::read_symlink(e.path() / "cwd", ec).string();
        std::ifstream stat(e.path() / "stat");
        std::string statline;
        std::getline(stat, statline);
        auto close = statline.rfind(')');
        int ppid = 0;
        if (close != std::string::npos) {
            std::istringstream rest(statline.substr(close + 2));
            char state = 0;
            rest >> state >> ppid;
        }
        if (ppid == self || (!cwd.empty() && cwd.rfind(prefix, 0) == 0))
            out.push_back(name + " (" + (ppid == self ? "child" : cwd) + ")");
    }
    return out;
}

std::vector<std::string> pigeonhole_items(int pigeons, int holes) {
    auto name = [](int p, int h) { return "p" + std::to_string(p) + "_" + std::to_string(h); };
    std::string decl = "var";
    for (int p = 0; p < pigeons; ++p)
        for (int h = 0; h < holes; ++h) decl += " " + name(p, h);
    std::vector<std::string> items = {decl};
    for (int p = 0; p < pigeons; ++p) {
        std::string c = "clause";
        for (int h = 0; h < holes; ++h) c += " " + name(p, h);
        items.push_back(c);
    }
    for (int h = 0; h < holes; ++h) {
        std::vector<std::string> col;
        for (int p = 0; p < pigeons; ++p) col.push_back(name(p, h));
        std::string line = "atmost 1";
        for (const auto& v : col) line += " " + v;
        items.push_back(line);
    }
    return items;
}

Result hard_instances() {
    struct Case {
        std::string label;
        BackendMode mode;
        std::vector<std::string> items;
        bool available;
    };
    std::vector<Case> cases = {
        {"sat", BackendMode::sat, pigeonhole_items(14, 13), true},
        {"smt", BackendMode::smt,
         {"(declare-const x Int)", "(declare-const y Int)", "(declare-const z Int)",
          "(assert (= (+ (* x x x) (* y y y) (* z z z)) 33))"},
         smt_exe().has_value()},
        {"minizinc", BackendMode::minizinc,
         {"int: n = 30;", "array[1..n + 1] of var 1..n: x;",
          "constraint forall(i, j in 1..n + 1 where i < j)(x[i] != x[j]);", "solve satisfy;"},
         mzn_exe().has_value()},
    };
    auto dirs_before = sandbox_dirs();
    std::string detail;
    std::vector<std::string> skipped;
    for (const auto& c : cases) {
        if (!c.available) {
            skipped.push_back(c.label);
            continue;
        }
        auto backend = make_backend(c.mode);
        auto t0 = std::chrono::steady_clock::now();
        auto s = backend->solve(c.items, kHardTimeout);
        double took = seconds_since(t0);
        if (s.status != SolveStatus::timeout || !s.success)
            return fail(c.label + ": status " + std::string(to_string(s.status)) + " success " +
                        (s.success ? "true" : "false") + " " + s.message);
        if (took >= kHardReturnBudget) return fail(c.label + ": returned after " + fmt(took) + " s");
        detail += c.label + " " + fmt(took) + " s; ";
    }
    auto strays = stray_processes();
    if (!strays.empty()) return fail("orphan process " + strays.front());
    for (const auto& d : sandbox_dirs())
        if (!dirs_before.count(d)) return fail("sandbox directory left behind: " + d);
    detail += "no orphans";
    if (!skipped.empty()) {
        detail += "; not run (no executable):";
        for (const auto& s : skipped) detail += " " + s;
    }
    return pass(detail);
}

// ---------------------------------------------------------------- 7

Result smt_fixtures() {
    auto exe = smt_exe();
    if (!exe) return skip("no SMT solver executable found");
    auto backend = make_backend(BackendMode::smt);
    auto x5 = backend->solve({"(declare-const x Int)", "(assert (= x 5))"}, 10.0);
    if (x5.status != SolveStatus::sat || x5.values.value("x", Json()) != Json(5))
        return fail("(= x 5): " + to_json(x5).dump());
    auto contra = backend->solve({"(declare-const p Bool)", "(assert (and p (not p)))"}, 10.0);
    if (contra.status != SolveStatus::unsat) return fail("(and p (not p)): " + to_json(contra).dump());
    std::string parity = oracle::read_file(MCP_FIXTURES "/smt/parity.smt2");
    auto ps = backend->solve({parity}, 10.0);
    if (ps.status != SolveStatus::sat) return fail("parity: " + to_json(ps).dump());
    auto parsed = smt::parse_script(parity);
    if (!parsed.diagnostics.empty()) return fail("parity fixture does not parse");
    smt::Value mem = smt::Value::array(smt::Value::bitvector(8, 0));
    mem.array_store(smt::Value::bitvector(3, 5), smt::Value::bitvector(8, 1));
    auto w = smt::check_witness(parsed.commands, {{"R0", smt::Value::bitvector(8, 253)}, {"mem", mem}});
    if (!w.holds() || w.checked == 0) return fail("witness R0=253, mem[5]=1 violates an assertion");
    return pass("x=5 sat, contradiction unsat, parity sat, witness holds on " + std::to_string(w.checked) +
                " ground assertion(s)");
}

// ---------------------------------------------------------------- 8

Result schema_totality() {
    struct Config {
        std::string label;
        BackendMode mode;
        std::optional<std::string> exe;  // nullopt: the mode's real solver or none needed
        bool slow = false;               // hangs until killed
    };
    std::string scripts = MCP_FIXTURES "/scripts/";
    std::vector<Config> configs = {{"sat", BackendMode::sat, std::nullopt}};
    for (auto mode : {BackendMode::minizinc, BackendMode::smt}) {
        std::string m(to_string(mode));
        configs.push_back({m + "/missing", mode, "/nonexistent/solver"});
        configs.push_back({m + "/bad-interpreter", mode, scripts + "bad_interpreter.sh"});
        configs.push_back({m + "/garbage", mode, scripts + "garbage.sh"});
        configs.push_back({m + "/killed", mode, scripts + "killed.sh"});
        configs.push_back({m + "/stderr", mode, scripts + "stderr_exit.sh"});
        configs.push_back({m + "/truncated", mode, scripts + "truncated_model.sh"});
        configs.push_back({m + "/hang", mode, scripts + "hang.sh", true});
    }
    if (smt_exe()) configs.push_back({"smt/real", BackendMode::smt, std::nullopt});

    std::map<BackendMode, std::vector<std::string>> pools = {
        {BackendMode::sat, {"var a b", "clause a b", "clause -a", "atmost 1 a b", "clause q", "nonsense ((", ""}},
        {BackendMode::smt,
         {"(declare-const x Int)", "(assert (> x 2))", "(assert (< x 0))", "(declare-const b (_ BitVec 8))",
          "(assert (= b #x0f))", "(check-sat)", "(get-model)", "(assert (> y 1))", "((("}},
        {BackendMode::minizinc, {"var 1..3: x;", "constraint x > 1;", "solve satisfy;", "garbage", ""}},
    };

    std::mt19937 rng(99);
    std::vector<std::unique_ptr<mcp::Session>> sessions;
    for (const auto& c : configs) {
        BackendOptions o;
        if (c.exe) (c.mode == BackendMode::smt ? o.paths.smt : o.paths.minizinc) = c.exe;
        mcp::SessionConfig cfg;
        sessions.push_back(std::make_unique<mcp::Session>(std::make_unique<Permissive>(make_backend(c.mode, o)), cfg));
        sessions.back()->handle_line(
            R"({"jsonrpc":"2.0","id":0,"method":"initialize","params":{"protocolVersion":"2024-11-05","capabilities":{},"clientInfo":{"name":"fuzz","version":"1"}}})");
        sessions.back()->handle_line(R"({"jsonrpc":"2.0","method":"notifications/initialized"})");
    }

    const auto& fields = solution_field_names();
    std::map<std::string, int> statuses;
    std::map<std::size_t, int> hang_calls;
    for (int call = 0; call < kFuzzCalls; ++call) {
        std::size_t ci = static_cast<std::size_t>(call) % configs.size();
        const auto& c = configs[ci];
        auto& session = *sessions[ci];
        if (c.slow && hang_calls[ci] >= 2) continue;
        const auto& pool = pools[c.mode];
        if (c.slow) {
            // A well-formed model, so the run reaches the hanging child.
            session.call_tool("clear_model", Json::object());
            session.call_tool("add_item", {{"index", 1}, {"content", pool.front()}});
        }
        int edits = c.slow ? 0 : std::uniform_int_distribution<int>(0, 3)(rng);
        for (int e = 0; e < edits; ++e) {
            Json args = {{"index", 1},
                         {"content", pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]}};
            // Edits go over the wire too; malformed ones just earn an error reply.
            Json edit = {{"jsonrpc", "2.0"}, {"id", "edit"}, {"method", "tools/call"},
                         {"params", {{"name", std::bernoulli_distribution(0.2)(rng) ? "clear_model" : "add_item"},
                                     {"arguments", std::bernoulli_distribution(0.2)(rng) ? Json::object() : args}}}};
            session.handle_line(edit.dump());
        }
        double timeout = c.slow ? 0.2 : std::uniform_real_distribution<double>(0.05, 2.0)(rng);
        if (c.slow) ++hang_calls[ci];
        Json req = {{"jsonrpc", "2.0"}, {"id", call + 1}, {"method", "tools/call"},
                    {"params", {{"name", "solve_model"}, {"arguments", {{"timeout", timeout}}}}}};
        auto reply = session.handle_line(req.dump());
        std::string where = c.label + " call " + std::to_string(call);
        if (!reply) return fail(where + ": no reply");
        Json j = Json::parse(*reply, nullptr, false);
        if (j.is_discarded() || !j.contains("result")) return fail(where + ": not a tool result: " + reply->substr(0, 160));
        const auto& res = j["result"];
        if (!res.contains("structuredContent")) return fail(where + ": no structured content");
        const auto& sc = res["structuredContent"];
        std::vector<std::string> keys;
        for (const auto& [k, v] : sc.items()) keys.push_back(k);
        if (keys != fields) return fail(where + ": fields " + Json(keys).dump());
        Solution s;
        try {
            s = solution_from_json(sc);
        } catch (const std::exception& e) {
            return fail(where + ": " + e.what());
        }
        if (auto bad = check_invariants(s)) return fail(where + ": " + *bad);
        if (res.value("isError", false) != !s.success) return fail(where + ": isError does not mirror success");
        Json text = Json::parse(res["content"][0].value("text", ""), nullptr, false);
        if (text != sc) return fail(where + ": text and structured content disagree");
        if (s.solve_time < 0.0 || s.solve_time > timeout + kSolveTimeSlack)
            return fail(where + ": solve_time " + fmt(s.solve_time, 3));
        ++statuses[std::string(to_string(s.status))];
    }
    std::string detail;
    int total = 0;
    for (const auto& [k, v] : statuses) {
        detail += (detail.empty() ? "" : ", ") + k + "=" + std::to_string(v);
        total += v;
    }
    return pass(std::to_string(total) + " responses over " + std::to_string(configs.size()) + " configurations (" +
                detail + ")");
}

// ---------------------------------------------------------------- 9

bool isolated(const std::vector<agent::ChatMessage>& conv) {
    if (conv.size() != 2 || conv[0].role != "system" || conv[1].role != "user") return false;
    for (const auto& m : conv)
        if (!m.tool_calls.empty() || !m.tool_results.empty()) return false;
    return true;
}

Result agent_replay(double& mzn_time) {
    std::string problem = oracle::read_file(MCP_FIXTURES "/tsp/problem.txt");
    Json script = Json::parse(oracle::read_file(MCP_FIXTURES "/tsp/replay.json"));
    bool real = mzn_exe().has_value();
    std::unique_ptr<Backend> backend;
    if (real) {
        backend = std::make_unique<Timed>(make_backend(BackendMode::minizinc), mzn_time);
    } else {
        Solution s;
        s.status = SolveStatus::sat;
        s.satisfiable = true;
        s.success = true;
        s.objective = kTspObjective;
        s.values = {{"tour", {1, 3, 5, 6, 8, 9, 7, 4, 2}}, {"total_distance", 1564}, {"_optimal", true}};
        s.message = "canned";
        backend = std::make_unique<Canned>(s);
    }
    mcp::Session session(std::move(backend));
    agent::InProcessClient client(session);
    client.initialize();
    auto connector = agent::ScriptedConnector::from_json(script);
    auto report = agent::run_with_review(problem, connector, client, agent::kDefaultStepLimit, 0);
    const auto& st = report.stats;
    if (st.clear_count != 1 || st.add_count < 4 || st.solve_count != 1)
        return fail("stats C=" + std::to_string(st.clear_count) + " A=" + std::to_string(st.add_count) +
                    " S=" + std::to_string(st.solve_count));
    if (!report.last.solution) return fail("no solution reached the reviewer");
    if (report.verdict.verdict == agent::Verdict::unknown && report.verdict.explanation == "reviewer unavailable")
        return fail("reviewer was not consulted");
    if (real && (!report.last.solution->objective || *report.last.solution->objective != kTspObjective))
        return fail("replayed solution has the wrong objective");
    const auto& last = connector.received().back();
    auto expected = agent::review_conversation(problem, report.last.transcript.final_model_text, *report.last.solution);
    if (!isolated(last) || last != expected) return fail("reviewer saw more than problem, model and solution");

    Solution timed_out;
    timed_out.status = SolveStatus::timeout;
    timed_out.success = true;
    timed_out.message = "time limit reached";
    agent::ScriptedConnector untouched(std::vector<agent::LlmReply>(1));
    auto v = agent::review(problem, report.last.transcript.final_model_text, timed_out, untouched);
    if (v.verdict != agent::Verdict::unknown || untouched.calls() != 0)
        return fail("timeout solution was sent to the reviewer");
    return pass(std::string("C=1 A=") + std::to_string(st.add_count) + " S=1, verdict " +
                std::string(agent::to_string(report.verdict.verdict)) + ", reviewer isolated, timeout short-circuits" +
                (real ? "" : " (MiniZinc absent: canned backend)"));
}

void report(int n, const std::string& name, const Result& r, double secs, bool& failed) {
    const char* tag = r.outcome == Outcome::pass ? "[PASS]" : r.outcome == Outcome::skip ? "[SKIP]" : "[FAIL]";
    if (r.outcome == Outcome::fail) failed = true;
    std::cout << tag << " " << n << " " << name << ": " << r.detail << " (" << fmt(secs) << " s)" << std::endl;
}

Result guarded(const std::function<Result()>& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        return fail(std::string("exception: ") + e.what());
    }
}

Result within(Result r, double secs, double budget) {
    if (r.outcome == Outcome::pass && secs >= budget)
        return fail(r.detail + "; over the " + fmt(budget, 1) + " s budget");
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc == 3 && std::strcmp(argv[1], "--print-golden") == 0) {
        std::cout << golden_output(oracle::read_file(argv[2]));
        return 0;
    }
    bool failed = false;
    auto timed = [&](int n, const std::string& name, const std::function<Result()>& f, double budget) {
        auto t0 = std::chrono::steady_clock::now();
        Result r = guarded(f);
        double secs = seconds_since(t0);
        report(n, name, budget > 0 ? within(r, secs, budget) : r, secs, failed);
        return secs;
    };

    timed(1, "protocol conformance", protocol_conformance, kProtocolBudget);
    timed(2, "rejection purity", rejection_purity, kPurityBudget);
    timed(3, "SAT oracle equivalence", sat_oracle, kOracleBudget);
    timed(4, "cardinality encoding exactness", cardinality, kCardinalityBudget);
    double tsp_time = 0.0;
    timed(5, "TSP optimum", [&] { return tsp(tsp_time); }, kTspTimeout);
    timed(6, "timeout behaviour", hard_instances, 0);
    timed(7, "SMT fixtures", smt_fixtures, 0);
    timed(8, "solution schema totality", schema_totality, kFuzzBudget);

    double mzn_time = 0.0;
    auto t0 = std::chrono::steady_clock::now();
    Result r9 = guarded([&] { return agent_replay(mzn_time); });
    double secs = seconds_since(t0);
    double own = secs - mzn_time;
    if (r9.outcome == Outcome::pass) {
        r9.detail += "; " + fmt(own, 3) + " s outside MiniZinc";
        if (own >= kReplayBudget) r9 = fail(r9.detail + ", over the " + fmt(kReplayBudget, 1) + " s budget");
    }
    report(9, "scripted agent replay", r9, secs, failed);

    std::cout << (failed ? "acceptance: FAILED" : "acceptance: all criteria passed or skipped") << std::endl;
    return failed ? 1 : 0;
}
