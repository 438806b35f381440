// SPDX-License-Identifier: Apache-2.0
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "mcpsolver/json.hpp"
#include "mcpsolver/sandbox.hpp"

using mcpsolver::Json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string>& args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    Run r;
    r.code = mcpsolver::cli::run(args, MCP_SOLVER_EXE, in, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

const std::string kSatProblem = MCP_FIXTURES "/sat/problem.txt";
const std::string kSatScript = MCP_FIXTURES "/sat/replay.json";

}  // namespace

TEST_CASE("serve exits cleanly on end of input") {
    auto r = cli({"serve", "--mode", "sat"});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
}

TEST_CASE("serve answers over the given streams") {
    std::string init =
        R"({"jsonrpc":"2.0","id":1,"method":"initialize","params":{"protocolVersion":"2024-11-05","capabilities":{},"clientInfo":{"name":"t","version":"1"}}})"
        "\n"
        R"({"jsonrpc":"2.0","id":2,"method":"tools/list"})"
        "\n";
    auto r = cli({"serve", "--mode", "pysat"}, init);
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string first, second;
    std::getline(lines, first);
    std::getline(lines, second);
    CHECK(Json::parse(first)["result"]["protocolVersion"] == "2024-11-05");
    CHECK(Json::parse(second)["result"]["tools"].size() == 6);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"serve"}).code == 2);
    CHECK(cli({"serve", "--mode", "sat", "--mode", "smt"}).code == 2);
    CHECK(cli({"serve", "--mode", "prolog"}).code == 2);
    CHECK(cli({"serve", "--mode", "sat", "--bogus"}).code == 2);
    CHECK(cli({"serve", "--mode", "sat", "--max-timeout", "0"}).code == 2);
    CHECK(cli({"client", "--mode", "sat"}).code == 2);
    CHECK(cli({"client", "--mode", "sat", "--problem", kSatProblem}).code == 2);
    CHECK(cli({"client", "--mode", "sat", "--problem", kSatProblem, "--script", kSatScript, "--live"}).code == 2);
    CHECK(cli({"client", "--mode", "sat", "--problem", "/nonexistent", "--script", kSatScript}).code == 2);
    auto dup = cli({"serve", "--mode", "sat", "--mode", "sat"});
    CHECK(dup.err.find("--mode") != std::string::npos);
}

TEST_CASE("help exits with 0") {
    auto r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("serve") != std::string::npos);
    CHECK(r.out.find("client") != std::string::npos);
}

TEST_CASE("scripted client against a spawned server") {
    auto r = cli({"client", "--mode", "sat", "--problem", kSatProblem, "--script", kSatScript});
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("Status: sat") != std::string::npos);
    CHECK(r.out.find("Verdict: correct - ") != std::string::npos);
    CHECK(r.out.find("Stats: C=1 A=3 R=0 D=0 G=0 S=1 ") != std::string::npos);
}

TEST_CASE("json output") {
    auto r = cli({"client", "--json", "--in-process", "--mode", "sat", "--problem", kSatProblem, "--script",
                  kSatScript});
    REQUIRE(r.code == 0);
    Json j = Json::parse(r.out);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"solution", "verdict", "stats", "steps", "attempts", "model", "aborted"});
    CHECK(j["solution"]["status"] == "sat");
    const auto& v = j["solution"]["values"];
    CHECK_FALSE((v["ann"].get<bool>() && v["cid"].get<bool>()));
    CHECK(v["ann"].get<int>() + v["ben"].get<int>() + v["cid"].get<int>() == 2);
    CHECK(j["verdict"]["verdict"] == "correct");
    CHECK(j["stats"]["add_count"] == 3);
    CHECK(j["attempts"] == 1);
    CHECK(j["aborted"].is_null());
}

TEST_CASE("an incorrect verdict exits with 1") {
    const std::string script = R"([
        {"assistant_text": "model", "tool_calls": [
            {"name": "add_item", "arguments": {"index": 1, "content": "var a"}},
            {"name": "add_item", "arguments": {"index": 2, "content": "clause a"}},
            {"name": "solve_model", "arguments": {"timeout": 2}}]},
        {"assistant_text": "done"},
        {"assistant_text": "INCORRECT: the model ignores the second rule."}
    ])";
    std::string path = "/tmp/mcpsolver-cli-test-" + std::to_string(::getpid()) + ".json";
    {
        std::ofstream f(path);
        f << script;
    }
    auto r = cli({"client", "--in-process", "--mode", "sat", "--problem", kSatProblem, "--script", path});
    std::remove(path.c_str());
    CHECK(r.code == 1);
    CHECK(r.out.find("Verdict: incorrect - the model ignores the second rule.") != std::string::npos);
}

TEST_CASE("flag order does not matter") {
    std::vector<std::vector<std::string>> groups = {
        {"--mode", "sat"}, {"--problem", kSatProblem}, {"--script", kSatScript}, {"--json"}, {"--in-process"},
        {"--max-timeout", "12"}, {"--step-limit", "9"}};
    std::mt19937 rng(3);
    std::string reference;
    for (int i = 0; i < 12; ++i) {
        std::shuffle(groups.begin(), groups.end(), rng);
        std::vector<std::string> args = {"client"};
        for (const auto& g : groups) args.insert(args.end(), g.begin(), g.end());
        auto r = cli(args);
        REQUIRE(r.code == 0);
        Json j = Json::parse(r.out);
        // Wall-clock fields, and the input-token estimate that sees them.
        j["solution"]["solve_time"] = 0;
        j["stats"]["tokens_in"] = 0;
        if (reference.empty()) reference = j.dump();
        CHECK(j.dump() == reference);
    }
}

TEST_CASE("TSP replay in MiniZinc mode") {
    if (!mcpsolver::find_executable(std::nullopt, "MCP_SOLVER_MZN", "minizinc")) {
        MESSAGE("SKIPPED: no MiniZinc executable found");
        return;
    }
    auto r = cli({"client", "--json", "--mode", "minizinc", "--problem", MCP_FIXTURES "/tsp/problem.txt", "--script",
                  MCP_FIXTURES "/tsp/replay.json"});
    INFO(r.err);
    REQUIRE(r.code == 0);
    Json j = Json::parse(r.out);
    CHECK(j["solution"]["objective"] == 1564);
    CHECK(j["solution"]["values"]["_optimal"] == true);
    CHECK(j["stats"]["clear_count"] == 1);
    CHECK(j["stats"]["add_count"] == 4);
    CHECK(j["stats"]["solve_count"] == 1);
    CHECK(j["verdict"]["verdict"] == "correct");
}
