// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>

#include "doctest.h"
#include "mcpsolver/sandbox.hpp"

using namespace mcpsolver;

TEST_CASE("trivial child output is captured") {
    ProcessSpec spec;
    spec.argv = {"echo", "hello"};
    spec.timeout_s = 5;
    auto r = run_isolated(spec);
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text == "hello\n");
    CHECK_FALSE(r.timed_out);
    CHECK(r.wall_time_s >= 0.0);
}

TEST_CASE("stdin is fed and files land in the working directory") {
    ProcessSpec spec;
    spec.argv = {"sh", "-c", "cat input.txt; cat; pwd"};
    spec.files["input.txt"] = "from file\n";
    spec.stdin_text = "from stdin\n";
    auto r = run_isolated(spec);
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text.rfind("from file\nfrom stdin\n", 0) == 0);
    std::string dir = r.stdout_text.substr(std::string("from file\nfrom stdin\n").size());
    dir.pop_back();
    CHECK(dir.find("mcpsolver-") != std::string::npos);
}

TEST_CASE("environment is scrubbed to the allowlist") {
    ::setenv("MCP_SANDBOX_SECRET", "leak", 1);
    ProcessSpec spec;
    spec.argv = {"sh", "-c", "echo \"[$MCP_SANDBOX_SECRET]\"; echo \"[$MCP_SANDBOX_KEEP]\""};
    ::setenv("MCP_SANDBOX_KEEP", "kept", 1);
    spec.env_allowlist = {"PATH", "MCP_SANDBOX_KEEP"};
    auto r = run_isolated(spec);
    CHECK(r.stdout_text == "[]\n[kept]\n");
}

TEST_CASE("timeout kills the whole process group") {
    ProcessSpec spec;
    // The grandchild ignores SIGTERM; only the SIGKILL escalation stops it.
    spec.argv = {"sh", "-c", "(trap '' TERM; sleep 10) & sleep 10"};
    spec.timeout_s = 1.0;
    auto r = run_isolated(spec);
    CHECK(r.timed_out);
    CHECK(r.exit_code != 0);
    CHECK(r.wall_time_s >= 1.0);
    CHECK(r.wall_time_s < 2.0);
    CHECK_FALSE(process_group_alive(r.process_group));
}

TEST_CASE("background descendants do not outlive a normal exit") {
    ProcessSpec spec;
    spec.argv = {"sh", "-c", "sleep 30 & echo started"};
    spec.timeout_s = 5.0;
    auto r = run_isolated(spec);
    CHECK(r.exit_code == 0);
    CHECK(r.wall_time_s < 2.0);
    CHECK_FALSE(process_group_alive(r.process_group));
}

TEST_CASE("missing binaries raise a spawn error") {
    ProcessSpec spec;
    spec.argv = {"/nonexistent"};
    CHECK_THROWS_AS(run_isolated(spec), SpawnError);
    spec.argv = {};
    CHECK_THROWS_AS(run_isolated(spec), std::invalid_argument);
    spec.argv = {"true"};
    spec.timeout_s = 0;
    CHECK_THROWS_AS(run_isolated(spec), std::invalid_argument);
}

TEST_CASE("output is capped and truncation flagged") {
    ProcessSpec spec;
    spec.argv = {"sh", "-c", "head -c 3000000 /dev/zero | tr '\\0' a"};
    spec.output_cap = 1u << 20;
    auto r = run_isolated(spec);
    CHECK(r.stdout_text.size() == (1u << 20));
    CHECK(r.stdout_truncated);
    CHECK(r.stderr_text.find("truncated") != std::string::npos);
}

TEST_CASE("stream order is preserved") {
    ProcessSpec spec;
    spec.argv = {"sh", "-c", "for i in 1 2 3 4 5; do echo out$i; echo err$i >&2; done"};
    auto r = run_isolated(spec);
    CHECK(r.stdout_text == "out1\nout2\nout3\nout4\nout5\n");
    CHECK(r.stderr_text == "err1\nerr2\nerr3\nerr4\nerr5\n");
}

TEST_CASE("signal deaths are reported") {
    ProcessSpec spec;
    spec.argv = {"sh", "-c", "kill -9 $$"};
    auto r = run_isolated(spec);
    CHECK_FALSE(r.exit_code);
    CHECK(r.term_signal == 9);
    CHECK_FALSE(r.timed_out);
}

TEST_CASE("executable discovery order") {
    CHECK(find_executable(std::string("/bin/sh"), nullptr, "nothing-here") == "/bin/sh");
    CHECK_FALSE(find_executable(std::string("/nonexistent/x"), nullptr, "nothing-here-either"));
    ::setenv("MCP_TEST_EXE", "/bin/sh", 1);
    CHECK(find_executable(std::nullopt, "MCP_TEST_EXE", "nothing-here") == "/bin/sh");
    auto viapath = find_executable(std::nullopt, "MCP_TEST_UNSET_VAR", "sh");
    REQUIRE(viapath);
    CHECK(viapath->find("sh") != std::string::npos);
}
