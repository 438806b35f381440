# SPDX-License-Identifier: Apache-2.0
import itertools
import json
import os
import random
import shutil
import subprocess
from pathlib import Path

import jsonschema
import pytest
from referencing import Registry, Resource

import mcp_solver

ROOT = Path(__file__).resolve().parents[2]
SCHEMAS = ROOT / "schemas"
FIXTURES = ROOT / "tests" / "fixtures"


def load_schema(name):
    return json.loads((SCHEMAS / name).read_text())


SOLUTION_SCHEMA = load_schema("solution.schema.json")
REGISTRY = Registry().with_resource("solution.schema.json", Resource.from_contents(SOLUTION_SCHEMA))


def assert_solution(sol):
    jsonschema.validate(sol, SOLUTION_SCHEMA)
    assert tuple(sol) == mcp_solver.SOLUTION_FIELDS
    assert mcp_solver.check_invariants(sol) is None


def initialized(mode):
    s = mcp_solver.Session(mode)
    reply = s.handle(
        {
            "jsonrpc": "2.0",
            "id": 1,
            "method": "initialize",
            "params": {"protocolVersion": "2024-11-05", "capabilities": {}, "clientInfo": {"name": "py", "version": "1"}},
        }
    )
    assert reply["result"]["protocolVersion"] == "2024-11-05"
    assert s.handle({"jsonrpc": "2.0", "method": "notifications/initialized"}) is None
    return s


def test_tools():
    names = [t["name"] for t in mcp_solver.tools()]
    assert names == ["clear_model", "add_item", "replace_item", "delete_item", "get_model", "solve_model"]


def test_session_over_the_wire():
    s = initialized("sat")
    listed = s.handle({"jsonrpc": "2.0", "id": 2, "method": "tools/list"})
    assert len(listed["result"]["tools"]) == 6
    add = s.handle(
        {
            "jsonrpc": "2.0",
            "id": 3,
            "method": "tools/call",
            "params": {"name": "add_item", "arguments": {"index": 1, "content": "var a b\nclause a b\nclause -a"}},
        }
    )
    assert add["result"]["isError"] is False
    solved = s.handle(
        {"jsonrpc": "2.0", "id": 4, "method": "tools/call", "params": {"name": "solve_model", "arguments": {"timeout": 5}}}
    )
    sol = solved["result"]["structuredContent"]
    assert_solution(sol)
    assert sol["values"] == {"a": False, "b": True}
    assert s.version == 1


def test_not_initialized_and_unknown_method():
    s = mcp_solver.Session("sat")
    assert s.handle({"jsonrpc": "2.0", "id": 1, "method": "tools/list"})["error"]["code"] == -32002
    s = initialized("sat")
    assert s.handle({"jsonrpc": "2.0", "id": 2, "method": "nope"})["error"]["code"] == -32601
    assert json.loads(s.handle_line("{oops"))["error"]["code"] == -32700


def test_rejected_edit_keeps_model():
    s = mcp_solver.Session("sat")
    assert not s.call_tool("add_item", {"index": 1, "content": "var x"})["isError"]
    before = (s.items, s.version)
    out = s.call_tool("add_item", {"index": 2, "content": "clause y"})
    assert out["isError"] is True
    assert out["structuredContent"]["ok"] is False
    assert out["structuredContent"]["diagnostics"][0]["line"] == 2
    assert (s.items, s.version) == before


def test_validate_reports_positions():
    ds = mcp_solver.validate("sat", ["var a", "clause a b"])
    assert ds and ds[0]["severity"] == "error" and ds[0]["line"] == 2
    assert mcp_solver.validate("sat", ["var a", "clause a"]) == []


@pytest.mark.parametrize("kind,k,expected", [("atmost", 1, 4), ("atleast", 2, 4), ("exactly", 2, 3)])
def test_cardinality_via_dimacs(kind, k, expected):
    text = mcp_solver.to_dimacs(["var x y z", f"{kind} {k} x y z"])
    header = next(line for line in text.splitlines() if line.startswith("p cnf"))
    nvars = int(header.split()[2])
    clauses = [
        [int(t) for t in line.split()[:-1]] for line in text.splitlines() if line and line[0] not in "pc"
    ]
    count = 0
    for bits in itertools.product([False, True], repeat=3):
        fixed = clauses + [[i + 1] if b else [-(i + 1)] for i, b in enumerate(bits)]
        count += mcp_solver.sat_solve(nvars, fixed) is not None
    assert count == expected


def test_sat_solve_agrees_with_enumeration():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(1, 4)
        cs = [[rng.choice([1, -1]) * rng.randint(1, n) for _ in range(rng.randint(1, 3))] for _ in range(rng.randint(1, 6))]
        brute = any(
            all(any((lit > 0) == bits[abs(lit) - 1] for lit in c) for c in cs)
            for bits in itertools.product([False, True], repeat=n)
        )
        for learning in (True, False):
            model = mcp_solver.sat_solve(n, cs, learning)
            assert (model is not None) == brute
            if model is not None:
                assert all(any((lit > 0) == model[abs(lit) - 1] for lit in c) for c in cs)


def test_solve_shapes_across_modes():
    assert_solution(mcp_solver.solve("sat", ["var a", "clause a", "clause -a"]))
    assert_solution(mcp_solver.solve("minizinc", ["var 1..3: x;", "solve satisfy;"], mzn_exe="/nonexistent"))
    err = mcp_solver.solve("smt", ["(declare-const x Int)"], smt_exe="/nonexistent")
    assert_solution(err)
    assert err["status"] == "error" and err["success"] is False
    garbage = mcp_solver.solve("smt", ["(declare-const x Int)"], 2.0, smt_exe=str(FIXTURES / "scripts" / "garbage.sh"))
    assert_solution(garbage)
    with pytest.raises(ValueError):
        mcp_solver.solve("prolog", [])
    with pytest.raises(ValueError):
        mcp_solver.solve("sat", [], 0)


@pytest.mark.skipif(not (os.environ.get("MCP_SOLVER_SMT") or shutil.which("z3")), reason="no SMT solver executable")
def test_smt_solve():
    sol = mcp_solver.solve("smt", ["(declare-const x Int)", "(assert (= x 5))"])
    assert_solution(sol)
    assert sol["values"] == {"x": 5}


def find_cli():
    for candidate in [os.environ.get("MCP_SOLVER_CLI"), ROOT / "build" / "tools" / "mcp-solver"]:
        if candidate and Path(candidate).is_file():
            return str(candidate)
    return shutil.which("mcp-solver")


@pytest.mark.skipif(find_cli() is None, reason="mcp-solver executable not built")
def test_client_json_matches_schema():
    out = subprocess.run(
        [
            find_cli(),
            "client",
            "--mode",
            "sat",
            "--json",
            "--problem",
            str(FIXTURES / "sat" / "problem.txt"),
            "--script",
            str(FIXTURES / "sat" / "replay.json"),
        ],
        capture_output=True,
        text=True,
        check=True,
        timeout=60,
    )
    report = json.loads(out.stdout)
    validator = jsonschema.Draft202012Validator(load_schema("client_output.schema.json"), registry=REGISTRY)
    validator.validate(report)
    assert report["verdict"]["verdict"] == "correct"
    assert report["stats"]["solve_count"] == 1
