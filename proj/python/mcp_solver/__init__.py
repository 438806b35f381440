# SPDX-License-Identifier: Apache-2.0
"""Python bindings for the mcp-solver core.

Runs the MCP session, the validation-gated item store and the three
solving backends (MiniZinc, SAT, SMT) in-process.
"""

import json

from . import _core

__all__ = [
    "Session",
    "tools",
    "validate",
    "solve",
    "to_dimacs",
    "sat_solve",
    "check_invariants",
    "SOLUTION_FIELDS",
]

SOLUTION_FIELDS = ("status", "satisfiable", "values", "objective", "solve_time", "success", "message")


class Session:
    """One MCP session bound to a solving mode."""

    def __init__(self, mode, max_timeout=30.0, mzn_exe=None, smt_exe=None, mzn_solver="gecode"):
        self._native = _core.Session(mode, max_timeout, mzn_exe, smt_exe, mzn_solver)

    def handle_line(self, line):
        """Answer one JSON-RPC line. Returns None for notifications."""
        return self._native.handle_line(line)

    def handle(self, message):
        reply = self._native.handle_line(json.dumps(message))
        return None if reply is None else json.loads(reply)

    def call_tool(self, name, arguments=None):
        """Run a tool directly; returns {content, structuredContent, isError}."""
        return json.loads(self._native.call_tool_json(name, json.dumps(arguments or {})))

    @property
    def mode(self):
        return self._native.mode

    @property
    def items(self):
        return list(self._native.items)

    @property
    def version(self):
        return self._native.version


def tools():
    return json.loads(_core.tools_json())


def validate(mode, items, mzn_exe=None, smt_exe=None):
    """Diagnostics for a candidate model; an empty list means it is valid."""
    return json.loads(_core.validate_json(mode, list(items), mzn_exe, smt_exe))


def solve(mode, items, timeout=10.0, mzn_exe=None, smt_exe=None, mzn_solver="gecode"):
    return json.loads(_core.solve_json(mode, list(items), timeout, mzn_exe, smt_exe, mzn_solver))


def to_dimacs(items):
    return _core.to_dimacs(list(items))


def sat_solve(num_vars, clauses, learning=True):
    return _core.sat_solve(num_vars, [list(c) for c in clauses], learning)


def check_invariants(solution):
    """None when the solution dict is well formed, else the first problem."""
    return _core.check_invariants_json(json.dumps(solution))
