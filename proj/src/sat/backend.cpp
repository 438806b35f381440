// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/sat/backend.hpp"

#include <chrono>
#include <exception>

#include "mcpsolver/sat/cnf.hpp"
#include "mcpsolver/sat/items.hpp"
#include "mcpsolver/sat/solver.hpp"

namespace mcpsolver::sat {

std::vector<Diagnostic> SatBackend::validate(const std::vector<std::string>& items) {
    return parse_items(items).diagnostics;
}

SatOutcome solve_items(const std::vector<std::string>& items, double timeout_s) {
    SatOutcome out;
    auto parsed = parse_items(items);
    if (has_errors(parsed.diagnostics)) {
        out.kind = SatOutcome::Kind::failed;
        out.detail = "model does not parse: " + format(parsed.diagnostics);
        return out;
    }
    CnfFormula cnf = compile(parsed.items);
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(timeout_s));
    SolveResult r = sat::solve(cnf, deadline);
    out.decisions = r.stats.decisions;
    out.propagations = r.stats.propagations;
    switch (r.verdict) {
        case Verdict::sat:
            out.kind = SatOutcome::Kind::sat;
            out.assignment = decode(*r.assignment, cnf);
            break;
        case Verdict::unsat: out.kind = SatOutcome::Kind::unsat; break;
        case Verdict::timeout: out.kind = SatOutcome::Kind::timeout; break;
    }
    return out;
}

Solution SatBackend::solve(const std::vector<std::string>& items, double timeout_s) {
    auto start = std::chrono::steady_clock::now();
    SatOutcome outcome;
    try {
        outcome = solve_items(items, timeout_s);
    } catch (const std::exception& e) {
        outcome.kind = SatOutcome::Kind::failed;
        outcome.detail = e.what();
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return normalize(outcome, elapsed, timeout_s);
}

}  // namespace mcpsolver::sat
