// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <optional>
#include <vector>

#include "mcpsolver/sat/cnf.hpp"

namespace mcpsolver::sat {

enum class Verdict { sat, unsat, timeout };

struct SolveStats {
    long decisions = 0;
    long propagations = 0;
    long conflicts = 0;
    long restarts = 0;
};

struct SolveResult {
    Verdict verdict = Verdict::timeout;
    std::optional<Assignment> assignment;  // sat only; total over all variables
    SolveStats stats;
    /// Clauses learned during the search, when requested.
    std::vector<Clause> learned;
};

struct SolverOptions {
    /// false: plain DPLL with chronological backtracking and no learned
    /// clauses; used to cross-check the CDCL path.
    bool learning = true;
    bool record_learned = false;
    int restart_base = 100;  // conflicts per Luby unit
};

/// Complete CDCL solver: two-watched-literal propagation, first-UIP
/// learning, Luby restarts. Branches on the unassigned variable that
/// occurs in the most input clauses (ties: lowest id), with phase saving.
/// The deadline is polled at every decision and restart.
SolveResult solve(int num_vars, const std::vector<Clause>& clauses,
                  std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt,
                  const SolverOptions& options = {});

inline SolveResult solve(const CnfFormula& cnf,
                         std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt,
                         const SolverOptions& options = {}) {
    return solve(cnf.num_vars(), cnf.clauses, deadline, options);
}

}  // namespace mcpsolver::sat
