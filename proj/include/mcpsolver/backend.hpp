// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mcpsolver/diagnostic.hpp"
#include "mcpsolver/solution.hpp"

namespace mcpsolver {

/// One solving paradigm behind the item-editing tools. Implementations are
/// stateless between calls; they receive immutable snapshots of the items.
class Backend {
public:
    virtual ~Backend() = default;

    virtual BackendMode mode() const = 0;

    /// Checks the full candidate model. Error-severity findings block the
    /// edit; warnings are reported alongside a committed edit.
    virtual std::vector<Diagnostic> validate(const std::vector<std::string>& items) = 0;

    /// Solves the model; never throws for solver-side failures (those become
    /// status "error").
    virtual Solution solve(const std::vector<std::string>& items, double timeout_s) = 0;
};

struct SolverPaths {
    std::optional<std::string> minizinc;
    std::optional<std::string> smt;
};

struct BackendOptions {
    SolverPaths paths;
    std::string mzn_solver_tag = "gecode";
    double mzn_flatten_timeout_s = 20.0;
    /// Solver flag carrying the soft timeout; "{s}" is replaced by whole
    /// seconds, "{ms}" by milliseconds.
    std::string smt_timeout_option = "-T:{s}";
    std::vector<std::string> smt_extra_args = {"-in"};
};

std::unique_ptr<Backend> make_backend(BackendMode mode, const BackendOptions& options = {});

}  // namespace mcpsolver
