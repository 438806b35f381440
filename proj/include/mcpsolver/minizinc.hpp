// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcpsolver/backend.hpp"

namespace mcpsolver::mzn {

struct MznConfig {
    std::optional<std::string> executable;  // resolved path; empty when unavailable
    std::string solver_tag = "gecode";
    double flatten_timeout_s = 20.0;
};

/// Model text with comments and string contents replaced by spaces, so that
/// token scans cannot be fooled by either. Newlines and offsets survive.
std::string strip_comments_and_strings(std::string_view text);

/// Checks that need no compiler: item terminators, include safety and the
/// presence of a solve item. Diagnostics use joined-model lines.
std::vector<Diagnostic> local_checks(const std::vector<std::string>& items);

/// True when the solve item is minimize or maximize.
bool is_optimization(std::string_view model_text);

/// Maps the compiler's --json-stream error/warning lines (or its plain-text
/// "file:line.col" fallback) to diagnostics.
std::vector<Diagnostic> compiler_diagnostics(std::string_view stdout_text, std::string_view stderr_text);

/// Full validation: local checks, then the compiler's model check.
std::vector<Diagnostic> validate_model(const std::vector<std::string>& items, const MznConfig& config);

struct ParsedRun {
    bool saw_solution = false;
    Json assignments = Json::object();  // last solution
    std::optional<double> objective;
    std::vector<double> objective_history;
    bool proven_optimal = false;   // OPTIMAL_SOLUTION
    bool search_complete = false;  // OPTIMAL_SOLUTION or ALL_SOLUTIONS
    bool proven_unsat = false;
    std::string final_status;       // last status string seen, if any
    std::vector<std::string> errors;
    bool malformed = false;  // a line looked like JSON but did not parse
};

/// Reads a --json-stream transcript. Also understands the classic text
/// markers ("----------", "==========", "=====UNSATISFIABLE=====").
ParsedRun parse_run(std::string_view raw);

/// `wall_time_s` receives the child's wall time when a child ran.
MznOutcome solve_model_text(std::string_view model_text, const MznConfig& config, double timeout_s,
                             double* wall_time_s = nullptr);

class MiniZincBackend final : public Backend {
public:
    explicit MiniZincBackend(MznConfig config) : config_(std::move(config)) {}

    BackendMode mode() const override { return BackendMode::minizinc; }
    std::vector<Diagnostic> validate(const std::vector<std::string>& items) override;
    Solution solve(const std::vector<std::string>& items, double timeout_s) override;

private:
    MznConfig config_;
};

}  // namespace mcpsolver::mzn
