// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcpsolver/backend.hpp"
#include "mcpsolver/smt/script.hpp"

namespace mcpsolver::smt {

struct SmtConfig {
    std::optional<std::string> executable;  // resolved path; empty when unavailable
    std::string timeout_option = "-T:{s}";
    std::vector<std::string> extra_args = {"-in"};
    /// Budget for the solver-side type check run during validation.
    double check_timeout_s = 5.0;
};

/// Solver output reduced to what the backend needs.
struct SolverReply {
    enum class Verdict { none, sat, unsat, unknown, timeout } verdict = Verdict::none;
    std::optional<SExpr> model;      // the model list following the last verdict
    std::vector<std::string> errors;  // (error "...") messages
};

SolverReply parse_solver_reply(std::string_view stdout_text);

/// Maps "(error \"line L column C: msg\")" style messages to diagnostics.
std::vector<Diagnostic> solver_errors_to_diagnostics(const std::vector<std::string>& errors);

/// Runs the script through the solver and maps the reply. `wall_time_s`
/// receives the child's wall time when a child ran.
SmtOutcome solve_script(std::string_view model_text, const SmtConfig& config, double timeout_s,
                         double* wall_time_s = nullptr);

class SmtBackend final : public Backend {
public:
    explicit SmtBackend(SmtConfig config) : config_(std::move(config)) {}

    BackendMode mode() const override { return BackendMode::smt; }
    std::vector<Diagnostic> validate(const std::vector<std::string>& items) override;
    Solution solve(const std::vector<std::string>& items, double timeout_s) override;

    const SmtConfig& config() const { return config_; }

private:
    SmtConfig config_;
};

/// Replaces "{s}" (whole seconds, at least 1) and "{ms}" in a timeout flag.
std::string expand_timeout_option(const std::string& pattern, double timeout_s);

}  // namespace mcpsolver::smt
