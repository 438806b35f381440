// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/smt/backend.hpp"

#include <chrono>
#include <cmath>
#include <regex>

#include "mcpsolver/model_store.hpp"
#include "mcpsolver/sandbox.hpp"
#include "mcpsolver/smt/value.hpp"

namespace mcpsolver::smt {

namespace {

// Extra wall time granted after the solver's own soft limit.
constexpr double kHardLimitGraceS = 0.25;

std::string unquote(const std::string& s) {
    if (s.size() < 2 || s.front() != '"' || s.back() != '"') return s;
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        out += s[i];
        if (s[i] == '"' && s[i + 1] == '"') ++i;
    }
    return out;
}

bool looks_like_model(const SExpr& e) {
    if (!e.is_list()) return false;
    if (e.is_call("model")) return true;
    for (const auto& c : e.children)
        if (!(c.is_call("define-fun") || c.is_call("declare-fun") || c.is_call("forall") || c.is_call("declare-sort")))
            return false;
    return true;
}

std::string excerpt(const std::string& s) {
    std::string t = s.size() > 400 ? s.substr(0, 400) + "..." : s;
    while (!t.empty() && (t.back() == '\n' || t.back() == ' ')) t.pop_back();
    return t;
}

}  // namespace

std::string expand_timeout_option(const std::string& pattern, double timeout_s) {
    long secs = std::max(1L, static_cast<long>(std::floor(timeout_s)));
    long ms = std::max(1L, static_cast<long>(timeout_s * 1000.0) - 100);
    std::string out = pattern;
    for (auto [key, val] : {std::pair{std::string("{s}"), secs}, std::pair{std::string("{ms}"), ms}}) {
        for (std::size_t p; (p = out.find(key)) != std::string::npos;) out.replace(p, key.size(), std::to_string(val));
    }
    return out;
}

SolverReply parse_solver_reply(std::string_view stdout_text) {
    SolverReply r;
    auto parsed = parse_sexprs(stdout_text);
    for (const auto& f : parsed.forms) {
        if (f.is_atom()) {
            using V = SolverReply::Verdict;
            V v = f.atom == "sat"       ? V::sat
                  : f.atom == "unsat"   ? V::unsat
                  : f.atom == "unknown" ? V::unknown
                  : f.atom == "timeout" ? V::timeout
                                        : V::none;
            if (v != V::none) {
                r.verdict = v;
                r.model.reset();
            }
            continue;
        }
        if (f.is_call("error")) {
            r.errors.push_back(f.children.size() >= 2 ? unquote(f.children[1].atom) : to_string(f));
            continue;
        }
        if (r.verdict == SolverReply::Verdict::sat && !r.model && looks_like_model(f)) r.model = f;
    }
    return r;
}

std::vector<Diagnostic> solver_errors_to_diagnostics(const std::vector<std::string>& errors) {
    static const std::regex z3_style(R"(^line (\d+) column (\d+):\s*(.*)$)");
    static const std::regex dotted(R"(:(\d+)\.(\d+):\s*(.*)$)");
    std::vector<Diagnostic> out;
    for (const auto& e : errors) {
        std::smatch m;
        if (std::regex_search(e, m, z3_style) || std::regex_search(e, m, dotted))
            out.push_back(Diagnostic::error(std::stoi(m[1]), std::stoi(m[2]), m[3].str()));
        else
            out.push_back(Diagnostic::error(1, 0, e));
    }
    return out;
}

SmtOutcome solve_script(std::string_view model_text, const SmtConfig& config, double timeout_s,
                         double* wall_time_s) {
    SmtOutcome out;
    if (!config.executable) {
        out.detail = "SMT solver executable not found (set --smt-exe or MCP_SOLVER_SMT)";
        return out;
    }
    auto parsed = parse_script(model_text);
    if (has_errors(parsed.diagnostics)) {
        out.detail = "model does not parse: " + format(parsed.diagnostics);
        return out;
    }
    ProcessSpec spec;
    spec.argv.push_back(*config.executable);
    spec.argv.insert(spec.argv.end(), config.extra_args.begin(), config.extra_args.end());
    if (!config.timeout_option.empty()) spec.argv.push_back(expand_timeout_option(config.timeout_option, timeout_s));
    spec.stdin_text = solver_script(parsed.commands);
    spec.timeout_s = timeout_s + kHardLimitGraceS;
    spec.env_allowlist = {"PATH", "HOME"};

    ProcessResult res;
    try {
        res = run_isolated(spec);
        if (wall_time_s) *wall_time_s = res.wall_time_s;
    } catch (const SpawnError& e) {
        out.detail = std::string("could not start SMT solver: ") + e.what();
        return out;
    }
    SolverReply reply = parse_solver_reply(res.stdout_text);
    using V = SolverReply::Verdict;
    if (res.timed_out && reply.verdict != V::sat && reply.verdict != V::unsat) {
        out.kind = SmtOutcome::Kind::timeout;
        return out;
    }
    switch (reply.verdict) {
        case V::sat: {
            out.kind = SmtOutcome::Kind::sat;
            if (reply.model) {
                auto names = declared_constants(parsed.commands);
                auto model = parse_model(*reply.model, &names);
                out.values = to_json(model.values);
                out.skipped = model.skipped;
            } else {
                out.skipped.push_back("(model unavailable)");
            }
            return out;
        }
        case V::unsat: out.kind = SmtOutcome::Kind::unsat; return out;
        case V::timeout: out.kind = SmtOutcome::Kind::timeout; return out;
        case V::unknown:
            if (res.wall_time_s >= 0.9 * timeout_s) {
                out.kind = SmtOutcome::Kind::timeout;
            } else {
                out.detail = "solver returned unknown";
            }
            return out;
        case V::none: break;
    }
    if (!reply.errors.empty()) {
        std::string all;
        for (const auto& e : reply.errors) all += (all.empty() ? "" : "; ") + e;
        out.detail = excerpt(all);
    } else if (res.term_signal) {
        out.detail = "solver killed by signal " + std::to_string(*res.term_signal);
    } else if (!res.stderr_text.empty()) {
        out.detail = excerpt(res.stderr_text);
    } else {
        out.detail = "solver produced no verdict (exit code " + std::to_string(res.exit_code.value_or(-1)) + ")";
    }
    return out;
}

std::vector<Diagnostic> SmtBackend::validate(const std::vector<std::string>& items) {
    std::string text = concat_model(items, BackendMode::smt);
    auto diags = validate_script(text);
    if (has_errors(diags) || !config_.executable) return diags;

    // Sort and arity checking by the solver itself, without solving.
    auto parsed = parse_script(text);
    ProcessSpec spec;
    spec.argv.push_back(*config_.executable);
    spec.argv.insert(spec.argv.end(), config_.extra_args.begin(), config_.extra_args.end());
    spec.stdin_text = blank_commands(text, parsed.commands, {"check-sat", "get-model", "get-value", "echo"});
    spec.timeout_s = config_.check_timeout_s;
    spec.env_allowlist = {"PATH", "HOME"};
    try {
        auto res = run_isolated(spec);
        if (res.timed_out) {
            diags.push_back(Diagnostic::warning(1, 0, "solver-side type check timed out; only local checks were run"));
            return diags;
        }
        auto reply = parse_solver_reply(res.stdout_text);
        auto found = solver_errors_to_diagnostics(reply.errors);
        diags.insert(diags.end(), found.begin(), found.end());
    } catch (const SpawnError& e) {
        diags.push_back(Diagnostic::warning(1, 0, std::string("solver-side type check skipped: ") + e.what()));
    }
    return diags;
}

Solution SmtBackend::solve(const std::vector<std::string>& items, double timeout_s) {
    auto start = std::chrono::steady_clock::now();
    double child_time = -1.0;
    SmtOutcome outcome;
    try {
        outcome = solve_script(concat_model(items, BackendMode::smt), config_, timeout_s, &child_time);
    } catch (const std::exception& e) {
        outcome = SmtOutcome{};
        outcome.detail = e.what();
    }
    double elapsed = child_time >= 0.0
                         ? child_time
                         : std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return normalize(outcome, elapsed, timeout_s);
}

}  // namespace mcpsolver::smt
