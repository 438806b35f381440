// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/minizinc.hpp"

#include <chrono>
#include <cmath>
#include <regex>
#include <sstream>

#include "mcpsolver/model_store.hpp"
#include "mcpsolver/sandbox.hpp"

namespace mcpsolver::mzn {

namespace {

const std::vector<std::string> kEnvAllowlist = {"PATH", "HOME", "MZN_SOLVER_PATH", "MZN_STDLIB_DIR"};

constexpr double kHardLimitGraceS = 0.25;
constexpr long kTimeLimitMarginMs = 300;

int count_newlines(std::string_view s, std::size_t end) {
    int n = 0;
    for (std::size_t i = 0; i < end && i < s.size(); ++i) n += s[i] == '\n';
    return n;
}

// 1-based column of byte offset `pos`.
int column_of(std::string_view s, std::size_t pos) {
    auto nl = pos == 0 ? std::string_view::npos : s.rfind('\n', pos - 1);
    return static_cast<int>(nl == std::string_view::npos ? pos + 1 : pos - nl);
}

std::string excerpt(std::string s) {
    if (s.size() > 400) s = s.substr(0, 400) + "...";
    while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
    return s;
}

std::optional<Diagnostic> json_diagnostic(const Json& j) {
    std::string type = j.value("type", "");
    if (type != "error" && type != "warning") return std::nullopt;
    const Json* loc = nullptr;
    if (j.contains("location") && j["location"].is_object())
        loc = &j["location"];
    else if (j.contains("stack") && j["stack"].is_array() && !j["stack"].empty() && j["stack"][0].contains("location"))
        loc = &j["stack"][0]["location"];
    int line = loc ? loc->value("firstLine", 1) : 1;
    int col = loc ? loc->value("firstColumn", 0) : 0;
    std::string msg = j.value("message", "");
    std::string what = j.value("what", "");
    if (!what.empty()) msg = msg.empty() ? what : what + ": " + msg;
    if (msg.empty()) msg = type == "error" ? "model check failed" : "compiler warning";
    return type == "error" ? Diagnostic::error(line, col, msg) : Diagnostic::warning(line, col, msg);
}

}  // namespace

std::string strip_comments_and_strings(std::string_view text) {
    std::string out(text);
    enum { code, line_comment, block_comment, string } st = code;
    for (std::size_t i = 0; i < out.size(); ++i) {
        char c = text[i];
        switch (st) {
            case code:
                if (c == '%') {
                    st = line_comment;
                    out[i] = ' ';
                } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
                    st = block_comment;
                    out[i] = out[i + 1] = ' ';
                    ++i;
                } else if (c == '"') {
                    st = string;  // keep the quotes, blank the contents
                }
                break;
            case line_comment:
                if (c == '\n')
                    st = code;
                else
                    out[i] = ' ';
                break;
            case block_comment:
                if (c == '*' && i + 1 < text.size() && text[i + 1] == '/') {
                    out[i] = out[i + 1] = ' ';
                    ++i;
                    st = code;
                } else if (c != '\n') {
                    out[i] = ' ';
                }
                break;
            case string:
                if (c == '\\' && i + 1 < text.size()) {
                    out[i] = ' ';
                    if (text[i + 1] != '\n') out[i + 1] = ' ';
                    ++i;
                } else if (c == '"') {
                    st = code;
                } else if (c != '\n') {
                    out[i] = ' ';
                }
                break;
        }
    }
    return out;
}

std::vector<Diagnostic> local_checks(const std::vector<std::string>& items) {
    static const std::regex include_re(R"(\binclude\b\s*")");
    std::vector<Diagnostic> out;
    int first_line = 1;
    for (const auto& item : items) {
        std::string code = strip_comments_and_strings(item);
        auto last = code.find_last_not_of(" \t\r\n");
        if (last != std::string::npos && code[last] != ';') {
            out.push_back(Diagnostic::error(first_line + count_newlines(code, last), column_of(code, last),
                                            "item does not end with ';'", "terminate the item with a semicolon"));
        }
        for (std::sregex_iterator it(code.begin(), code.end(), include_re), end; it != end; ++it) {
            auto open = static_cast<std::size_t>(it->position() + it->length() - 1);
            auto close = item.find('"', open + 1);
            std::string name = item.substr(open + 1, close == std::string::npos ? std::string::npos : close - open - 1);
            if (name.find('/') != std::string::npos || name.find('\\') != std::string::npos ||
                name.find("..") != std::string::npos || name.empty()) {
                auto pos = static_cast<std::size_t>(it->position());
                out.push_back(Diagnostic::error(first_line + count_newlines(item, pos), column_of(item, pos),
                                                "include of \"" + name + "\" is not permitted",
                                                "only standard library files such as \"globals.mzn\" may be included"));
            }
        }
        first_line += count_newlines(item, item.size()) + 1;
    }
    if (!items.empty()) {
        std::string code = strip_comments_and_strings(concat_model(items, BackendMode::minizinc));
        static const std::regex solve_re(R"(\bsolve\b)");
        if (!std::regex_search(code, solve_re))
            out.push_back(Diagnostic::warning(first_line - 1, 0, "model has no solve item",
                                              "add 'solve satisfy;' or a minimize/maximize goal before solving"));
    }
    attach_items(out, items);
    return out;
}

bool is_optimization(std::string_view model_text) {
    static const std::regex re(R"(\bsolve\b[^;]*\b(minimize|maximize)\b)");
    std::string code = strip_comments_and_strings(model_text);
    return std::regex_search(code, re);
}

std::vector<Diagnostic> compiler_diagnostics(std::string_view stdout_text, std::string_view stderr_text) {
    std::vector<Diagnostic> out;
    std::istringstream in{std::string(stdout_text)};
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line[0] != '{') continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) continue;
        if (auto d = json_diagnostic(j)) out.push_back(*d);
    }
    if (!out.empty() || stderr_text.empty()) return out;

    // Plain-text fallback: "Error: ..." followed by "file.mzn:L.C".
    static const std::regex loc_re(R"(\.mzn:(\d+)(?:\.(\d+))?)");
    std::string err(stderr_text);
    std::string message;
    std::istringstream lines(err);
    for (std::string line; std::getline(lines, line);)
        if (line.rfind("Error:", 0) == 0 || line.find("rror:") != std::string::npos) {
            message = line;
            break;
        }
    if (message.empty()) {
        // Without an "Error:" marker, take the last non-location line.
        std::istringstream again(err);
        for (std::string line; std::getline(again, line);)
            if (!line.empty() && line.find(".mzn:") == std::string::npos) message = line;
    }
    if (message.empty()) return out;
    std::smatch m;
    int line_no = 1;
    int col = 0;
    if (std::regex_search(err, m, loc_re)) {
        line_no = std::stoi(m[1]);
        if (m[2].matched) col = std::stoi(m[2]);
    }
    out.push_back(Diagnostic::error(line_no, col, message));
    return out;
}

std::vector<Diagnostic> validate_model(const std::vector<std::string>& items, const MznConfig& config) {
    auto diags = local_checks(items);
    if (has_errors(diags) || items.empty()) return diags;
    if (!config.executable) {
        diags.push_back(Diagnostic::error(1, 0, "solver unavailable: MiniZinc executable not found",
                                          "set --mzn-exe or MCP_SOLVER_MZN"));
        return diags;
    }
    ProcessSpec spec;
    spec.argv = {*config.executable, "--model-check-only", "--json-stream", "model.mzn"};
    spec.files["model.mzn"] = concat_model(items, BackendMode::minizinc);
    spec.timeout_s = config.flatten_timeout_s;
    spec.env_allowlist = kEnvAllowlist;
    ProcessResult res;
    try {
        res = run_isolated(spec);
    } catch (const SpawnError& e) {
        diags.push_back(Diagnostic::error(1, 0, std::string("solver unavailable: ") + e.what()));
        return diags;
    }
    if (res.timed_out) {
        std::ostringstream msg;
        msg << "model check did not finish within " << config.flatten_timeout_s << " s";
        diags.push_back(Diagnostic::error(1, 0, msg.str()));
        return diags;
    }
    auto found = compiler_diagnostics(res.stdout_text, res.stderr_text);
    bool any_error = has_errors(found);
    diags.insert(diags.end(), found.begin(), found.end());
    if (!any_error && res.exit_code.value_or(1) != 0) {
        std::string why = res.stderr_text.empty() ? "compiler exited abnormally" : excerpt(res.stderr_text);
        diags.push_back(Diagnostic::error(1, 0, "model check failed: " + why));
    }
    return diags;
}

ParsedRun parse_run(std::string_view raw) {
    ParsedRun r;
    std::istringstream in{std::string(raw)};
    for (std::string line; std::getline(in, line);) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '{') {
            Json j = Json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object()) {
                r.malformed = true;
                continue;
            }
            std::string type = j.value("type", "");
            if (type == "solution") {
                r.saw_solution = true;
                Json values = Json::object();
                const Json& output = j.contains("output") ? j["output"] : Json();
                if (output.is_object() && output.contains("json") && output["json"].is_object()) {
                    values = output["json"];
                } else if (output.is_object()) {
                    for (const char* k : {"dzn", "default", "raw"})
                        if (output.contains(k) && output[k].is_string()) {
                            values["_output"] = output[k];
                            break;
                        }
                }
                if (values.contains("_objective")) {
                    const Json& o = values["_objective"];
                    if (o.is_number()) {
                        r.objective = o.get<double>();
                        r.objective_history.push_back(*r.objective);
                    }
                    values.erase("_objective");
                }
                values.erase("_checker");
                r.assignments = std::move(values);
            } else if (type == "status") {
                r.final_status = j.value("status", "");
                if (r.final_status == "OPTIMAL_SOLUTION") r.proven_optimal = r.search_complete = true;
                if (r.final_status == "ALL_SOLUTIONS") r.search_complete = true;
                if (r.final_status == "UNSATISFIABLE") r.proven_unsat = r.search_complete = true;
                if (r.final_status == "ERROR") r.errors.push_back("solver reported an error");
            } else if (type == "error") {
                std::string what = j.value("what", "");
                std::string msg = j.value("message", "");
                r.errors.push_back(what.empty() ? msg : msg.empty() ? what : what + ": " + msg);
            }
            continue;
        }
        if (line == "==========") {
            r.final_status = "OPTIMAL_SOLUTION";
            r.proven_optimal = r.search_complete = true;
        } else if (line == "=====UNSATISFIABLE=====") {
            r.final_status = "UNSATISFIABLE";
            r.proven_unsat = r.search_complete = true;
        } else if (line == "=====UNKNOWN=====") {
            r.final_status = "UNKNOWN";
        } else if (line == "=====UNBOUNDED=====") {
            r.final_status = "UNBOUNDED";
        } else if (line == "=====UNSATorUNBOUNDED=====") {
            r.final_status = "UNSAT_OR_UNBOUNDED";
        } else if (line == "=====ERROR=====") {
            r.final_status = "ERROR";
            r.errors.push_back("solver reported an error");
        }
    }
    return r;
}

MznOutcome solve_model_text(std::string_view model_text, const MznConfig& config, double timeout_s,
                             double* wall_time_s) {
    MznOutcome out;
    out.kind = MznOutcome::Kind::failed;
    out.is_optimization = is_optimization(model_text);
    if (!config.executable) {
        out.detail = "MiniZinc executable not found (set --mzn-exe or MCP_SOLVER_MZN)";
        return out;
    }
    long limit_ms = std::max(200L, static_cast<long>(timeout_s * 1000.0) - kTimeLimitMarginMs);
    ProcessSpec spec;
    spec.argv = {*config.executable, "--json-stream",    "--output-mode", "json",       "--output-objective",
                 "--solver",         config.solver_tag, "--time-limit",  std::to_string(limit_ms)};
    if (out.is_optimization) spec.argv.push_back("-i");
    spec.argv.push_back("model.mzn");
    spec.files["model.mzn"] = std::string(model_text);
    spec.timeout_s = timeout_s + kHardLimitGraceS;
    spec.env_allowlist = kEnvAllowlist;

    ProcessResult res;
    try {
        res = run_isolated(spec);
        if (wall_time_s) *wall_time_s = res.wall_time_s;
    } catch (const SpawnError& e) {
        out.detail = std::string("could not start MiniZinc: ") + e.what();
        return out;
    }
    ParsedRun run = parse_run(res.stdout_text);
    if (run.proven_unsat) {
        out.kind = MznOutcome::Kind::unsat;
        return out;
    }
    if (run.saw_solution) {
        out.kind = MznOutcome::Kind::solved;
        out.assignments = run.assignments;
        out.objective = run.objective;
        out.proven_optimal = out.is_optimization && run.proven_optimal;
        out.search_complete = run.search_complete;
        return out;
    }
    if (run.final_status == "UNBOUNDED") {
        out.detail = "the objective is unbounded";
        return out;
    }
    if (run.final_status == "UNSAT_OR_UNBOUNDED") {
        out.detail = "the model is unsatisfiable or unbounded";
        return out;
    }
    if (!run.errors.empty()) {
        std::string all;
        for (const auto& e : run.errors) all += (all.empty() ? "" : "; ") + e;
        out.detail = excerpt(all);
        return out;
    }
    if (res.timed_out || run.final_status == "UNKNOWN") {
        out.kind = MznOutcome::Kind::timed_out;
        return out;
    }
    if (run.malformed) {
        out.detail = "unparseable solver output";
        return out;
    }
    if (res.term_signal) {
        out.detail = "MiniZinc killed by signal " + std::to_string(*res.term_signal);
    } else if (res.exit_code.value_or(0) != 0) {
        out.detail = res.stderr_text.empty() ? "MiniZinc exited with code " + std::to_string(*res.exit_code)
                                             : excerpt(res.stderr_text);
    } else {
        out.detail = "solver finished without reporting a result";
    }
    return out;
}

std::vector<Diagnostic> MiniZincBackend::validate(const std::vector<std::string>& items) {
    return validate_model(items, config_);
}

Solution MiniZincBackend::solve(const std::vector<std::string>& items, double timeout_s) {
    auto start = std::chrono::steady_clock::now();
    double child_time = -1.0;
    MznOutcome outcome;
    try {
        outcome = solve_model_text(concat_model(items, BackendMode::minizinc), config_, timeout_s, &child_time);
    } catch (const std::exception& e) {
        outcome = MznOutcome{};
        outcome.detail = e.what();
    }
    double elapsed = child_time >= 0.0
                         ? child_time
                         : std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return normalize(outcome, elapsed, timeout_s);
}

}  // namespace mcpsolver::mzn
