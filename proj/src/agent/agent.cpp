// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/agent/agent.hpp"

#include <regex>

namespace mcpsolver::agent {

namespace {

const char* const kVerifyRequest =
    "When the model is solved, verify the solution against the problem statement. If it violates the problem, fix "
    "the model and solve again. Finish with a short answer and no further tool calls.";

const char* const kReviewerSystem =
    "You review the output of a constraint solver. You see only the problem statement, the model that was solved "
    "and the solution. Judge strictly from these three artifacts.";

const char* const kVerdictFormat =
    "Start your reply with CORRECT:, INCORRECT: or UNKNOWN: followed by a brief explanation. Choose UNKNOWN if you "
    "cannot confirm or reject the solution.";

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<Solution> solution_from_outcome(const mcp::ToolOutcome& outcome) {
    try {
        return solution_from_json(outcome.structured);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::correct: return "correct";
        case Verdict::incorrect: return "incorrect";
        case Verdict::unknown: return "unknown";
    }
    return "unknown";
}

UsageStats& UsageStats::operator+=(const UsageStats& o) {
    clear_count += o.clear_count;
    add_count += o.add_count;
    replace_count += o.replace_count;
    delete_count += o.delete_count;
    get_count += o.get_count;
    solve_count += o.solve_count;
    tokens_in += o.tokens_in;
    tokens_out += o.tokens_out;
    return *this;
}

Json to_json(const UsageStats& s) {
    return {{"clear_count", s.clear_count},   {"add_count", s.add_count}, {"replace_count", s.replace_count},
            {"delete_count", s.delete_count}, {"get_count", s.get_count}, {"solve_count", s.solve_count},
            {"tokens_in", s.tokens_in},       {"tokens_out", s.tokens_out}};
}

Json to_json(const ReviewVerdict& v) {
    return {{"verdict", to_string(v.verdict)}, {"explanation", v.explanation}};
}

UsageStats tally_stats(const AgentTranscript& transcript, const TokenUsage& extra) {
    UsageStats s;
    for (const auto& step : transcript.steps) {
        for (const auto& call : step.tool_calls) {
            if (call.name == "clear_model") ++s.clear_count;
            else if (call.name == "add_item") ++s.add_count;
            else if (call.name == "replace_item") ++s.replace_count;
            else if (call.name == "delete_item") ++s.delete_count;
            else if (call.name == "get_model") ++s.get_count;
            else if (call.name == "solve_model") ++s.solve_count;
        }
        s.tokens_in += step.usage.input;
        s.tokens_out += step.usage.output;
    }
    s.tokens_in += extra.input;
    s.tokens_out += extra.output;
    return s;
}

std::string agent_system_prompt(const std::string& instructions) {
    return instructions + "\n" + kVerifyRequest;
}

OneShotResult run_one_shot(const std::string& problem, LlmConnector& connector, McpClient& server, int step_limit) {
    if (step_limit < 1) throw std::invalid_argument("step_limit must be at least 1");
    OneShotResult result;
    const auto tools = server.list_tools();
    std::vector<ChatMessage> conversation = {{"system", agent_system_prompt(server.instructions()), {}, {}},
                                             {"user", problem, {}, {}}};

    for (int i = 0; i < step_limit; ++i) {
        LlmReply reply;
        try {
            reply = connector.send(conversation, tools);
        } catch (const std::exception& e) {
            result.aborted = e.what();
            break;
        }
        AgentStep step;
        step.assistant_text = reply.assistant_text;
        step.tool_calls = reply.tool_calls;
        step.usage = reply.usage;
        conversation.push_back({"assistant", reply.assistant_text, reply.tool_calls, {}});
        if (reply.tool_calls.empty()) {
            result.transcript.steps.push_back(std::move(step));
            break;
        }

        ChatMessage results{"tool", "", {}, {}};
        for (const auto& call : reply.tool_calls) {
            mcp::ToolOutcome outcome;
            try {
                outcome = server.call_tool(call.name, call.arguments);
            } catch (const std::exception& e) {
                outcome.is_error = true;
                outcome.text = std::string("tool call failed: ") + e.what();
            }
            if (call.name == "solve_model")
                if (auto s = solution_from_outcome(outcome)) result.transcript.final_solution = *s;
            results.tool_results.push_back({call.id, call.name, outcome.text, outcome.is_error});
            step.tool_outcomes.push_back(std::move(outcome));
        }
        conversation.push_back(std::move(results));
        result.transcript.steps.push_back(std::move(step));
    }

    try {
        result.transcript.final_model_text = server.call_tool("get_model", Json::object()).text;
    } catch (const std::exception&) {
        result.transcript.final_model_text.clear();
    }
    result.solution = result.transcript.final_solution;
    result.stats = tally_stats(result.transcript);
    return result;
}

std::vector<ChatMessage> review_conversation(const std::string& problem, const std::string& model_text,
                                             const Solution& solution) {
    std::string question;
    if (solution.status == SolveStatus::unsat)
        question =
            "The solver reports that the model has no solution. Check whether all constraints in the encoding are "
            "indeed present in the problem statement, so that the unsatisfiability carries over to the problem.";
    else
        question =
            "Check whether the assignment satisfies all the constraints from the problem statement. We do not check "
            "optimality: judge only whether the solution is valid.";
    std::string user = "Problem statement:\n" + problem + "\n\nModel:\n" + model_text + "\n\nSolution:\n" +
                       to_json(solution).dump(2) + "\n\n" + question + "\n\n" + kVerdictFormat;
    return {{"system", kReviewerSystem, {}, {}}, {"user", std::move(user), {}, {}}};
}

ReviewVerdict parse_verdict(const std::string& reply) {
    static const std::regex re(R"(^\s*(correct|incorrect|unknown)\s*:([\s\S]*)$)", std::regex::icase);
    std::smatch m;
    ReviewVerdict v;
    if (!std::regex_match(reply, m, re)) {
        std::string snippet = trim(reply).substr(0, 80);
        v.explanation = "could not parse reviewer reply" + (snippet.empty() ? std::string() : ": " + snippet);
        return v;
    }
    std::string word = m[1].str();
    for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    v.verdict = word == "correct" ? Verdict::correct : word == "incorrect" ? Verdict::incorrect : Verdict::unknown;
    v.explanation = trim(m[2].str());
    if (v.explanation.empty()) v.explanation = "no explanation given";
    return v;
}

ReviewVerdict review(const std::string& problem, const std::string& model_text, const Solution& solution,
                     LlmConnector& connector) {
    if (solution.status == SolveStatus::timeout) return {Verdict::unknown, "the solver timed out", {}};
    if (solution.status == SolveStatus::error) return {Verdict::unknown, "the solver reported an error", {}};
    LlmReply reply;
    try {
        reply = connector.send(review_conversation(problem, model_text, solution), {});
    } catch (const std::exception&) {
        return {Verdict::unknown, "reviewer unavailable", {}};
    }
    ReviewVerdict v = parse_verdict(reply.assistant_text);
    v.usage = reply.usage;
    return v;
}

RunReport run_with_review(const std::string& problem, LlmConnector& connector, McpClient& server, int step_limit,
                          int retries) {
    if (retries < 0) throw std::invalid_argument("retries must not be negative");
    RunReport report;
    std::string prompt = problem;
    for (int attempt = 0; attempt <= retries; ++attempt) {
        report.last = run_one_shot(prompt, connector, server, step_limit);
        ++report.attempts;
        if (report.last.solution)
            report.verdict = review(problem, report.last.transcript.final_model_text, *report.last.solution, connector);
        else
            report.verdict = {Verdict::unknown, "no solution was produced", {}};
        report.stats += tally_stats(report.last.transcript, report.verdict.usage);
        if (report.verdict.verdict != Verdict::incorrect) break;
        prompt = problem + "\n\nA reviewer rejected the previous attempt: " + report.verdict.explanation +
                 "\nRevise the model and solve again.";
    }
    return report;
}

}  // namespace mcpsolver::agent
