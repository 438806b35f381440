// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcpsolver/agent/client.hpp"
#include "mcpsolver/agent/connector.hpp"
#include "mcpsolver/solution.hpp"

namespace mcpsolver::agent {

struct AgentStep {
    std::string assistant_text;
    std::vector<ToolCall> tool_calls;
    std::vector<mcp::ToolOutcome> tool_outcomes;  // one per call, same order
    TokenUsage usage;
};

struct AgentTranscript {
    std::vector<AgentStep> steps;
    std::optional<Solution> final_solution;
    std::string final_model_text;
};

enum class Verdict { correct, incorrect, unknown };

std::string_view to_string(Verdict v);

struct ReviewVerdict {
    Verdict verdict = Verdict::unknown;
    std::string explanation;
    TokenUsage usage;
};

/// Per-tool call counts (the C/A/R/D/G/S columns) and token totals.
struct UsageStats {
    long clear_count = 0;
    long add_count = 0;
    long replace_count = 0;
    long delete_count = 0;
    long get_count = 0;
    long solve_count = 0;
    long tokens_in = 0;
    long tokens_out = 0;

    long tool_calls() const {
        return clear_count + add_count + replace_count + delete_count + get_count + solve_count;
    }
    UsageStats& operator+=(const UsageStats& o);
    bool operator==(const UsageStats&) const = default;
};

Json to_json(const UsageStats& s);
Json to_json(const ReviewVerdict& v);

/// Counts tool calls by name and sums the token usage of every step plus
/// `extra` (the reviewer call, for instance).
UsageStats tally_stats(const AgentTranscript& transcript, const TokenUsage& extra = {});

struct OneShotResult {
    AgentTranscript transcript;
    std::optional<Solution> solution;
    UsageStats stats;
    /// Set when the connector failed; the transcript is partial.
    std::optional<std::string> aborted;
};

inline constexpr int kDefaultStepLimit = 50;

/// The agent's system prompt: the server's instruction prompt plus the
/// request to verify the solution.
std::string agent_system_prompt(const std::string& instructions);

/// ReAct loop: ask the connector, run its tool calls in order, feed the
/// outcomes back, until it makes no tool call or step_limit is reached.
OneShotResult run_one_shot(const std::string& problem, LlmConnector& connector, McpClient& server,
                           int step_limit = kDefaultStepLimit);

/// The reviewer's entire conversation: a system message and one user
/// message holding the problem, the model and the solution.
std::vector<ChatMessage> review_conversation(const std::string& problem, const std::string& model_text,
                                             const Solution& solution);

/// Reads "CORRECT: ...", "INCORRECT: ..." or "UNKNOWN: ..." (case-insensitive)
/// at the start of the reply; anything else is unknown.
ReviewVerdict parse_verdict(const std::string& reply);

/// Timeouts and errors are unknown without asking the connector; connector
/// failures are unknown with "reviewer unavailable".
ReviewVerdict review(const std::string& problem, const std::string& model_text, const Solution& solution,
                     LlmConnector& connector);

struct RunReport {
    OneShotResult last;
    ReviewVerdict verdict;
    UsageStats stats;  // summed over all attempts, reviewer included
    int attempts = 0;
};

/// run_one_shot plus review; on an incorrect verdict re-runs up to
/// `retries` more times with the reviewer's explanation appended to the
/// problem.
RunReport run_with_review(const std::string& problem, LlmConnector& connector, McpClient& server, int step_limit,
                          int retries);

}  // namespace mcpsolver::agent
