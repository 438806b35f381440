// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcpsolver/json.hpp"
#include "mcpsolver/mcp/session.hpp"

namespace mcpsolver::agent {

using mcp::ToolDescriptor;

struct ToolCall {
    std::string id;
    std::string name;
    Json arguments = Json::object();

    bool operator==(const ToolCall&) const = default;
};

struct ToolResult {
    std::string call_id;
    std::string name;
    std::string content;
    bool is_error = false;

    bool operator==(const ToolResult&) const = default;
};

/// role is "system", "user", "assistant" or "tool". Assistant messages may
/// carry tool calls; tool messages carry the results of one step.
struct ChatMessage {
    std::string role;
    std::string content;
    std::vector<ToolCall> tool_calls;
    std::vector<ToolResult> tool_results;

    bool operator==(const ChatMessage&) const = default;
};

struct TokenUsage {
    long input = 0;
    long output = 0;

    TokenUsage& operator+=(const TokenUsage& o) {
        input += o.input;
        output += o.output;
        return *this;
    }
    bool operator==(const TokenUsage&) const = default;
};

struct LlmReply {
    std::string assistant_text;
    std::vector<ToolCall> tool_calls;
    TokenUsage usage;
};

/// Transport or protocol failure talking to the model.
struct ConnectorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class LlmConnector {
public:
    virtual ~LlmConnector() = default;
    virtual LlmReply send(const std::vector<ChatMessage>& conversation, const std::vector<ToolDescriptor>& tools) = 0;
};

/// Replays a fixed list of replies, one per send(). Once the list is used
/// up every reply is empty text with no tool calls. Token usage is
/// estimated at four characters per token.
class ScriptedConnector final : public LlmConnector {
public:
    explicit ScriptedConnector(std::vector<LlmReply> steps, std::optional<std::size_t> fail_at = std::nullopt);

    /// Script file shape: [{"assistant_text": "...", "tool_calls": [{"name": ..., "arguments": {...}}]}, ...]
    static ScriptedConnector from_json(const Json& script, std::optional<std::size_t> fail_at = std::nullopt);

    LlmReply send(const std::vector<ChatMessage>& conversation, const std::vector<ToolDescriptor>& tools) override;

    std::size_t calls() const { return calls_; }
    /// Every conversation passed to send(), in order.
    const std::vector<std::vector<ChatMessage>>& received() const { return received_; }

private:
    std::vector<LlmReply> steps_;
    std::optional<std::size_t> fail_at_;
    std::size_t calls_ = 0;
    std::vector<std::vector<ChatMessage>> received_;
};

long estimate_tokens(const std::string& text);

struct LiveConfig {
    std::string url;  // full chat-completions endpoint
    std::string api_key;
    std::string model;
    double timeout_s = 120.0;

    /// From MCP_CLIENT_LLM_URL, MCP_CLIENT_LLM_KEY and MCP_CLIENT_LLM_MODEL.
    /// Throws ConnectorError when the URL or model is unset.
    static LiveConfig from_environment();
};

/// Chat-completions style HTTP JSON API with function-calling tools.
class LiveConnector final : public LlmConnector {
public:
    explicit LiveConnector(LiveConfig config) : config_(std::move(config)) {}
    LlmReply send(const std::vector<ChatMessage>& conversation, const std::vector<ToolDescriptor>& tools) override;

private:
    LiveConfig config_;
};

/// Request body for one chat-completions call.
Json chat_request_body(const std::string& model, const std::vector<ChatMessage>& conversation,
                       const std::vector<ToolDescriptor>& tools);
/// Parses a chat-completions response body. Throws ConnectorError.
LlmReply parse_chat_response(const Json& body);

}  // namespace mcpsolver::agent
