// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/agent/connector.hpp"

#include <algorithm>

namespace mcpsolver::agent {

long estimate_tokens(const std::string& text) { return static_cast<long>((text.size() + 3) / 4); }

ScriptedConnector::ScriptedConnector(std::vector<LlmReply> steps, std::optional<std::size_t> fail_at)
    : steps_(std::move(steps)), fail_at_(fail_at) {}

ScriptedConnector ScriptedConnector::from_json(const Json& script, std::optional<std::size_t> fail_at) {
    if (!script.is_array()) throw std::invalid_argument("script must be a JSON array of steps");
    std::vector<LlmReply> steps;
    for (std::size_t i = 0; i < script.size(); ++i) {
        const Json& s = script[i];
        if (!s.is_object()) throw std::invalid_argument("script step " + std::to_string(i + 1) + " is not an object");
        LlmReply r;
        r.assistant_text = s.value("assistant_text", std::string());
        if (s.contains("tool_calls")) {
            if (!s["tool_calls"].is_array())
                throw std::invalid_argument("script step " + std::to_string(i + 1) + ": tool_calls must be an array");
            for (const auto& c : s["tool_calls"]) {
                if (!c.is_object() || !c.contains("name") || !c["name"].is_string())
                    throw std::invalid_argument("script step " + std::to_string(i + 1) + ": tool call without a name");
                ToolCall call;
                call.id = "call_" + std::to_string(i + 1) + "_" + std::to_string(r.tool_calls.size() + 1);
                call.name = c["name"].get<std::string>();
                call.arguments = c.value("arguments", Json::object());
                r.tool_calls.push_back(std::move(call));
            }
        }
        steps.push_back(std::move(r));
    }
    return ScriptedConnector(std::move(steps), fail_at);
}

LlmReply ScriptedConnector::send(const std::vector<ChatMessage>& conversation,
                                 const std::vector<ToolDescriptor>& tools) {
    std::size_t index = calls_++;
    received_.push_back(conversation);
    if (fail_at_ && index == *fail_at_) throw ConnectorError("scripted connector failure at call " + std::to_string(index + 1));

    LlmReply r = index < steps_.size() ? steps_[index] : LlmReply{};
    for (const auto& call : r.tool_calls) {
        bool offered = std::any_of(tools.begin(), tools.end(), [&](const ToolDescriptor& t) { return t.name == call.name; });
        if (!offered) throw ConnectorError("script calls a tool that was not offered: " + call.name);
    }

    long in = 0;
    for (const auto& m : conversation) {
        in += estimate_tokens(m.content);
        for (const auto& tr : m.tool_results) in += estimate_tokens(tr.content);
    }
    long out = estimate_tokens(r.assistant_text);
    for (const auto& c : r.tool_calls) out += estimate_tokens(c.name + c.arguments.dump());
    r.usage = {in, out};
    return r;
}

}  // namespace mcpsolver::agent
