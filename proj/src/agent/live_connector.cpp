// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <regex>

#include <httplib.h>

#include "mcpsolver/agent/connector.hpp"

namespace mcpsolver::agent {

namespace {

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
}

Json message_to_json(const ChatMessage& m) {
    Json j = {{"role", m.role}, {"content", m.content}};
    if (!m.tool_calls.empty()) {
        Json calls = Json::array();
        for (const auto& c : m.tool_calls)
            calls.push_back({{"id", c.id},
                             {"type", "function"},
                             {"function", {{"name", c.name}, {"arguments", c.arguments.dump()}}}});
        j["tool_calls"] = std::move(calls);
    }
    return j;
}

}  // namespace

LiveConfig LiveConfig::from_environment() {
    LiveConfig c;
    c.url = env_or_empty("MCP_CLIENT_LLM_URL");
    c.api_key = env_or_empty("MCP_CLIENT_LLM_KEY");
    c.model = env_or_empty("MCP_CLIENT_LLM_MODEL");
    if (c.url.empty()) throw ConnectorError("MCP_CLIENT_LLM_URL is not set");
    if (c.model.empty()) throw ConnectorError("MCP_CLIENT_LLM_MODEL is not set");
    return c;
}

Json chat_request_body(const std::string& model, const std::vector<ChatMessage>& conversation,
                       const std::vector<ToolDescriptor>& tools) {
    Json messages = Json::array();
    for (const auto& m : conversation) {
        if (m.role == "tool") {
            // One wire message per result, as the API expects.
            for (const auto& r : m.tool_results)
                messages.push_back({{"role", "tool"}, {"tool_call_id", r.call_id}, {"content", r.content}});
            continue;
        }
        messages.push_back(message_to_json(m));
    }
    Json body = {{"model", model}, {"messages", std::move(messages)}};
    if (!tools.empty()) {
        Json specs = Json::array();
        for (const auto& t : tools)
            specs.push_back({{"type", "function"},
                             {"function", {{"name", t.name}, {"description", t.description}, {"parameters", t.input_schema}}}});
        body["tools"] = std::move(specs);
    }
    return body;
}

LlmReply parse_chat_response(const Json& body) {
    if (!body.is_object()) throw ConnectorError("response is not a JSON object");
    if (body.contains("error")) throw ConnectorError("API error: " + body["error"].dump());
    if (!body.contains("choices") || !body["choices"].is_array() || body["choices"].empty())
        throw ConnectorError("response has no choices");
    const Json& msg = body["choices"][0].value("message", Json::object());
    LlmReply r;
    if (msg.contains("content") && msg["content"].is_string()) r.assistant_text = msg["content"].get<std::string>();
    if (msg.contains("tool_calls") && msg["tool_calls"].is_array()) {
        for (const auto& c : msg["tool_calls"]) {
            ToolCall call;
            call.id = c.value("id", std::string());
            const Json& fn = c.value("function", Json::object());
            call.name = fn.value("name", std::string());
            std::string args = fn.value("arguments", std::string("{}"));
            call.arguments = Json::parse(args, nullptr, false);
            if (call.arguments.is_discarded()) throw ConnectorError("tool call arguments are not JSON: " + args);
            if (call.id.empty()) call.id = "call_" + std::to_string(r.tool_calls.size() + 1);
            r.tool_calls.push_back(std::move(call));
        }
    }
    if (body.contains("usage") && body["usage"].is_object()) {
        r.usage.input = body["usage"].value("prompt_tokens", 0L);
        r.usage.output = body["usage"].value("completion_tokens", 0L);
    }
    return r;
}

LlmReply LiveConnector::send(const std::vector<ChatMessage>& conversation, const std::vector<ToolDescriptor>& tools) {
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(config_.url, m, url_re)) throw ConnectorError("malformed MCP_CLIENT_LLM_URL: " + config_.url);
    std::string path = m[2].matched ? m[2].str() : "/v1/chat/completions";

    httplib::Client client(m[1].str());
    auto secs = static_cast<time_t>(config_.timeout_s);
    client.set_read_timeout(secs, 0);
    client.set_write_timeout(secs, 0);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    std::string body = chat_request_body(config_.model, conversation, tools).dump();
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) throw ConnectorError("HTTP request failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw ConnectorError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 300));
    Json parsed = Json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) throw ConnectorError("response body is not JSON");
    return parse_chat_response(parsed);
}

}  // namespace mcpsolver::agent
