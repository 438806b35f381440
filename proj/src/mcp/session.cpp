// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/mcp/session.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace mcpsolver::mcp {

namespace {

Json index_schema(const char* what) {
    return {{"type", "integer"}, {"minimum", 1}, {"description", what}};
}

Json object_schema(Json properties, std::vector<std::string> required) {
    Json j = {{"type", "object"}, {"properties", std::move(properties)}};
    j["required"] = required;
    j["additionalProperties"] = false;
    return j;
}

std::vector<ToolDescriptor> build_tools() {
    Json content = {{"type", "string"}, {"description", "One complete model item"}};
    return {
        {"clear_model", "Reset the solver model, removing all items.", object_schema(Json::object(), {})},
        {"add_item", "Add a new item at a specific index (1-based; n+1 appends). The edit is validated against the "
                     "whole model and rejected with diagnostics if invalid.",
         object_schema({{"index", index_schema("Position of the new item")}, {"content", content}},
                       {"index", "content"})},
        {"replace_item", "Replace an item at a specific index. The edit is validated against the whole model.",
         object_schema({{"index", index_schema("Item to replace")}, {"content", content}}, {"index", "content"})},
        {"delete_item", "Delete an item at a specific index; later items are renumbered.",
         object_schema({{"index", index_schema("Item to delete")}}, {"index"})},
        {"get_model", "View the current model with numbered items.", object_schema(Json::object(), {})},
        {"solve_model", "Solve the model with a specified timeout in seconds.",
         object_schema({{"timeout",
                         {{"type", "number"}, {"exclusiveMinimum", 0}, {"description", "Timeout in seconds"}}}},
                       {"timeout"})},
    };
}

long index_argument(const Json& args) {
    if (!args.contains("index")) throw ProtocolFault(rpc_code::invalid_params, "missing argument: index");
    const Json& v = args["index"];
    if (v.is_number_integer()) return v.get<long>();
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (std::isfinite(d) && std::floor(d) == d && std::abs(d) < 1e15) return static_cast<long>(d);
    }
    throw ProtocolFault(rpc_code::invalid_params, "argument index must be an integer");
}

std::string content_argument(const Json& args) {
    if (!args.contains("content")) throw ProtocolFault(rpc_code::invalid_params, "missing argument: content");
    if (!args["content"].is_string()) throw ProtocolFault(rpc_code::invalid_params, "argument content must be a string");
    return args["content"].get<std::string>();
}

std::string rejection_text(const std::vector<Diagnostic>& diagnostics) {
    return "Edit rejected; the model is unchanged.\n" + format(diagnostics);
}

}  // namespace

Json to_json(const ToolDescriptor& tool) {
    return {{"name", tool.name}, {"description", tool.description}, {"inputSchema", tool.input_schema}};
}

ToolDescriptor tool_from_json(const Json& j) {
    return {j.at("name").get<std::string>(), j.value("description", std::string()),
            j.value("inputSchema", Json::object())};
}

const std::vector<ToolDescriptor>& tool_descriptors() {
    static const std::vector<ToolDescriptor> tools = build_tools();
    return tools;
}

Json to_json(const ToolOutcome& outcome) {
    return {{"content", Json::array({{{"type", "text"}, {"text", outcome.text}}})},
            {"structuredContent", outcome.structured},
            {"isError", outcome.is_error}};
}

ToolOutcome tool_outcome_from_json(const Json& j) {
    ToolOutcome out;
    if (j.contains("content") && j["content"].is_array())
        for (const auto& part : j["content"])
            if (part.value("type", std::string()) == "text") out.text += part.value("text", std::string());
    out.structured = j.value("structuredContent", Json::object());
    out.is_error = j.value("isError", false);
    return out;
}

Session::Session(std::unique_ptr<Backend> backend, SessionConfig config)
    : backend_(std::move(backend)), mode_(backend_->mode()), config_(config) {
    if (!(config_.max_timeout_s > 0)) throw std::invalid_argument("max_timeout_s must be positive");
    if (!(config_.default_timeout_s > 0)) throw std::invalid_argument("default_timeout_s must be positive");
}

std::vector<ToolDescriptor> Session::describe_tools() const {
    if (phase_ != Phase::initialized) throw ProtocolFault(rpc_code::not_initialized, "server not initialized");
    return tool_descriptors();
}

Json Session::initialize_result() const {
    return {{"protocolVersion", kProtocolVersion},
            {"capabilities", {{"tools", {{"listChanged", false}}}, {"prompts", {{"listChanged", false}}}}},
            {"serverInfo", {{"name", kServerName}, {"version", kServerVersion}}},
            {"instructions", "Solver mode: " + std::string(to_string(mode_)) + ". Call prompts/get with name \"" +
                                 std::string(kPromptName) + "\" for detailed instructions."}};
}

Json Session::prompt_result(const Json& params) const {
    std::string name = params.is_object() ? params.value("name", std::string()) : std::string();
    if (name != kPromptName) throw ProtocolFault(rpc_code::invalid_params, "unknown prompt: " + name);
    return {{"description", "How to use the " + std::string(to_string(mode_)) + " solver tools"},
            {"messages", Json::array({{{"role", "user"},
                                       {"content", {{"type", "text"}, {"text", instruction_prompt(mode_)}}}}})}};
}

ToolOutcome Session::edit(const EditRequest& request, const std::string& verb) {
    EditResult result = apply_edit(model_, request, *backend_);
    ToolOutcome out;
    if (auto* rejected = std::get_if<EditRejected>(&result)) {
        out.is_error = true;
        out.text = rejection_text(rejected->diagnostics);
        out.structured = {{"ok", false}, {"version", model_.version}, {"diagnostics", to_json(rejected->diagnostics)}};
        return out;
    }
    const auto& warnings = std::get<EditCommitted>(result).warnings;
    if (request.kind == EditKind::clear) {
        out.text = "Model cleared";
    } else {
        out.text = "Item " + verb + " at index " + std::to_string(request.index) + ".\n\nCurrent model:\n" +
                   render_numbered(model_);
        if (!warnings.empty()) out.text += "\n\nWarnings:\n" + format(warnings);
    }
    out.structured = {{"ok", true},
                      {"version", model_.version},
                      {"item_count", model_.size()},
                      {"warnings", to_json(warnings)}};
    return out;
}

ToolOutcome Session::solve(const Json& arguments) {
    double timeout = config_.default_timeout_s;
    if (arguments.contains("timeout")) {
        const Json& t = arguments["timeout"];
        if (!t.is_number()) throw ProtocolFault(rpc_code::invalid_params, "argument timeout must be a number");
        timeout = t.get<double>();
        if (!(timeout > 0) || !std::isfinite(timeout))
            throw ProtocolFault(rpc_code::invalid_params, "argument timeout must be a positive number of seconds");
    }
    timeout = std::min(timeout, config_.max_timeout_s);

    Solution s;
    try {
        s = backend_->solve(model_.items, timeout);
    } catch (const std::exception& e) {
        s = execution_error(std::string("solver failed: ") + e.what());
    }
    Json j = to_json(enforce_invariants(s));
    ToolOutcome out;
    out.text = j.dump();
    out.structured = std::move(j);
    out.is_error = !s.success;
    return out;
}

ToolOutcome Session::call_tool(const std::string& name, const Json& arguments) {
    const Json args = arguments.is_null() ? Json::object() : arguments;
    if (!args.is_object()) throw ProtocolFault(rpc_code::invalid_params, "tool arguments must be an object");
    if (name == "clear_model") return edit(EditRequest::clear(), "cleared");
    if (name == "add_item") return edit(EditRequest::add(index_argument(args), content_argument(args)), "added");
    if (name == "replace_item")
        return edit(EditRequest::replace(index_argument(args), content_argument(args)), "replaced");
    if (name == "delete_item") return edit(EditRequest::remove(index_argument(args)), "deleted");
    if (name == "get_model") {
        ToolOutcome out;
        out.text = render_numbered(model_);
        out.structured = {{"items", model_.items}, {"version", model_.version}};
        return out;
    }
    if (name == "solve_model") return solve(args);
    throw ProtocolFault(rpc_code::invalid_params, "unknown tool: " + name);
}

std::optional<RpcEnvelope> Session::handle(const RpcEnvelope& message) {
    if (message.is_response()) return std::nullopt;
    const std::string& method = *message.method;
    if (message.is_notification()) return std::nullopt;  // notifications/initialized and friends
    const RpcId& id = *message.id;
    const Json params = message.params.value_or(Json::object());

    try {
        if (method == "ping") return RpcEnvelope::response(id, Json::object());
        if (method == "initialize") {
            if (phase_ != Phase::uninitialized)
                return RpcEnvelope::failure(id, rpc_code::invalid_request, "session already initialized");
            phase_ = Phase::initialized;
            return RpcEnvelope::response(id, initialize_result());
        }
        bool known = method == "tools/list" || method == "tools/call" || method == "prompts/list" ||
                     method == "prompts/get" || method == "shutdown";
        if (!known) return RpcEnvelope::failure(id, rpc_code::method_not_found, "method not found: " + method);
        if (phase_ == Phase::uninitialized)
            return RpcEnvelope::failure(id, rpc_code::not_initialized, "server not initialized");
        if (phase_ == Phase::shutdown)
            return RpcEnvelope::failure(id, rpc_code::invalid_request, "server is shutting down");

        if (method == "shutdown") {
            phase_ = Phase::shutdown;
            return RpcEnvelope::response(id, Json::object());
        }
        if (method == "tools/list") {
            Json tools = Json::array();
            for (const auto& t : describe_tools()) tools.push_back(to_json(t));
            return RpcEnvelope::response(id, {{"tools", tools}});
        }
        if (method == "prompts/list") {
            Json prompt = {{"name", kPromptName},
                           {"description", "Detailed instructions for optimal tool usage in " +
                                               std::string(to_string(mode_)) + " mode"}};
            return RpcEnvelope::response(id, {{"prompts", Json::array({prompt})}});
        }
        if (method == "prompts/get") return RpcEnvelope::response(id, prompt_result(params));

        // tools/call
        if (!params.is_object() || !params.contains("name") || !params["name"].is_string())
            return RpcEnvelope::failure(id, rpc_code::invalid_params, "tools/call requires a tool name");
        ToolOutcome out = call_tool(params["name"].get<std::string>(), params.value("arguments", Json::object()));
        return RpcEnvelope::response(id, to_json(out));
    } catch (const ProtocolFault& f) {
        return RpcEnvelope::failure(id, f.code, f.what());
    } catch (const std::exception& e) {
        return RpcEnvelope::failure(id, rpc_code::internal_error, std::string("internal error: ") + e.what());
    }
}

std::optional<std::string> Session::handle_line(std::string_view line) {
    Decoded decoded = decode(line);
    if (auto* err = std::get_if<DecodeError>(&decoded)) {
        RpcEnvelope reply;
        reply.id = err->id;
        reply.error = err->error;
        return encode(reply);
    }
    auto reply = handle(std::get<RpcEnvelope>(decoded));
    if (!reply) return std::nullopt;
    return encode(*reply);
}

int run_stdio(Session& session, std::istream& in, std::ostream& out) {
    std::string line;
    while (session.phase() != Phase::shutdown && std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (auto reply = session.handle_line(line)) {
            out << *reply;
            out.flush();
        }
    }
    return 0;
}

}  // namespace mcpsolver::mcp
