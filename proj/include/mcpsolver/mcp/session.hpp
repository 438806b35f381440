// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcpsolver/backend.hpp"
#include "mcpsolver/mcp/rpc.hpp"
#include "mcpsolver/model_store.hpp"

namespace mcpsolver::mcp {

inline constexpr std::string_view kProtocolVersion = "2024-11-05";
inline constexpr std::string_view kServerName = "mcp-solver";
inline constexpr std::string_view kServerVersion = "1.0.0";

struct ToolDescriptor {
    std::string name;
    std::string description;
    Json input_schema;

    bool operator==(const ToolDescriptor&) const = default;
};

Json to_json(const ToolDescriptor& tool);
ToolDescriptor tool_from_json(const Json& j);

/// The six editing and solving tools. Identical for every mode.
const std::vector<ToolDescriptor>& tool_descriptors();

/// Result of one tools/call. `is_error` marks a rejected edit or a failed
/// solve; protocol faults never reach this type.
struct ToolOutcome {
    std::string text;
    Json structured = Json::object();
    bool is_error = false;
};

/// {"content": [{"type": "text", "text": ...}], "structuredContent": ..., "isError": ...}
Json to_json(const ToolOutcome& outcome);
ToolOutcome tool_outcome_from_json(const Json& j);

/// Mode-specific usage instructions served through prompts/get.
const std::string& instruction_prompt(BackendMode mode);
inline constexpr std::string_view kPromptName = "instructions";

enum class Phase { uninitialized, initialized, shutdown };

struct SessionConfig {
    double default_timeout_s = 10.0;
    double max_timeout_s = 30.0;
};

/// Thrown by tool handlers for argument errors; becomes a JSON-RPC error.
struct ProtocolFault : std::runtime_error {
    int code;
    ProtocolFault(int c, const std::string& message) : std::runtime_error(message), code(c) {}
};

/// One MCP session bound to a single backend for its whole lifetime.
class Session {
public:
    Session(std::unique_ptr<Backend> backend, SessionConfig config = {});

    /// Answers a request; notifications yield nullopt.
    std::optional<RpcEnvelope> handle(const RpcEnvelope& message);

    /// Decodes one transport line and encodes the reply, if any.
    std::optional<std::string> handle_line(std::string_view line);

    /// Direct tool dispatch, bypassing the phase check. Throws ProtocolFault
    /// for unknown tools or malformed arguments.
    ToolOutcome call_tool(const std::string& name, const Json& arguments);

    Phase phase() const { return phase_; }
    BackendMode mode() const { return mode_; }
    const ModelState& model() const { return model_; }
    const SessionConfig& config() const { return config_; }

    /// Valid only once initialized; throws ProtocolFault otherwise.
    std::vector<ToolDescriptor> describe_tools() const;

private:
    Json initialize_result() const;
    Json prompt_result(const Json& params) const;
    ToolOutcome edit(const EditRequest& request, const std::string& verb);
    ToolOutcome solve(const Json& arguments);

    std::unique_ptr<Backend> backend_;
    const BackendMode mode_;
    SessionConfig config_;
    ModelState model_;
    Phase phase_ = Phase::uninitialized;
};

/// Reads newline-delimited requests from `in` until EOF or shutdown and
/// writes one line per response to `out`. Returns 0.
int run_stdio(Session& session, std::istream& in, std::ostream& out);

}  // namespace mcpsolver::mcp
