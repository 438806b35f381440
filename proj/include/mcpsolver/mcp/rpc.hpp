// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "mcpsolver/json.hpp"

namespace mcpsolver::mcp {

namespace rpc_code {
inline constexpr int parse_error = -32700;
inline constexpr int invalid_request = -32600;
inline constexpr int method_not_found = -32601;
inline constexpr int invalid_params = -32602;
inline constexpr int internal_error = -32603;
inline constexpr int not_initialized = -32002;
}  // namespace rpc_code

/// A present id: null (only legal on error responses), integer or string.
using RpcId = std::variant<std::nullptr_t, std::int64_t, std::string>;

struct RpcError {
    int code = rpc_code::internal_error;
    std::string message;
    std::optional<Json> data;

    bool operator==(const RpcError&) const = default;
};

/// One JSON-RPC 2.0 message. Requests carry `method` and `id`,
/// notifications `method` only, responses `id` plus exactly one of
/// `result` / `error`.
struct RpcEnvelope {
    std::optional<RpcId> id;
    std::optional<std::string> method;
    std::optional<Json> params;
    std::optional<Json> result;
    std::optional<RpcError> error;

    bool is_request() const { return method && id; }
    bool is_notification() const { return method && !id; }
    bool is_response() const { return !method; }

    static RpcEnvelope request(RpcId id, std::string method, std::optional<Json> params = std::nullopt);
    static RpcEnvelope notification(std::string method, std::optional<Json> params = std::nullopt);
    static RpcEnvelope response(RpcId id, Json result);
    static RpcEnvelope failure(RpcId id, int code, std::string message, std::optional<Json> data = std::nullopt);

    bool operator==(const RpcEnvelope&) const = default;
};

/// A line that could not be decoded. `id` is the request id when it could
/// be recovered, so the error response can still be correlated.
struct DecodeError {
    RpcError error;
    RpcId id = nullptr;
};

using Decoded = std::variant<RpcEnvelope, DecodeError>;

Decoded decode(std::string_view line);

/// Single-line JSON with a trailing newline. Throws std::logic_error for an
/// envelope that breaks the request/response shape rules.
std::string encode(const RpcEnvelope& envelope);

Json id_to_json(const RpcId& id);

}  // namespace mcpsolver::mcp
