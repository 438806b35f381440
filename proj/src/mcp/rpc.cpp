// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/mcp/rpc.hpp"

#include <stdexcept>

namespace mcpsolver::mcp {

RpcEnvelope RpcEnvelope::request(RpcId id, std::string method, std::optional<Json> params) {
    RpcEnvelope e;
    e.id = std::move(id);
    e.method = std::move(method);
    e.params = std::move(params);
    return e;
}

RpcEnvelope RpcEnvelope::notification(std::string method, std::optional<Json> params) {
    RpcEnvelope e;
    e.method = std::move(method);
    e.params = std::move(params);
    return e;
}

RpcEnvelope RpcEnvelope::response(RpcId id, Json result) {
    RpcEnvelope e;
    e.id = std::move(id);
    e.result = std::move(result);
    return e;
}

RpcEnvelope RpcEnvelope::failure(RpcId id, int code, std::string message, std::optional<Json> data) {
    RpcEnvelope e;
    e.id = std::move(id);
    e.error = RpcError{code, std::move(message), std::move(data)};
    return e;
}

Json id_to_json(const RpcId& id) {
    return std::visit(
        [](const auto& v) -> Json {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::nullptr_t>)
                return nullptr;
            else
                return v;
        },
        id);
}

namespace {

std::optional<RpcId> id_from_json(const Json& j) {
    if (j.is_null()) return RpcId{nullptr};
    if (j.is_number_integer()) return RpcId{j.get<std::int64_t>()};
    if (j.is_string()) return RpcId{j.get<std::string>()};
    return std::nullopt;
}

DecodeError invalid(std::string message, RpcId id = nullptr) {
    return DecodeError{RpcError{rpc_code::invalid_request, std::move(message), std::nullopt}, std::move(id)};
}

}  // namespace

Decoded decode(std::string_view line) {
    Json j = Json::parse(line.begin(), line.end(), nullptr, false);
    if (j.is_discarded()) return DecodeError{RpcError{rpc_code::parse_error, "parse error", std::nullopt}, nullptr};
    if (!j.is_object()) return invalid("invalid request: expected a JSON object");

    RpcEnvelope e;
    if (j.contains("id")) {
        auto id = id_from_json(j["id"]);
        if (!id) return invalid("invalid request: id must be an integer, string or null");
        e.id = *id;
    }
    RpcId reply_id = e.id.value_or(RpcId{nullptr});
    if (j.value("jsonrpc", Json()) != "2.0") return invalid("invalid request: jsonrpc must be \"2.0\"", reply_id);

    if (j.contains("method")) {
        if (!j["method"].is_string()) return invalid("invalid request: method must be a string", reply_id);
        if (j.contains("result") || j.contains("error"))
            return invalid("invalid request: a request cannot carry result or error", reply_id);
        e.method = j["method"].get<std::string>();
        if (j.contains("params")) {
            if (!j["params"].is_object() && !j["params"].is_array())
                return invalid("invalid request: params must be an object or array", reply_id);
            e.params = j["params"];
        }
        if (e.id && std::holds_alternative<std::nullptr_t>(*e.id))
            return invalid("invalid request: request id cannot be null", reply_id);
        return e;
    }

    bool has_result = j.contains("result");
    bool has_error = j.contains("error");
    if (!e.id || has_result == has_error)
        return invalid("invalid request: expected a method, or an id with exactly one of result/error", reply_id);
    if (has_result) {
        e.result = j["result"];
        return e;
    }
    const Json& err = j["error"];
    if (!err.is_object() || !err.contains("code") || !err["code"].is_number_integer() || !err.contains("message") ||
        !err["message"].is_string())
        return invalid("invalid request: malformed error object", reply_id);
    RpcError re{err["code"].get<int>(), err["message"].get<std::string>(), std::nullopt};
    if (err.contains("data")) re.data = err["data"];
    e.error = std::move(re);
    return e;
}

std::string encode(const RpcEnvelope& e) {
    Json j = Json::object();
    j["jsonrpc"] = "2.0";
    if (e.method) {
        if (e.result || e.error) throw std::logic_error("request envelope carries result or error");
        if (e.id) {
            if (std::holds_alternative<std::nullptr_t>(*e.id)) throw std::logic_error("request id cannot be null");
            j["id"] = id_to_json(*e.id);
        }
        j["method"] = *e.method;
        if (e.params) j["params"] = *e.params;
    } else {
        if (!e.id) throw std::logic_error("response envelope without id");
        if (static_cast<bool>(e.result) == static_cast<bool>(e.error))
            throw std::logic_error("response must carry exactly one of result and error");
        if (e.params) throw std::logic_error("response envelope carries params");
        j["id"] = id_to_json(*e.id);
        if (e.result) {
            j["result"] = *e.result;
        } else {
            Json err = {{"code", e.error->code}, {"message", e.error->message}};
            if (e.error->data) err["data"] = *e.error->data;
            j["error"] = std::move(err);
        }
    }
    return j.dump(-1, ' ', false, Json::error_handler_t::replace) + "\n";
}

}  // namespace mcpsolver::mcp
