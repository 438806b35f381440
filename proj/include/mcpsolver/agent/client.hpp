// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <sys/types.h>
#include <vector>

#include "mcpsolver/mcp/rpc.hpp"
#include "mcpsolver/mcp/session.hpp"

namespace mcpsolver::agent {

/// MCP client side of the JSON-RPC conversation. Subclasses move encoded
/// lines; this class builds requests and interprets replies.
class McpClient {
public:
    virtual ~McpClient() = default;

    /// initialize followed by notifications/initialized.
    mcp::RpcEnvelope initialize();
    std::vector<mcp::ToolDescriptor> list_tools();
    /// The mode's instruction prompt text.
    std::string instructions();
    /// JSON-RPC errors come back as an error outcome carrying the code.
    mcp::ToolOutcome call_tool(const std::string& name, const Json& arguments);
    void shutdown();

protected:
    /// Sends one encoded line; returns the reply line or "" for notifications.
    virtual std::string exchange(const std::string& line, bool expect_reply) = 0;

private:
    mcp::RpcEnvelope request(const std::string& method, Json params);
    std::int64_t next_id_ = 0;
};

/// Talks to a Session in the same process, through the wire encoding.
class InProcessClient final : public McpClient {
public:
    explicit InProcessClient(mcp::Session& session) : session_(session) {}

protected:
    std::string exchange(const std::string& line, bool expect_reply) override;

private:
    mcp::Session& session_;
};

/// Starts a server process and talks to it over its stdin/stdout.
class SpawnedClient final : public McpClient {
public:
    SpawnedClient(const std::vector<std::string>& argv, double reply_timeout_s = 600.0);
    ~SpawnedClient() override;
    SpawnedClient(const SpawnedClient&) = delete;
    SpawnedClient& operator=(const SpawnedClient&) = delete;

    pid_t pid() const { return pid_; }

protected:
    std::string exchange(const std::string& line, bool expect_reply) override;

private:
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    double reply_timeout_s_;
    std::string buffer_;
};

}  // namespace mcpsolver::agent
