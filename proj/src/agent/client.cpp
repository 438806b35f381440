// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/agent/client.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

#include "mcpsolver/sandbox.hpp"

extern char** environ;

namespace mcpsolver::agent {

using mcp::RpcEnvelope;

namespace {

RpcEnvelope decode_reply(const std::string& line) {
    auto decoded = mcp::decode(line);
    if (auto* err = std::get_if<mcp::DecodeError>(&decoded))
        throw std::runtime_error("server sent an undecodable reply: " + err->error.message);
    return std::get<RpcEnvelope>(decoded);
}

[[noreturn]] void throw_rpc(const RpcEnvelope& e) {
    throw std::runtime_error("server error " + std::to_string(e.error->code) + ": " + e.error->message);
}

}  // namespace

RpcEnvelope McpClient::request(const std::string& method, Json params) {
    auto id = ++next_id_;
    std::string line = mcp::encode(RpcEnvelope::request(id, method, std::move(params)));
    RpcEnvelope reply = decode_reply(exchange(line, true));
    if (reply.id != mcp::RpcId{id}) throw std::runtime_error("reply id does not match request " + std::to_string(id));
    return reply;
}

RpcEnvelope McpClient::initialize() {
    RpcEnvelope reply = request("initialize", {{"protocolVersion", mcp::kProtocolVersion},
                                               {"capabilities", Json::object()},
                                               {"clientInfo", {{"name", "mcp-solver-client"}, {"version", "1.0.0"}}}});
    if (reply.error) throw_rpc(reply);
    exchange(mcp::encode(RpcEnvelope::notification("notifications/initialized")), false);
    return reply;
}

std::vector<mcp::ToolDescriptor> McpClient::list_tools() {
    RpcEnvelope reply = request("tools/list", Json::object());
    if (reply.error) throw_rpc(reply);
    std::vector<mcp::ToolDescriptor> tools;
    for (const auto& t : reply.result->value("tools", Json::array())) tools.push_back(mcp::tool_from_json(t));
    return tools;
}

std::string McpClient::instructions() {
    RpcEnvelope reply = request("prompts/get", {{"name", mcp::kPromptName}});
    if (reply.error) throw_rpc(reply);
    std::string text;
    for (const auto& m : reply.result->value("messages", Json::array()))
        if (m.contains("content")) text += m["content"].value("text", std::string());
    return text;
}

mcp::ToolOutcome McpClient::call_tool(const std::string& name, const Json& arguments) {
    RpcEnvelope reply = request("tools/call", {{"name", name}, {"arguments", arguments}});
    if (reply.error) {
        mcp::ToolOutcome out;
        out.is_error = true;
        out.text = "protocol error " + std::to_string(reply.error->code) + ": " + reply.error->message;
        out.structured = {{"rpc_error", {{"code", reply.error->code}, {"message", reply.error->message}}}};
        return out;
    }
    return mcp::tool_outcome_from_json(*reply.result);
}

void McpClient::shutdown() {
    RpcEnvelope reply = request("shutdown", Json::object());
    if (reply.error) throw_rpc(reply);
}

std::string InProcessClient::exchange(const std::string& line, bool expect_reply) {
    std::string_view body(line);
    if (!body.empty() && body.back() == '\n') body.remove_suffix(1);
    auto reply = session_.handle_line(body);
    if (expect_reply && !reply) throw std::runtime_error("server sent no reply");
    return reply.value_or(std::string());
}

SpawnedClient::SpawnedClient(const std::vector<std::string>& argv, double reply_timeout_s)
    : reply_timeout_s_(reply_timeout_s) {
    if (argv.empty()) throw std::invalid_argument("empty server command");
    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw SpawnError(std::string("pipe: ") + std::strerror(errno));
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw SpawnError(std::string("pipe: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], 0);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], 1);

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    int rc = ::posix_spawnp(&pid_, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    if (rc != 0) {
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        throw SpawnError("cannot start server " + argv[0] + ": " + std::strerror(rc));
    }
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    std::signal(SIGPIPE, SIG_IGN);
}

SpawnedClient::~SpawnedClient() {
    if (to_child_ >= 0) ::close(to_child_);
    if (from_child_ >= 0) ::close(from_child_);
    if (pid_ <= 0) return;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(2);
    int status = 0;
    while (::waitpid(pid_, &status, WNOHANG) == 0) {
        if (std::chrono::steady_clock::now() > deadline) {
            ::kill(pid_, SIGKILL);
            ::waitpid(pid_, &status, 0);
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
}

std::string SpawnedClient::exchange(const std::string& line, bool expect_reply) {
    std::size_t written = 0;
    while (written < line.size()) {
        ssize_t n = ::write(to_child_, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw std::runtime_error(std::string("server stdin closed: ") + std::strerror(errno));
        }
        written += static_cast<std::size_t>(n);
    }
    if (!expect_reply) return {};

    auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(reply_timeout_s_);
    for (;;) {
        auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string reply = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return reply;
        }
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) throw std::runtime_error("server did not reply in time");
        pollfd pfd{from_child_, POLLIN, 0};
        int pr = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
        if (pr < 0 && errno != EINTR) throw std::runtime_error(std::string("poll: ") + std::strerror(errno));
        if (pr <= 0) continue;
        char chunk[4096];
        ssize_t n = ::read(from_child_, chunk, sizeof chunk);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) throw std::runtime_error("server closed its output");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

}  // namespace mcpsolver::agent
