// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/sandbox.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>
#ifdef __linux__
#include <sys/prctl.h>
#endif

#include <array>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

extern char** environ;

namespace mcpsolver {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr auto kTermGrace = std::chrono::milliseconds(500);
constexpr auto kDrainAfterExit = std::chrono::milliseconds(200);

void process_setup_once() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        // Writes to a child's closed stdin must surface as EPIPE, not kill us.
        struct sigaction current {};
        if (sigaction(SIGPIPE, nullptr, &current) == 0 && current.sa_handler == SIG_DFL) signal(SIGPIPE, SIG_IGN);
#ifdef __linux__
        // Orphaned grandchildren are reparented to us so they can be reaped.
        prctl(PR_SET_CHILD_SUBREAPER, 1, 0, 0, 0);
#endif
    });
}

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Fd& operator=(Fd&& o) noexcept {
        if (this != &o) {
            reset();
            fd_ = std::exchange(o.fd_, -1);
        }
        return *this;
    }
    ~Fd() { reset(); }
    int get() const { return fd_; }
    explicit operator bool() const { return fd_ >= 0; }
    void reset() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_ = -1;
};

struct Pipe {
    Fd read;
    Fd write;
};

Pipe make_pipe() {
    std::array<int, 2> fds{};
    if (::pipe2(fds.data(), O_CLOEXEC) != 0) throw SpawnError(std::string("pipe: ") + std::strerror(errno));
    return {Fd(fds[0]), Fd(fds[1])};
}

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

class TempDir {
public:
    TempDir() {
        const char* root = std::getenv("TMPDIR");
        std::string pattern = std::string(root && *root ? root : "/tmp") + "/mcpsolver-XXXXXX";
        std::vector<char> buf(pattern.begin(), pattern.end());
        buf.push_back('\0');
        if (!::mkdtemp(buf.data())) throw SpawnError(std::string("mkdtemp: ") + std::strerror(errno));
        path_ = buf.data();
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

struct Capture {
    std::string text;
    std::size_t cap;
    bool truncated = false;
    bool open = true;
};

// Reads what is available; marks the capture closed on EOF.
void drain(int fd, Capture& c) {
    std::array<char, 65536> buf{};
    for (;;) {
        ssize_t n = ::read(fd, buf.data(), buf.size());
        if (n > 0) {
            std::size_t room = c.cap > c.text.size() ? c.cap - c.text.size() : 0;
            if (static_cast<std::size_t>(n) > room) c.truncated = true;
            c.text.append(buf.data(), std::min<std::size_t>(static_cast<std::size_t>(n), room));
            continue;
        }
        if (n == 0) c.open = false;
        if (n < 0 && errno == EINTR) continue;
        return;
    }
}

void reap_group(pid_t pgid, Clock::time_point until) {
    // Our direct child is already reaped; collect reparented descendants.
    while (process_group_alive(pgid)) {
        ::kill(-pgid, SIGKILL);
        int status = 0;
        pid_t r = ::waitpid(-pgid, &status, WNOHANG);
        if (r < 0 && errno == ECHILD) {
            // Not our children (no subreaper support); nothing more we can do
            // but wait for init to collect them.
            if (Clock::now() >= until) return;
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
            continue;
        }
        if (r == 0) {
            if (Clock::now() >= until) return;
            std::this_thread::sleep_for(std::chrono::milliseconds(2));
        }
    }
}

}  // namespace

bool process_group_alive(int pgid) {
    if (pgid <= 0) return false;
    return ::kill(-pgid, 0) == 0 || errno == EPERM;
}

std::optional<std::string> find_executable(const std::optional<std::string>& explicit_path, const char* env_var,
                                           const std::string& program) {
    auto executable = [](const std::string& p) {
        struct stat st {};
        return !p.empty() && ::stat(p.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(p.c_str(), X_OK) == 0;
    };
    auto search_path = [&](const std::string& name) -> std::optional<std::string> {
        if (name.find('/') != std::string::npos) return executable(name) ? std::optional(name) : std::nullopt;
        const char* path = std::getenv("PATH");
        std::string dirs = path ? path : "/usr/local/bin:/usr/bin:/bin";
        std::size_t start = 0;
        while (start <= dirs.size()) {
            auto end = dirs.find(':', start);
            if (end == std::string::npos) end = dirs.size();
            std::string dir = dirs.substr(start, end - start);
            std::string candidate = (dir.empty() ? "." : dir) + "/" + name;
            if (executable(candidate)) return candidate;
            start = end + 1;
        }
        return std::nullopt;
    };
    if (explicit_path && !explicit_path->empty()) return search_path(*explicit_path);
    if (env_var) {
        if (const char* v = std::getenv(env_var); v && *v) return search_path(v);
    }
    return search_path(program);
}

ProcessResult run_isolated(const ProcessSpec& spec) {
    if (spec.argv.empty()) throw std::invalid_argument("argv must not be empty");
    if (!(spec.timeout_s > 0.0)) throw std::invalid_argument("timeout must be positive");
    process_setup_once();

    TempDir workdir;
    for (const auto& [name, content] : spec.files) {
        fs::path p = workdir.path() / name;
        if (p.lexically_normal().parent_path() != workdir.path().lexically_normal())
            throw std::invalid_argument("sandbox file names must be plain names: " + name);
        std::ofstream(p, std::ios::binary) << content;
    }

    std::vector<std::string> env_strings;
    for (const auto& name : spec.env_allowlist) {
        if (name == "TMPDIR") continue;
        if (const char* v = std::getenv(name.c_str())) env_strings.push_back(name + "=" + v);
    }
    env_strings.push_back("TMPDIR=" + workdir.path().string());
    std::vector<char*> envp;
    for (auto& s : env_strings) envp.push_back(s.data());
    envp.push_back(nullptr);

    std::vector<std::string> argv_copy = spec.argv;
    std::vector<char*> argv;
    for (auto& s : argv_copy) argv.push_back(s.data());
    argv.push_back(nullptr);

    Pipe out = make_pipe();
    Pipe err = make_pipe();
    Pipe in;
    if (spec.stdin_text) in = make_pipe();

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    if (spec.stdin_text)
        posix_spawn_file_actions_adddup2(&actions, in.read.get(), STDIN_FILENO);
    else
        posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
    posix_spawn_file_actions_adddup2(&actions, out.write.get(), STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, err.write.get(), STDERR_FILENO);
    posix_spawn_file_actions_addchdir_np(&actions, workdir.path().c_str());

    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    sigset_t none, all;
    sigemptyset(&none);
    sigfillset(&all);
    posix_spawnattr_setsigmask(&attr, &none);
    posix_spawnattr_setsigdefault(&attr, &all);
    posix_spawnattr_setpgroup(&attr, 0);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP | POSIX_SPAWN_SETSIGMASK | POSIX_SPAWN_SETSIGDEF);

    // PATH lookup happens against the parent's PATH, like a shell would.
    pid_t pid = 0;
    auto start = Clock::now();
    int rc = ::posix_spawnp(&pid, argv[0], &actions, &attr, argv.data(), envp.data());
    posix_spawn_file_actions_destroy(&actions);
    posix_spawnattr_destroy(&attr);
    if (rc != 0) throw SpawnError("cannot start '" + spec.argv[0] + "': " + std::strerror(rc));

    out.write.reset();
    err.write.reset();
    in.read.reset();
    set_nonblocking(out.read.get());
    set_nonblocking(err.read.get());
    if (in.write) set_nonblocking(in.write.get());

    ProcessResult result;
    result.process_group = pid;
    Capture cout_cap{{}, spec.output_cap};
    Capture cerr_cap{{}, spec.output_cap};
    std::string_view pending_in = spec.stdin_text ? std::string_view(*spec.stdin_text) : std::string_view{};
    if (in.write && pending_in.empty()) in.write.reset();

    auto deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(spec.timeout_s));
    std::optional<Clock::time_point> kill_at;      // set once SIGTERM went out
    std::optional<Clock::time_point> drain_until;  // set once the child is reaped
    bool reaped = false;
    int status = 0;

    for (;;) {
        if (!reaped) {
            pid_t r = ::waitpid(pid, &status, WNOHANG);
            if (r == pid) {
                reaped = true;
                // Stragglers holding our pipes open must not outlive the child.
                ::kill(-pid, SIGKILL);
                drain_until = Clock::now() + kDrainAfterExit;
            }
        }
        auto now = Clock::now();
        if (reaped && ((!cout_cap.open && !cerr_cap.open) || now >= *drain_until)) break;
        if (!reaped && !kill_at && now >= deadline) {
            result.timed_out = true;
            ::kill(-pid, SIGTERM);
            kill_at = now + kTermGrace;
        }
        if (!reaped && kill_at && now >= *kill_at) {
            ::kill(-pid, SIGKILL);
            kill_at = Clock::time_point::max();
        }

        std::array<pollfd, 3> fds{};
        nfds_t n = 0;
        if (cout_cap.open) fds[n++] = {out.read.get(), POLLIN, 0};
        if (cerr_cap.open) fds[n++] = {err.read.get(), POLLIN, 0};
        if (in.write) fds[n++] = {in.write.get(), POLLOUT, 0};
        int wait_ms = 20;
        if (!reaped && !kill_at) {
            auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
            wait_ms = static_cast<int>(std::clamp<long long>(left, 0, 20));
        }
        if (n == 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(std::max(wait_ms, 1)));
            continue;
        }
        int pr = ::poll(fds.data(), n, wait_ms);
        if (pr < 0 && errno != EINTR) break;
        for (nfds_t i = 0; i < n && pr > 0; ++i) {
            if (fds[i].revents == 0) continue;
            if (fds[i].fd == out.read.get()) drain(out.read.get(), cout_cap);
            else if (fds[i].fd == err.read.get()) drain(err.read.get(), cerr_cap);
            else if (in.write && fds[i].fd == in.write.get()) {
                if (fds[i].revents & (POLLERR | POLLHUP)) {
                    in.write.reset();
                    continue;
                }
                ssize_t w = ::write(in.write.get(), pending_in.data(), pending_in.size());
                if (w > 0) pending_in.remove_prefix(static_cast<std::size_t>(w));
                if ((w < 0 && errno != EAGAIN && errno != EINTR) || pending_in.empty()) in.write.reset();
            }
        }
    }

    if (!reaped) {
        ::kill(-pid, SIGKILL);
        ::waitpid(pid, &status, 0);
    }
    reap_group(pid, Clock::now() + std::chrono::milliseconds(500));
    result.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();

    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    if (WIFSIGNALED(status)) result.term_signal = WTERMSIG(status);
    if (result.timed_out && result.exit_code && *result.exit_code == 0) result.exit_code.reset();

    result.stdout_text = std::move(cout_cap.text);
    result.stderr_text = std::move(cerr_cap.text);
    result.stdout_truncated = cout_cap.truncated;
    result.stderr_truncated = cerr_cap.truncated;
    if (result.stdout_truncated)
        result.stderr_text += "\n[sandbox: stdout truncated at " + std::to_string(spec.output_cap) + " bytes]";
    if (result.stderr_truncated)
        result.stderr_text += "\n[sandbox: stderr truncated at " + std::to_string(spec.output_cap) + " bytes]";
    return result;
}

}  // namespace mcpsolver
