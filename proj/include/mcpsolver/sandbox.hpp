// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcpsolver {

/// Description of one isolated child run.
struct ProcessSpec {
    std::vector<std::string> argv;
    std::optional<std::string> stdin_text;
    double timeout_s = 10.0;
    /// Names of environment variables passed through from the parent.
    /// Everything else is dropped.
    std::vector<std::string> env_allowlist = {"PATH"};
    /// Files written into the throwaway working directory before the spawn;
    /// argv may refer to them by their relative names.
    std::map<std::string, std::string> files;
    std::size_t output_cap = 1u << 20;
};

struct ProcessResult {
    std::optional<int> exit_code;  // absent when the child died from a signal
    std::optional<int> term_signal;
    std::string stdout_text;
    std::string stderr_text;
    double wall_time_s = 0.0;
    bool timed_out = false;
    bool stdout_truncated = false;
    bool stderr_truncated = false;
    /// Process group the child ran in; no member survives the call.
    int process_group = 0;
};

/// The child could not be started at all (missing binary, permissions).
/// Distinct from a timeout or a nonzero exit.
class SpawnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs argv in its own process group with a scrubbed environment and a
/// private temporary working directory. On deadline the whole group gets
/// SIGTERM, then SIGKILL 500 ms later. Every process of the group is gone
/// and the working directory removed when this returns.
/// Throws SpawnError or std::invalid_argument (empty argv, timeout <= 0).
ProcessResult run_isolated(const ProcessSpec& spec);

/// True when at least one process, zombie or not, is still in the group.
bool process_group_alive(int pgid);

/// Resolves an executable: explicit path, then the environment variable,
/// then a PATH search for `program`. Returns nullopt when nothing executable
/// is found.
std::optional<std::string> find_executable(const std::optional<std::string>& explicit_path,
                                           const char* env_var, const std::string& program);

}  // namespace mcpsolver
