// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mcpsolver/json.hpp"

#include "mcpsolver/diagnostic.hpp"

namespace mcpsolver {

enum class BackendMode { minizinc, sat, smt };

std::string_view to_string(BackendMode mode);
/// Accepts the canonical names plus the legacy aliases pysat and z3.
std::optional<BackendMode> parse_mode(std::string_view name);

enum class SolveStatus { sat, unsat, timeout, error };

std::string_view to_string(SolveStatus status);
std::optional<SolveStatus> parse_status(std::string_view name);

/// The normalized result of a solve_model call, identical in shape for all
/// backends.
struct Solution {
    SolveStatus status = SolveStatus::error;
    bool satisfiable = false;
    Json values = Json::object();
    std::optional<double> objective;
    double solve_time = 0.0;
    bool success = false;
    std::string message;

    bool operator==(const Solution&) const = default;
};

/// Empty when the status/satisfiable/success coupling holds; otherwise a
/// description of the first violated rule.
std::optional<std::string> check_invariants(const Solution& s);

/// The single chokepoint every outgoing Solution passes through. Repairs
/// nothing: a violation is a programming error and throws std::logic_error.
const Solution& enforce_invariants(const Solution& s);

Json to_json(const Solution& s);
/// Throws std::invalid_argument when a field is missing or has the wrong type.
Solution solution_from_json(const Json& j);

/// The seven field names, in wire order.
const std::vector<std::string>& solution_field_names();

// Backend-specific outcomes handed to normalize().

struct MznOutcome {
    enum class Kind { solved, unsat, timed_out, failed } kind = Kind::failed;
    Json assignments = Json::object();
    std::optional<double> objective;
    bool is_optimization = false;
    bool proven_optimal = false;
    bool search_complete = false;
    std::string detail;
};

struct SatOutcome {
    enum class Kind { sat, unsat, timeout, failed } kind = Kind::failed;
    Json assignment = Json::object();  // name -> bool
    long decisions = 0;
    long propagations = 0;
    std::string detail;
};

struct SmtOutcome {
    enum class Kind { sat, unsat, timeout, failed } kind = Kind::failed;
    Json values = Json::object();  // already canonical JSON
    std::vector<std::string> skipped;                  // entries with unrecognized shapes
    std::string detail;
};

using BackendOutcome = std::variant<MznOutcome, SatOutcome, SmtOutcome>;

/// Turns a backend outcome into the common schema. Total: every outcome maps
/// to a Solution satisfying check_invariants().
Solution normalize(const BackendOutcome& outcome, double solve_time_s, double timeout_s);

/// A Solution for failures that happen before any backend ran (spawn errors,
/// missing executables).
Solution execution_error(std::string message, double solve_time_s = 0.0);

// Three-tier containment.

enum class ErrorOrigin { edit_validation, solver_run, transport };
enum class ErrorTierKind { validation, execution, protocol };

std::string_view to_string(ErrorTierKind tier);

struct ErrorTier {
    ErrorTierKind tier = ErrorTierKind::protocol;
    std::vector<Diagnostic> diagnostics;  // validation tier
    std::string message;                  // execution / protocol tiers
    int rpc_code = 0;                     // protocol tier only
};

struct RpcFault {
    int code = -32603;
    std::string message;
};

using ErrorPayload = std::variant<std::vector<Diagnostic>, std::string, RpcFault>;

/// Maps an origin to its tier 1:1. A transport payload given as a bare string
/// becomes an internal error (-32603).
ErrorTier classify_error(ErrorOrigin origin, const ErrorPayload& payload);

}  // namespace mcpsolver
