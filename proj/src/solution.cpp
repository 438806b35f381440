// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/solution.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mcpsolver {

std::string_view to_string(BackendMode mode) {
    switch (mode) {
        case BackendMode::minizinc: return "minizinc";
        case BackendMode::sat: return "sat";
        case BackendMode::smt: return "smt";
    }
    return "unknown";
}

std::optional<BackendMode> parse_mode(std::string_view name) {
    if (name == "minizinc" || name == "mzn") return BackendMode::minizinc;
    if (name == "sat" || name == "pysat") return BackendMode::sat;
    if (name == "smt" || name == "z3") return BackendMode::smt;
    return std::nullopt;
}

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::sat: return "sat";
        case SolveStatus::unsat: return "unsat";
        case SolveStatus::timeout: return "timeout";
        case SolveStatus::error: return "error";
    }
    return "error";
}

std::optional<SolveStatus> parse_status(std::string_view name) {
    for (auto s : {SolveStatus::sat, SolveStatus::unsat, SolveStatus::timeout, SolveStatus::error})
        if (to_string(s) == name) return s;
    return std::nullopt;
}

std::optional<std::string> check_invariants(const Solution& s) {
    if ((s.status == SolveStatus::sat) != s.satisfiable)
        return "status sat must coincide with satisfiable=true";
    if (!s.success && s.status != SolveStatus::error) return "success=false requires status error";
    if (s.status == SolveStatus::error && s.success) return "status error requires success=false";
    if (!(s.solve_time >= 0.0) || !std::isfinite(s.solve_time)) return "solve_time must be a non-negative number";
    if (s.objective && !std::isfinite(*s.objective)) return "objective must be finite";
    if (!s.values.is_object()) return "values must be an object";
    if (s.message.empty()) return "message must not be empty";
    return std::nullopt;
}

const Solution& enforce_invariants(const Solution& s) {
    if (auto violation = check_invariants(s)) throw std::logic_error("solution invariant violated: " + *violation);
    return s;
}

const std::vector<std::string>& solution_field_names() {
    static const std::vector<std::string> names = {"status",     "satisfiable", "values", "objective",
                                                   "solve_time", "success",     "message"};
    return names;
}

Json to_json(const Solution& s) {
    enforce_invariants(s);
    Json j;
    j["status"] = to_string(s.status);
    j["satisfiable"] = s.satisfiable;
    j["values"] = s.values;
    if (s.objective) {
        double o = *s.objective;
        if (std::floor(o) == o && std::abs(o) < 9.0e15)
            j["objective"] = static_cast<long long>(o);
        else
            j["objective"] = o;
    } else {
        j["objective"] = nullptr;
    }
    j["solve_time"] = s.solve_time;
    j["success"] = s.success;
    j["message"] = s.message;
    return j;
}

Solution solution_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("solution must be an object");
    for (const auto& name : solution_field_names())
        if (!j.contains(name)) throw std::invalid_argument("solution is missing field '" + name + "'");
    Solution s;
    auto status = j.at("status").is_string() ? parse_status(j.at("status").get<std::string>()) : std::nullopt;
    if (!status) throw std::invalid_argument("solution status is not one of sat/unsat/timeout/error");
    s.status = *status;
    if (!j.at("satisfiable").is_boolean() || !j.at("success").is_boolean())
        throw std::invalid_argument("satisfiable and success must be booleans");
    s.satisfiable = j.at("satisfiable").get<bool>();
    s.success = j.at("success").get<bool>();
    if (!j.at("values").is_object()) throw std::invalid_argument("values must be an object");
    s.values = j.at("values");
    if (!j.at("objective").is_null()) {
        if (!j.at("objective").is_number()) throw std::invalid_argument("objective must be a number or null");
        s.objective = j.at("objective").get<double>();
    }
    if (!j.at("solve_time").is_number()) throw std::invalid_argument("solve_time must be a number");
    s.solve_time = j.at("solve_time").get<double>();
    if (!j.at("message").is_string()) throw std::invalid_argument("message must be a string");
    s.message = j.at("message").get<std::string>();
    return s;
}

namespace {

std::string seconds(double t) {
    std::ostringstream os;
    os << t;
    return os.str();
}

std::string number(double v) {
    std::ostringstream os;
    if (std::floor(v) == v && std::abs(v) < 9.0e15)
        os << static_cast<long long>(v);
    else
        os << v;
    return os.str();
}

Solution make(SolveStatus status, std::string message) {
    Solution s;
    s.status = status;
    s.satisfiable = status == SolveStatus::sat;
    s.success = status != SolveStatus::error;
    s.message = std::move(message);
    return s;
}

Solution from_mzn(const MznOutcome& o, double timeout_s) {
    switch (o.kind) {
        case MznOutcome::Kind::solved: {
            std::string msg;
            if (o.is_optimization && o.proven_optimal)
                msg = "Optimal solution found";
            else if (o.is_optimization)
                msg = "Solution found; optimality not proven within the time limit";
            else
                msg = "Satisfying assignment found";
            if (o.objective) msg += " (objective " + number(*o.objective) + ")";
            msg += ".";
            auto s = make(SolveStatus::sat, msg);
            s.values = o.assignments.is_object() ? o.assignments : Json::object();
            if (o.is_optimization) {
                s.objective = o.objective;
                s.values["_optimal"] = o.proven_optimal;
            }
            return s;
        }
        case MznOutcome::Kind::unsat: return make(SolveStatus::unsat, "The model is unsatisfiable.");
        case MznOutcome::Kind::timed_out:
            return make(SolveStatus::timeout, "No solution found within the time limit of " + seconds(timeout_s) + " s.");
        case MznOutcome::Kind::failed: break;
    }
    return make(SolveStatus::error, o.detail.empty() ? "MiniZinc run failed." : "MiniZinc run failed: " + o.detail);
}

Solution from_sat(const SatOutcome& o, double timeout_s) {
    switch (o.kind) {
        case SatOutcome::Kind::sat: {
            auto s = make(SolveStatus::sat, "Satisfying assignment found (" + std::to_string(o.decisions) +
                                                " decisions, " + std::to_string(o.propagations) + " propagations).");
            s.values = o.assignment.is_object() ? o.assignment : Json::object();
            return s;
        }
        case SatOutcome::Kind::unsat: return make(SolveStatus::unsat, "The formula is unsatisfiable.");
        case SatOutcome::Kind::timeout:
            return make(SolveStatus::timeout, "No result within the time limit of " + seconds(timeout_s) + " s.");
        case SatOutcome::Kind::failed: break;
    }
    return make(SolveStatus::error, o.detail.empty() ? "SAT solving failed." : "SAT solving failed: " + o.detail);
}

Solution from_smt(const SmtOutcome& o, double timeout_s) {
    switch (o.kind) {
        case SmtOutcome::Kind::sat: {
            std::string msg = "Satisfying model found";
            if (!o.skipped.empty()) {
                msg += "; values not extracted for:";
                for (const auto& name : o.skipped) msg += " " + name;
            }
            msg += ".";
            auto s = make(SolveStatus::sat, msg);
            s.values = o.values.is_object() ? o.values : Json::object();
            return s;
        }
        case SmtOutcome::Kind::unsat: return make(SolveStatus::unsat, "The assertions are unsatisfiable.");
        case SmtOutcome::Kind::timeout:
            return make(SolveStatus::timeout, "No verdict within the time limit of " + seconds(timeout_s) + " s.");
        case SmtOutcome::Kind::failed: break;
    }
    return make(SolveStatus::error, o.detail.empty() ? "SMT solving failed." : "SMT solving failed: " + o.detail);
}

}  // namespace

Solution normalize(const BackendOutcome& outcome, double solve_time_s, double timeout_s) {
    Solution s = std::visit(
        [&](const auto& o) -> Solution {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, MznOutcome>)
                return from_mzn(o, timeout_s);
            else if constexpr (std::is_same_v<T, SatOutcome>)
                return from_sat(o, timeout_s);
            else
                return from_smt(o, timeout_s);
        },
        outcome);
    s.solve_time = std::isfinite(solve_time_s) && solve_time_s > 0.0 ? solve_time_s : 0.0;
    enforce_invariants(s);
    return s;
}

Solution execution_error(std::string message, double solve_time_s) {
    auto s = make(SolveStatus::error, message.empty() ? "Solver execution failed." : std::move(message));
    s.solve_time = std::isfinite(solve_time_s) && solve_time_s > 0.0 ? solve_time_s : 0.0;
    enforce_invariants(s);
    return s;
}

std::string_view to_string(ErrorTierKind tier) {
    switch (tier) {
        case ErrorTierKind::validation: return "validation";
        case ErrorTierKind::execution: return "execution";
        case ErrorTierKind::protocol: return "protocol";
    }
    return "protocol";
}

ErrorTier classify_error(ErrorOrigin origin, const ErrorPayload& payload) {
    ErrorTier t;
    switch (origin) {
        case ErrorOrigin::edit_validation: t.tier = ErrorTierKind::validation; break;
        case ErrorOrigin::solver_run: t.tier = ErrorTierKind::execution; break;
        case ErrorOrigin::transport: t.tier = ErrorTierKind::protocol; break;
    }
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, std::vector<Diagnostic>>) {
                t.diagnostics = p;
                t.message = format(p);
            } else if constexpr (std::is_same_v<T, RpcFault>) {
                t.message = p.message;
                t.rpc_code = p.code;
            } else {
                t.message = p;
                t.rpc_code = -32603;
            }
        },
        payload);
    if (t.tier != ErrorTierKind::protocol) t.rpc_code = 0;
    return t;
}

}  // namespace mcpsolver
