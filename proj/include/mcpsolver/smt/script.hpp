// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mcpsolver/smt/sexpr.hpp"

namespace mcpsolver::smt {

/// A top-level command, e.g. (assert ...). `form` keeps the whole list.
struct Command {
    std::string name;
    SExpr form;
};

struct ScriptParse {
    std::vector<Command> commands;
    std::vector<Diagnostic> diagnostics;
};

/// Commands a model may contain.
const std::vector<std::string>& permitted_commands();

/// Parses s-expressions and enforces the command whitelist.
ScriptParse parse_script(std::string_view text);

/// Symbol-level checks: undeclared symbols, duplicate declarations (scoped by
/// push/pop), and warnings for a missing (check-sat) or (get-model).
std::vector<Diagnostic> check_symbols(const std::vector<Command>& commands, int last_line);

/// parse_script + check_symbols over the joined model text.
std::vector<Diagnostic> validate_script(std::string_view text);

/// Names introduced by declare-const and zero-arity declare-fun.
std::set<std::string> declared_constants(const std::vector<Command>& commands);
/// Names introduced by define-fun.
std::set<std::string> defined_functions(const std::vector<Command>& commands);

/// The script sent to the solver: the commands as written, plus (check-sat)
/// and (get-model) when absent. Each appears exactly once when appended.
std::string solver_script(const std::vector<Command>& commands);

/// `text` with the listed commands blanked out (replaced by spaces) so that
/// solver-reported positions still map onto the original lines.
std::string blank_commands(std::string_view text, const std::vector<Command>& commands,
                           const std::set<std::string>& names);

bool is_builtin_symbol(std::string_view name);

}  // namespace mcpsolver::smt
