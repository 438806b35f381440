// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mcpsolver/diagnostic.hpp"

namespace mcpsolver::smt {

/// 1-based line and column.
struct Position {
    int line = 1;
    int column = 1;
    bool operator==(const Position&) const = default;
};

struct SExpr {
    enum class Kind { atom, list };

    Kind kind = Kind::atom;
    std::string atom;  // verbatim token, including quotes or bars
    std::vector<SExpr> children;
    Position begin;
    Position end;  // position of the last character

    static SExpr make_atom(std::string text, Position at = {}) {
        SExpr e;
        e.atom = std::move(text);
        e.begin = at;
        e.end = at;
        return e;
    }
    static SExpr make_list(std::vector<SExpr> children, Position b = {}, Position e = {}) {
        SExpr x;
        x.kind = Kind::list;
        x.children = std::move(children);
        x.begin = b;
        x.end = e;
        return x;
    }

    bool is_atom() const { return kind == Kind::atom; }
    bool is_list() const { return kind == Kind::list; }
    bool is_atom(std::string_view text) const { return is_atom() && atom == text; }
    /// List whose first child is the atom `head`.
    bool is_call(std::string_view head) const {
        return is_list() && !children.empty() && children.front().is_atom(head);
    }
    std::string_view head() const {
        return is_list() && !children.empty() && children.front().is_atom() ? std::string_view(children.front().atom)
                                                                             : std::string_view{};
    }
};

/// Structural equality, ignoring source positions.
bool same_structure(const SExpr& a, const SExpr& b);

struct SExprParse {
    std::vector<SExpr> forms;
    std::vector<Diagnostic> diagnostics;
};

/// Tokenizes (atoms, "strings", |quoted symbols|, ; comments) and parses
/// balanced s-expressions. An unclosed '(' is reported at its own position.
SExprParse parse_sexprs(std::string_view text);

/// Single-line canonical rendering: atoms verbatim, lists space-separated.
std::string to_string(const SExpr& e);

enum class AtomClass { symbol, numeral, decimal, hexadecimal, binary, string, keyword };

AtomClass classify(const std::string& atom);

/// |x| -> x; other symbols unchanged.
std::string symbol_name(const std::string& atom);

}  // namespace mcpsolver::smt
