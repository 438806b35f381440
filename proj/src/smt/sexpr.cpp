// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/smt/sexpr.hpp"

#include <cctype>

namespace mcpsolver::smt {

bool same_structure(const SExpr& a, const SExpr& b) {
    if (a.kind != b.kind) return false;
    if (a.is_atom()) return a.atom == b.atom;
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!same_structure(a.children[i], b.children[i])) return false;
    return true;
}

namespace {

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    bool done() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    Position where() const { return {line_, col_}; }

    char get() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (!done()) {
            char c = peek();
            if (c == ';') {
                while (!done() && peek() != '\n') get();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else {
                return;
            }
        }
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

SExprParse parse_sexprs(std::string_view text) {
    SExprParse out;
    Reader r(text);
    // Open lists under construction.
    std::vector<SExpr> stack;
    Position last_end{};

    auto push = [&](SExpr e) {
        if (stack.empty())
            out.forms.push_back(std::move(e));
        else
            stack.back().children.push_back(std::move(e));
    };

    for (;;) {
        r.skip_space_and_comments();
        if (r.done()) break;
        Position at = r.where();
        char c = r.peek();
        if (c == '(') {
            r.get();
            stack.push_back(SExpr::make_list({}, at, at));
            continue;
        }
        if (c == ')') {
            r.get();
            if (stack.empty()) {
                out.diagnostics.push_back(
                    Diagnostic::error(at.line, at.column, "unbalanced parenthesis: ')' has no matching '('",
                                      "remove the extra ')'"));
                continue;
            }
            SExpr done = std::move(stack.back());
            stack.pop_back();
            done.end = at;
            last_end = at;
            push(std::move(done));
            continue;
        }
        std::string tok;
        if (c == '"') {
            tok += r.get();
            bool closed = false;
            while (!r.done()) {
                char d = r.get();
                tok += d;
                if (d == '"') {
                    if (!r.done() && r.peek() == '"') {
                        tok += r.get();  // "" escape
                        continue;
                    }
                    closed = true;
                    break;
                }
            }
            if (!closed) {
                out.diagnostics.push_back(Diagnostic::error(at.line, at.column, "unterminated string literal"));
                break;
            }
        } else if (c == '|') {
            tok += r.get();
            bool closed = false;
            while (!r.done()) {
                char d = r.get();
                tok += d;
                if (d == '|') {
                    closed = true;
                    break;
                }
            }
            if (!closed) {
                out.diagnostics.push_back(Diagnostic::error(at.line, at.column, "unterminated quoted symbol"));
                break;
            }
        } else {
            while (!r.done()) {
                char d = r.peek();
                if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';' || d == '"' ||
                    d == '|')
                    break;
                tok += r.get();
            }
        }
        Position end = r.where();
        end.column = std::max(1, end.column - 1);
        SExpr atom = SExpr::make_atom(std::move(tok), at);
        atom.end = end;
        push(std::move(atom));
    }

    // Report the innermost unclosed list first; each points at its '('.
    for (auto it = stack.rbegin(); it != stack.rend(); ++it)
        out.diagnostics.push_back(Diagnostic::error(it->begin.line, it->begin.column,
                                                    "unbalanced parenthesis: '(' opened here is never closed",
                                                    "add the missing ')'"));
    (void)last_end;
    return out;
}

std::string to_string(const SExpr& e) {
    if (e.is_atom()) return e.atom;
    std::string out = "(";
    for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += ' ';
        out += to_string(e.children[i]);
    }
    out += ')';
    return out;
}

AtomClass classify(const std::string& a) {
    if (a.empty()) return AtomClass::symbol;
    if (a[0] == '"') return AtomClass::string;
    if (a[0] == ':') return AtomClass::keyword;
    if (a.size() > 2 && a[0] == '#' && a[1] == 'x') return AtomClass::hexadecimal;
    if (a.size() > 2 && a[0] == '#' && a[1] == 'b') return AtomClass::binary;
    if (std::isdigit(static_cast<unsigned char>(a[0]))) {
        bool dot = false;
        for (char c : a) {
            if (c == '.' && !dot) {
                dot = true;
                continue;
            }
            if (!std::isdigit(static_cast<unsigned char>(c))) return AtomClass::symbol;
        }
        return dot ? AtomClass::decimal : AtomClass::numeral;
    }
    return AtomClass::symbol;
}

std::string symbol_name(const std::string& atom) {
    if (atom.size() >= 2 && atom.front() == '|' && atom.back() == '|') return atom.substr(1, atom.size() - 2);
    return atom;
}

}  // namespace mcpsolver::smt
