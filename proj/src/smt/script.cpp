// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/smt/script.hpp"

#include <algorithm>
#include <map>

namespace mcpsolver::smt {

namespace {

const std::set<std::string, std::less<>>& builtins() {
    static const std::set<std::string, std::less<>> names = {
        // core
        "true", "false", "not", "and", "or", "xor", "=>", "=", "distinct", "ite",
        // arithmetic
        "+", "-", "*", "/", "div", "mod", "abs", "<", "<=", ">", ">=", "to_real", "to_int", "is_int",
        // arrays
        "select", "store", "const",
        // bit-vectors
        "concat", "extract", "repeat", "zero_extend", "sign_extend", "rotate_left", "rotate_right", "bvnot",
        "bvand", "bvor", "bvxor", "bvnand", "bvnor", "bvxnor", "bvneg", "bvadd", "bvsub", "bvmul", "bvudiv",
        "bvurem", "bvsdiv", "bvsrem", "bvsmod", "bvshl", "bvlshr", "bvashr", "bvult", "bvule", "bvugt", "bvuge",
        "bvslt", "bvsle", "bvsgt", "bvsge", "bvcomp", "int2bv", "bv2nat", "bv2int",
        // strings and sequences (common unprefixed forms)
        "str.len", "str.++", "re.*", "re.+",
        // sorts, which can appear inside (as ...) annotations
        "Bool", "Int", "Real", "Array", "BitVec", "String", "RegLan"};
    return names;
}

constexpr const char* kPrefixes[] = {"fp.", "str.", "re.", "seq.", "int.", "bv"};

struct Scopes {
    std::vector<std::map<std::string, int>> frames{{}};  // name -> declaring line

    const int* find(const std::string& name) const {
        for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return &f->second;
        }
        return nullptr;
    }
};

class Checker {
public:
    explicit Checker(std::vector<Diagnostic>& out) : out_(out) {}

    void command(const Command& c) {
        const auto& ch = c.form.children;
        const std::string& n = c.name;
        if (n == "declare-const") {
            if (ch.size() != 3 || !ch[1].is_atom()) return shape(c, "(declare-const name Sort)");
            declare(ch[1]);
        } else if (n == "declare-fun") {
            if (ch.size() != 4 || !ch[1].is_atom() || !ch[2].is_list())
                return shape(c, "(declare-fun name (ArgSorts...) Sort)");
            declare(ch[1]);
        } else if (n == "define-fun") {
            if (ch.size() != 5 || !ch[1].is_atom() || !ch[2].is_list())
                return shape(c, "(define-fun name ((param Sort)...) Sort body)");
            std::vector<std::string> params;
            for (const auto& p : ch[2].children) {
                if (!p.is_list() || p.children.size() != 2 || !p.children[0].is_atom())
                    return shape(c, "(define-fun name ((param Sort)...) Sort body)");
                params.push_back(symbol_name(p.children[0].atom));
            }
            bound_.push_back(params);
            term(ch[4]);
            bound_.pop_back();
            declare(ch[1]);
        } else if (n == "assert") {
            if (ch.size() != 2) return shape(c, "(assert term)");
            term(ch[1]);
        } else if (n == "get-value") {
            if (ch.size() != 2 || !ch[1].is_list()) return shape(c, "(get-value (term...))");
            for (const auto& t : ch[1].children) term(t);
        } else if (n == "push" || n == "pop") {
            int levels = 1;
            if (ch.size() == 2 && classify(ch[1].atom) == AtomClass::numeral && ch[1].is_atom())
                levels = std::stoi(ch[1].atom);
            else if (ch.size() != 1)
                return shape(c, "(" + n + " [n])");
            if (n == "push") {
                for (int i = 0; i < levels; ++i) scopes_.frames.emplace_back();
            } else if (static_cast<int>(scopes_.frames.size()) - 1 < levels) {
                out_.push_back(Diagnostic::error(c.form.begin.line, c.form.begin.column,
                                                 "pop below the outermost assertion level"));
            } else {
                for (int i = 0; i < levels; ++i) scopes_.frames.pop_back();
            }
        }
    }

private:
    void shape(const Command& c, const std::string& expected) {
        out_.push_back(Diagnostic::error(c.form.begin.line, c.form.begin.column, "malformed " + c.name,
                                         "expected " + expected));
    }

    void declare(const SExpr& name_atom) {
        std::string name = symbol_name(name_atom.atom);
        if (const int* line = scopes_.find(name)) {
            out_.push_back(Diagnostic::error(name_atom.begin.line, name_atom.begin.column,
                                             "duplicate declaration of " + name + " (first declared on line " +
                                                 std::to_string(*line) + ")",
                                             "use a different name or remove one declaration"));
            return;
        }
        scopes_.frames.back().emplace(name, name_atom.begin.line);
    }

    bool is_bound(const std::string& name) const {
        for (const auto& frame : bound_)
            if (std::find(frame.begin(), frame.end(), name) != frame.end()) return true;
        return false;
    }

    void symbol(const SExpr& a) {
        if (classify(a.atom) != AtomClass::symbol) return;
        std::string name = symbol_name(a.atom);
        if (is_bound(name) || scopes_.find(name) || is_builtin_symbol(name)) return;
        out_.push_back(Diagnostic::error(a.begin.line, a.begin.column, "undeclared symbol " + name,
                                         "declare it first with (declare-const " + name + " Sort)"));
    }

    void binder_body(const SExpr& t, bool let) {
        const auto& ch = t.children;
        if (ch.size() != 3 || !ch[1].is_list()) {
            out_.push_back(Diagnostic::error(t.begin.line, t.begin.column, "malformed " + ch[0].atom));
            return;
        }
        std::vector<std::string> names;
        for (const auto& b : ch[1].children) {
            if (!b.is_list() || b.children.size() != 2 || !b.children[0].is_atom()) {
                out_.push_back(Diagnostic::error(b.begin.line, b.begin.column, "malformed binding in " + ch[0].atom));
                return;
            }
            if (let) term(b.children[1]);
            names.push_back(symbol_name(b.children[0].atom));
        }
        bound_.push_back(std::move(names));
        term(ch[2]);
        bound_.pop_back();
    }

    void term(const SExpr& t) {
        if (t.is_atom()) return symbol(t);
        const auto& ch = t.children;
        if (ch.empty()) {
            out_.push_back(Diagnostic::error(t.begin.line, t.begin.column, "empty term ()"));
            return;
        }
        const SExpr& head = ch[0];
        if (head.is_atom()) {
            const std::string& h = head.atom;
            if (h == "_" || h == "as" || h == "match") return;
            if (h == "let") return binder_body(t, true);
            if (h == "forall" || h == "exists" || h == "lambda") return binder_body(t, false);
            if (h == "!") {
                if (ch.size() >= 2) term(ch[1]);
                for (std::size_t i = 2; i + 1 < ch.size(); ++i)
                    if (ch[i].is_atom(":named") && ch[i + 1].is_atom()) declare(ch[i + 1]);
                return;
            }
            symbol(head);
        } else if (!(head.is_call("_") || head.is_call("as"))) {
            term(head);
        }
        for (std::size_t i = 1; i < ch.size(); ++i) term(ch[i]);
    }

    std::vector<Diagnostic>& out_;
    Scopes scopes_;
    std::vector<std::vector<std::string>> bound_;
};

}  // namespace

bool is_builtin_symbol(std::string_view name) {
    if (builtins().count(name)) return true;
    for (const char* p : kPrefixes)
        if (name.substr(0, std::char_traits<char>::length(p)) == p) return true;
    return false;
}

const std::vector<std::string>& permitted_commands() {
    static const std::vector<std::string> names = {"set-logic",  "declare-const", "declare-fun", "define-fun",
                                                   "assert",     "check-sat",     "get-model",   "get-value",
                                                   "push",       "pop",           "echo"};
    return names;
}

ScriptParse parse_script(std::string_view text) {
    ScriptParse out;
    auto parsed = parse_sexprs(text);
    out.diagnostics = std::move(parsed.diagnostics);
    const auto& allowed = permitted_commands();
    std::string allowed_list;
    for (const auto& n : allowed) allowed_list += (allowed_list.empty() ? "" : ", ") + n;
    for (auto& form : parsed.forms) {
        if (form.is_atom()) {
            out.diagnostics.push_back(Diagnostic::error(form.begin.line, form.begin.column,
                                                        "expected a command in parentheses, found '" + form.atom + "'"));
            continue;
        }
        if (form.children.empty() || !form.children[0].is_atom()) {
            out.diagnostics.push_back(
                Diagnostic::error(form.begin.line, form.begin.column, "expected a command name after '('"));
            continue;
        }
        std::string name = form.children[0].atom;
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
            out.diagnostics.push_back(Diagnostic::error(form.children[0].begin.line, form.children[0].begin.column,
                                                        "command not permitted: " + name,
                                                        "allowed commands: " + allowed_list));
            continue;
        }
        out.commands.push_back({std::move(name), std::move(form)});
    }
    return out;
}

std::vector<Diagnostic> check_symbols(const std::vector<Command>& commands, int last_line) {
    std::vector<Diagnostic> out;
    Checker checker(out);
    bool check_sat = false;
    bool get_model = false;
    for (const auto& c : commands) {
        checker.command(c);
        check_sat |= c.name == "check-sat";
        get_model |= c.name == "get-model";
    }
    if (!commands.empty() && !check_sat)
        out.push_back(Diagnostic::warning(last_line, 0, "no (check-sat) command",
                                          "(check-sat) will be appended automatically when solving"));
    if (!commands.empty() && !get_model)
        out.push_back(Diagnostic::warning(last_line, 0, "no (get-model) command",
                                          "(get-model) will be appended automatically when solving"));
    return out;
}

std::vector<Diagnostic> validate_script(std::string_view text) {
    auto parsed = parse_script(text);
    int last_line = 1 + static_cast<int>(std::count(text.begin(), text.end(), '\n'));
    auto diags = std::move(parsed.diagnostics);
    // Symbol checks on a structurally broken script only add noise.
    if (has_errors(diags)) return diags;
    auto more = check_symbols(parsed.commands, last_line);
    diags.insert(diags.end(), more.begin(), more.end());
    return diags;
}

std::set<std::string> declared_constants(const std::vector<Command>& commands) {
    std::set<std::string> out;
    for (const auto& c : commands) {
        const auto& ch = c.form.children;
        if (c.name == "declare-const" && ch.size() == 3 && ch[1].is_atom()) out.insert(symbol_name(ch[1].atom));
        if (c.name == "declare-fun" && ch.size() == 4 && ch[1].is_atom() && ch[2].is_list() && ch[2].children.empty())
            out.insert(symbol_name(ch[1].atom));
    }
    return out;
}

std::set<std::string> defined_functions(const std::vector<Command>& commands) {
    std::set<std::string> out;
    for (const auto& c : commands)
        if (c.name == "define-fun" && c.form.children.size() >= 2 && c.form.children[1].is_atom())
            out.insert(symbol_name(c.form.children[1].atom));
    return out;
}

std::string solver_script(const std::vector<Command>& commands) {
    std::string out;
    bool has_check = false;
    bool has_model_after_check = false;
    for (const auto& c : commands) {
        if (c.name == "check-sat") {
            has_check = true;
            has_model_after_check = false;
        }
        if (c.name == "get-model" && has_check) has_model_after_check = true;
    }
    bool inserted_check = false;
    for (const auto& c : commands) {
        if (!has_check && !inserted_check && c.name == "get-model") {
            out += "(check-sat)\n";
            inserted_check = true;
            has_model_after_check = true;
        }
        out += to_string(c.form);
        out += '\n';
    }
    if (!has_check && !inserted_check) out += "(check-sat)\n";
    if (!has_model_after_check) out += "(get-model)\n";
    return out;
}

std::string blank_commands(std::string_view text, const std::vector<Command>& commands,
                           const std::set<std::string>& names) {
    std::vector<std::size_t> line_start{0};
    for (std::size_t i = 0; i < text.size(); ++i)
        if (text[i] == '\n') line_start.push_back(i + 1);
    auto offset = [&](Position p) {
        return line_start[static_cast<std::size_t>(p.line - 1)] + static_cast<std::size_t>(p.column - 1);
    };
    std::string out(text);
    for (const auto& c : commands) {
        if (!names.count(c.name)) continue;
        for (std::size_t i = offset(c.form.begin); i <= offset(c.form.end) && i < out.size(); ++i)
            if (out[i] != '\n') out[i] = ' ';
    }
    return out;
}

}  // namespace mcpsolver::smt
