// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/sat/items.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace mcpsolver::sat {

namespace {

constexpr const char* kKeywordHint = "each line must start with one of: var, clause, atmost, atleast, exactly";

struct Token {
    std::string text;
    int column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size() || line[i] == '#') break;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#') ++i;
        out.push_back({std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
    }
    return out;
}

std::optional<int> parse_k(const std::string& s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

bool valid_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto head = static_cast<unsigned char>(s[0]);
    if (!(std::isalpha(head) || s[0] == '_')) return false;
    for (char c : s.substr(1))
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

ParseOutput parse_items(const std::vector<std::string>& items) {
    ParseOutput out;
    std::map<std::string, std::pair<int, int>> declared;  // name -> (line, column)
    std::set<std::string> used;
    int line_no = 0;

    auto error = [&](int line, int col, std::string msg, std::optional<std::string> hint = std::nullopt) {
        out.diagnostics.push_back(Diagnostic::error(line, col, std::move(msg), std::move(hint)));
    };

    for (const auto& item : items) {
        std::istringstream lines(item);
        std::string line;
        bool any = false;
        while (std::getline(lines, line)) {
            any = true;
            ++line_no;
            auto toks = tokenize(line);
            if (toks.empty()) continue;
            const auto& kw = toks[0].text;
            SatItem parsed;
            parsed.line = line_no;

            if (kw == "var") {
                parsed.form = ItemForm::var_decl;
                if (toks.size() == 1) {
                    error(line_no, toks[0].column, "var declares no variables", "write e.g. 'var x y'");
                    continue;
                }
                bool ok = true;
                for (std::size_t i = 1; i < toks.size(); ++i) {
                    const auto& t = toks[i];
                    if (!valid_identifier(t.text)) {
                        error(line_no, t.column, "invalid variable name '" + t.text + "'",
                              "names match [A-Za-z_][A-Za-z0-9_]*");
                        ok = false;
                        continue;
                    }
                    if (auto it = declared.find(t.text); it != declared.end()) {
                        error(line_no, t.column,
                              "duplicate declaration of '" + t.text + "' (first declared on line " +
                                  std::to_string(it->second.first) + ")",
                              "declare each variable once; reuse the existing name");
                        ok = false;
                        continue;
                    }
                    declared.emplace(t.text, std::pair{line_no, t.column});
                    parsed.literals.push_back({t.text, false});
                }
                if (ok) out.items.push_back(std::move(parsed));
                continue;
            }

            std::size_t first_name = 1;
            if (kw == "clause") {
                parsed.form = ItemForm::clause;
            } else if (kw == "atmost" || kw == "atleast" || kw == "exactly") {
                parsed.form = kw == "atmost" ? ItemForm::atmost : kw == "atleast" ? ItemForm::atleast : ItemForm::exactly;
                if (toks.size() < 2) {
                    error(line_no, toks[0].column, kw + " needs a bound k and a list of variables",
                          "write e.g. '" + kw + " 1 x y z'");
                    continue;
                }
                auto k = parse_k(toks[1].text);
                if (!k || *k < 0) {
                    error(line_no, toks[1].column, "bound '" + toks[1].text + "' is not a non-negative integer");
                    continue;
                }
                parsed.k = *k;
                first_name = 2;
            } else {
                error(line_no, toks[0].column, "unknown keyword '" + kw + "'", kKeywordHint);
                continue;
            }

            if (toks.size() <= first_name) {
                error(line_no, toks[0].column, kw + " needs at least one literal");
                continue;
            }
            bool ok = true;
            for (std::size_t i = first_name; i < toks.size(); ++i) {
                std::string_view text = toks[i].text;
                bool neg = false;
                if (!text.empty() && text[0] == '-') {
                    neg = true;
                    text.remove_prefix(1);
                }
                if (neg && parsed.form != ItemForm::clause) {
                    error(line_no, toks[i].column, "negated literal '" + toks[i].text + "' is only allowed in clause",
                          "cardinality constraints take plain variable names");
                    ok = false;
                    continue;
                }
                if (!valid_identifier(text)) {
                    error(line_no, toks[i].column, "invalid literal '" + toks[i].text + "'",
                          "a literal is a variable name, optionally prefixed by '-'");
                    ok = false;
                    continue;
                }
                std::string name(text);
                if (!declared.count(name)) {
                    error(line_no, toks[i].column + (neg ? 1 : 0), "undeclared variable " + name,
                          "add 'var " + name + "' in an earlier item or line");
                    ok = false;
                    continue;
                }
                used.insert(name);
                parsed.literals.push_back({std::move(name), neg});
            }
            if (ok && parsed.form != ItemForm::clause && parsed.k > static_cast<int>(parsed.literals.size())) {
                error(line_no, toks[1].column,
                      "bound " + std::to_string(parsed.k) + " exceeds the number of variables (" +
                          std::to_string(parsed.literals.size()) + ")");
                ok = false;
            }
            if (ok) out.items.push_back(std::move(parsed));
        }
        if (!any) ++line_no;  // an empty item still occupies one joined line
        if (!item.empty() && item.back() == '\n') ++line_no;
    }

    for (const auto& [name, where] : declared)
        if (!used.count(name))
            out.diagnostics.push_back(
                Diagnostic::warning(where.first, where.second, "variable " + name + " is declared but never constrained"));
    return out;
}

}  // namespace mcpsolver::sat
