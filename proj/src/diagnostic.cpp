// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/diagnostic.hpp"

#include <algorithm>

namespace mcpsolver {

Diagnostic Diagnostic::error(int line, int column, std::string message,
                             std::optional<std::string> suggestion) {
    return Diagnostic{Severity::error, std::max(line, 1), std::max(column, 0), std::move(message),
                      std::move(suggestion), std::nullopt};
}

Diagnostic Diagnostic::warning(int line, int column, std::string message,
                               std::optional<std::string> suggestion) {
    return Diagnostic{Severity::warning, std::max(line, 1), std::max(column, 0), std::move(message),
                      std::move(suggestion), std::nullopt};
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::string_view to_string(Severity severity) {
    return severity == Severity::error ? "error" : "warning";
}

std::string format(const Diagnostic& d) {
    std::string out{to_string(d.severity)};
    out += " " + std::to_string(d.line) + ":" + std::to_string(d.column);
    if (d.item) out += " (item " + std::to_string(*d.item) + ")";
    out += ": " + d.message;
    if (d.suggestion) out += " (suggestion: " + *d.suggestion + ")";
    return out;
}

std::string format(const std::vector<Diagnostic>& diagnostics) {
    std::string out;
    for (const auto& d : diagnostics) {
        if (!out.empty()) out += '\n';
        out += format(d);
    }
    return out;
}

Json to_json(const Diagnostic& d) {
    Json j = {{"severity", to_string(d.severity)},
                        {"line", d.line},
                        {"column", d.column},
                        {"message", d.message}};
    if (d.suggestion) j["suggestion"] = *d.suggestion;
    if (d.item) j["item"] = *d.item;
    return j;
}

Json to_json(const std::vector<Diagnostic>& diagnostics) {
    auto arr = Json::array();
    for (const auto& d : diagnostics) arr.push_back(to_json(d));
    return arr;
}

void attach_items(std::vector<Diagnostic>& diagnostics, const std::vector<std::string>& items) {
    // first_line[i] is the 1-based line on which item i+1 starts
    std::vector<int> first_line;
    int line = 1;
    for (const auto& text : items) {
        first_line.push_back(line);
        line += static_cast<int>(std::count(text.begin(), text.end(), '\n')) + 1;
    }
    for (auto& d : diagnostics) {
        if (d.item || first_line.empty()) continue;
        auto it = std::upper_bound(first_line.begin(), first_line.end(), d.line);
        if (it == first_line.begin()) continue;
        d.item = static_cast<int>(it - first_line.begin());
    }
}

}  // namespace mcpsolver
