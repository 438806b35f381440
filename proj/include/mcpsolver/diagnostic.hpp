// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcpsolver/json.hpp"

namespace mcpsolver {

enum class Severity { error, warning };

/// A validation finding. Line and column are 1-based (column 0 means
/// unknown) and relative to the concatenated candidate model, items joined
/// by newlines. `item` names the 1-based item the line belongs to.
struct Diagnostic {
    Severity severity = Severity::error;
    int line = 1;
    int column = 0;
    std::string message;
    std::optional<std::string> suggestion;
    std::optional<int> item;

    static Diagnostic error(int line, int column, std::string message,
                            std::optional<std::string> suggestion = std::nullopt);
    static Diagnostic warning(int line, int column, std::string message,
                              std::optional<std::string> suggestion = std::nullopt);

    bool operator==(const Diagnostic&) const = default;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);

std::string_view to_string(Severity severity);

/// "error 3:5: message (suggestion: ...)"
std::string format(const Diagnostic& d);
std::string format(const std::vector<Diagnostic>& diagnostics);

Json to_json(const Diagnostic& d);
Json to_json(const std::vector<Diagnostic>& diagnostics);

/// Maps a 1-based line of the newline-joined model back to the item it
/// came from and fills `item` on every diagnostic.
void attach_items(std::vector<Diagnostic>& diagnostics, const std::vector<std::string>& items);

}  // namespace mcpsolver
