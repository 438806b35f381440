// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mcpsolver/diagnostic.hpp"

namespace mcpsolver::sat {

// Item language, one statement per line:
//   var x y z            declare variables
//   clause x -y z        disjunction; "-" negates
//   atmost k x y z       at most k of the names are true
//   atleast k x y z
//   exactly k x y z
// Blank lines and lines starting with '#' are ignored.

struct Literal {
    std::string name;
    bool negated = false;
    bool operator==(const Literal&) const = default;
};

enum class ItemForm { var_decl, clause, atmost, atleast, exactly };

struct SatItem {
    ItemForm form = ItemForm::var_decl;
    std::vector<Literal> literals;  // names for everything but clause are positive
    int k = 0;                      // cardinality forms only
    int line = 1;                   // 1-based line in the joined model
    bool operator==(const SatItem&) const = default;
};

struct ParseOutput {
    std::vector<SatItem> items;
    std::vector<Diagnostic> diagnostics;  // errors and warnings
};

/// Parses and name-checks all items. Errors: unknown keyword, malformed
/// identifier, undeclared name, duplicate declaration, k out of range.
/// Warning: a declared variable no constraint mentions.
ParseOutput parse_items(const std::vector<std::string>& items);

bool valid_identifier(std::string_view s);

}  // namespace mcpsolver::sat
