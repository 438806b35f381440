// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mcpsolver/backend.hpp"
#include "mcpsolver/diagnostic.hpp"

namespace mcpsolver {

/// The session's model: items addressed 1..n plus a version counter bumped
/// on every committed change.
struct ModelState {
    std::vector<std::string> items;
    std::uint64_t version = 0;

    std::size_t size() const { return items.size(); }
    bool operator==(const ModelState&) const = default;
};

enum class EditKind { add, replace, remove, clear };

struct EditRequest {
    EditKind kind = EditKind::clear;
    long index = 0;  // unused for clear
    std::string content;  // unused for remove and clear

    static EditRequest add(long index, std::string content) { return {EditKind::add, index, std::move(content)}; }
    static EditRequest replace(long index, std::string content) {
        return {EditKind::replace, index, std::move(content)};
    }
    static EditRequest remove(long index) { return {EditKind::remove, index, {}}; }
    static EditRequest clear() { return {EditKind::clear, 0, {}}; }
};

struct EditCommitted {
    std::vector<Diagnostic> warnings;
};

struct EditRejected {
    std::vector<Diagnostic> diagnostics;
};

using EditResult = std::variant<EditCommitted, EditRejected>;

/// Validation-gated edit: builds the candidate item list, validates it as a
/// whole and commits only when no error-severity diagnostic comes back. On
/// rejection `model` is left untouched.
EditResult apply_edit(ModelState& model, const EditRequest& edit, Backend& backend);

/// "k | text" per item; continuation lines of multi-line items carry a
/// blank prefix of the same width. Empty model: "(model is empty)".
std::string render_numbered(const ModelState& model);

/// Inverse of render_numbered. Returns nullopt on text that render_numbered
/// cannot have produced.
std::optional<std::vector<std::string>> parse_numbered(const std::string& rendering);

/// Items joined by the mode's separator (a newline in every mode).
std::string concat_model(const std::vector<std::string>& items, BackendMode mode);

inline constexpr std::string_view kEmptyModelMarker = "(model is empty)";

}  // namespace mcpsolver
