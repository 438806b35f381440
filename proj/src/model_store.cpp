// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/model_store.hpp"

#include <algorithm>
#include <cctype>
#include <exception>
#include <sstream>

namespace mcpsolver {

namespace {

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

EditRejected reject(std::string message, std::optional<std::string> suggestion = std::nullopt) {
    return {{Diagnostic::error(1, 0, std::move(message), std::move(suggestion))}};
}

}  // namespace

EditResult apply_edit(ModelState& model, const EditRequest& edit, Backend& backend) {
    const long n = static_cast<long>(model.items.size());
    std::vector<std::string> candidate = model.items;

    switch (edit.kind) {
        case EditKind::clear:
            model.items.clear();
            ++model.version;
            return EditCommitted{};
        case EditKind::add:
            if (edit.index < 1 || edit.index > n + 1)
                return reject("index " + std::to_string(edit.index) + " out of range for add_item; valid range is 1.." +
                              std::to_string(n + 1));
            if (blank(edit.content)) return reject("item content must not be empty");
            candidate.insert(candidate.begin() + (edit.index - 1), edit.content);
            break;
        case EditKind::replace:
            if (edit.index < 1 || edit.index > n)
                return reject("index " + std::to_string(edit.index) + " out of range for replace_item; " +
                              (n == 0 ? std::string("the model is empty") : "valid range is 1.." + std::to_string(n)));
            if (blank(edit.content)) return reject("item content must not be empty");
            candidate[static_cast<std::size_t>(edit.index - 1)] = edit.content;
            break;
        case EditKind::remove:
            if (edit.index < 1 || edit.index > n)
                return reject("index " + std::to_string(edit.index) + " out of range for delete_item; " +
                              (n == 0 ? std::string("the model is empty") : "valid range is 1.." + std::to_string(n)));
            candidate.erase(candidate.begin() + (edit.index - 1));
            break;
    }

    std::vector<Diagnostic> diagnostics;
    try {
        diagnostics = backend.validate(candidate);
    } catch (const std::exception& e) {
        return reject(std::string("validator failed: ") + e.what());
    } catch (...) {
        return reject("validator failed with an unknown error");
    }
    attach_items(diagnostics, candidate);
    if (has_errors(diagnostics)) return EditRejected{std::move(diagnostics)};

    model.items = std::move(candidate);
    ++model.version;
    return EditCommitted{std::move(diagnostics)};
}

std::string render_numbered(const ModelState& model) {
    if (model.items.empty()) return std::string(kEmptyModelMarker);
    std::string out;
    for (std::size_t i = 0; i < model.items.size(); ++i) {
        const std::string label = std::to_string(i + 1);
        const std::string continuation(label.size(), ' ');
        if (i > 0) out += '\n';
        out += label + " | ";
        for (char c : model.items[i]) {
            out += c;
            if (c == '\n') out += continuation + " | ";
        }
    }
    return out;
}

std::optional<std::vector<std::string>> parse_numbered(const std::string& rendering) {
    std::vector<std::string> items;
    if (rendering == kEmptyModelMarker) return items;
    std::size_t pos = 0;
    while (pos <= rendering.size()) {
        auto end = rendering.find('\n', pos);
        if (end == std::string::npos) end = rendering.size();
        std::string_view line(rendering.data() + pos, end - pos);
        auto bar = line.find(" | ");
        if (bar == std::string_view::npos || bar == 0) return std::nullopt;
        auto label = line.substr(0, bar);
        auto body = line.substr(bar + 3);
        if (std::all_of(label.begin(), label.end(), [](unsigned char c) { return std::isdigit(c); })) {
            if (std::to_string(items.size() + 1) != label) return std::nullopt;
            items.emplace_back(body);
        } else if (std::all_of(label.begin(), label.end(), [](char c) { return c == ' '; })) {
            if (items.empty() || label.size() != std::to_string(items.size()).size()) return std::nullopt;
            items.back() += '\n';
            items.back() += body;
        } else {
            return std::nullopt;
        }
        pos = end + 1;
    }
    return items;
}

std::string concat_model(const std::vector<std::string>& items, BackendMode) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += '\n';
        out += items[i];
    }
    return out;
}

}  // namespace mcpsolver
