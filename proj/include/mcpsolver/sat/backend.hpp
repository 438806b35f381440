// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mcpsolver/backend.hpp"

namespace mcpsolver::sat {

/// Parse, compile and solve with the embedded solver.
SatOutcome solve_items(const std::vector<std::string>& items, double timeout_s);

class SatBackend final : public Backend {
public:
    BackendMode mode() const override { return BackendMode::sat; }
    std::vector<Diagnostic> validate(const std::vector<std::string>& items) override;
    Solution solve(const std::vector<std::string>& items, double timeout_s) override;
};

}  // namespace mcpsolver::sat
