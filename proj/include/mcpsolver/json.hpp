// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

namespace mcpsolver {

// Insertion-ordered so wire output keeps field order ("jsonrpc", "id", ...)
// and solver assignments keep the order the backend reported them in.
using Json = nlohmann::ordered_json;

}  // namespace mcpsolver
