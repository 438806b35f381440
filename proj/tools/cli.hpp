// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcpsolver::cli {

/// Exit codes: 0 success (verdict correct or unknown), 1 verdict incorrect,
/// 2 usage or runtime error.
int run(const std::vector<std::string>& args, const std::string& self_exe, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace mcpsolver::cli
