// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/backend.hpp"

#include "mcpsolver/minizinc.hpp"
#include "mcpsolver/sandbox.hpp"
#include "mcpsolver/sat/backend.hpp"
#include "mcpsolver/smt/backend.hpp"

namespace mcpsolver {

std::unique_ptr<Backend> make_backend(BackendMode mode, const BackendOptions& options) {
    switch (mode) {
        case BackendMode::minizinc: {
            mzn::MznConfig cfg;
            cfg.executable = find_executable(options.paths.minizinc, "MCP_SOLVER_MZN", "minizinc");
            cfg.solver_tag = options.mzn_solver_tag;
            cfg.flatten_timeout_s = options.mzn_flatten_timeout_s;
            return std::make_unique<mzn::MiniZincBackend>(std::move(cfg));
        }
        case BackendMode::sat: return std::make_unique<sat::SatBackend>();
        case BackendMode::smt: {
            smt::SmtConfig cfg;
            cfg.executable = find_executable(options.paths.smt, "MCP_SOLVER_SMT", "z3");
            cfg.timeout_option = options.smt_timeout_option;
            cfg.extra_args = options.smt_extra_args;
            return std::make_unique<smt::SmtBackend>(std::move(cfg));
        }
    }
    return nullptr;
}

}  // namespace mcpsolver
