// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/mcp/session.hpp"

namespace mcpsolver::mcp {

namespace {

const std::string kCommon = R"(You edit the model one item at a time and solve it when it is complete.

Tools:
- clear_model: remove all items.
- add_item(index, content): insert a complete item at a 1-based index (1..n+1).
- replace_item(index, content): replace the item at index.
- delete_item(index): remove the item at index; later items move up.
- get_model: show the model with numbered items.
- solve_model(timeout): solve with a timeout in seconds.

Every edit is checked against the whole model. A rejected edit leaves the
model unchanged and reports line/column diagnostics; fix the item and try
again. Lines and columns refer to the model with all items joined by
newlines.

Keep items small: one declaration or constraint per item. After solving,
check the reported values against the problem statement before you answer.
)";

const std::string kMiniZinc = kCommon + R"(
Mode: MiniZinc.
- Items are MiniZinc declarations, constraints, includes and one solve item.
  Every item ends with ';'.
- Only plain library includes such as include "globals.mzn"; are allowed.
- Without a solve item the model is still accepted but cannot be solved.
- For optimization use solve minimize <expr>; or solve maximize <expr>;
  The result carries the objective and values._optimal tells whether the
  optimum was proven within the time limit.
)";

const std::string kSat = kCommon + R"(
Mode: SAT (propositional logic).
Each item holds one or more lines of the form:
  var x y z            declare Boolean variables
  clause x -y z        at least one literal is true; "-" negates
  atmost k x y z       at most k of the variables are true
  atleast k x y z      at least k of the variables are true
  exactly k x y z      exactly k of the variables are true
Lines starting with '#' are comments. Variables must be declared before
they are used and declared only once. Names match [A-Za-z_][A-Za-z0-9_]*.
The solution maps every declared variable to true or false.
)";

const std::string kSmt = kCommon + R"(
Mode: SMT (SMT-LIB2).
- Items are SMT-LIB2 commands: set-logic, declare-const, declare-fun,
  define-fun, assert, check-sat, get-model, get-value, push, pop, echo.
  Other commands are rejected.
- Declare every symbol before use; a symbol may be declared only once per
  scope.
- (check-sat) and (get-model) are appended automatically if missing.
- Values: integers as numbers, reals as {"num", "den"}, bit-vectors as
  {"width", "value"}, arrays as {"default", "entries"}.
)";

}  // namespace

const std::string& instruction_prompt(BackendMode mode) {
    switch (mode) {
        case BackendMode::minizinc: return kMiniZinc;
        case BackendMode::sat: return kSat;
        case BackendMode::smt: return kSmt;
    }
    return kSat;
}

}  // namespace mcpsolver::mcp
