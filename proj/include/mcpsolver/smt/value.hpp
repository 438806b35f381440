// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mcpsolver/json.hpp"
#include "mcpsolver/smt/script.hpp"

namespace mcpsolver::smt {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// A ground value from a solver model.
class Value {
public:
    enum class Kind { boolean, integer, real, bitvector, array };

    static Value boolean(bool b);
    static Value integer(BigInt v);
    static Value real(Rational v);
    /// Reduced modulo 2^width.
    static Value bitvector(unsigned width, BigInt v);
    static Value array(Value default_value);

    Kind kind() const { return kind_; }
    bool as_bool() const;
    const BigInt& as_int() const;  // integer, or bit-vector as unsigned
    Rational as_rational() const;  // integer or real
    unsigned width() const;
    /// Bit-vector read as two's complement.
    BigInt as_signed() const;

    const Value& array_default() const;
    /// Explicit entries, in insertion order; later stores overwrite earlier ones.
    const std::vector<std::pair<Value, Value>>& array_entries() const;
    void array_store(const Value& index, const Value& value);
    Value array_select(const Value& index) const;

    bool operator==(const Value& other) const;

    /// Canonical JSON: booleans and integers as JSON scalars (integers outside
    /// 64 bits as decimal strings), reals as {"num","den"}, bit-vectors as
    /// {"width","value"}, arrays as {"default","entries":[[index,value],...]}.
    Json to_json() const;
    /// SMT-LIB literal rendering.
    std::string to_smtlib() const;

private:
    Kind kind_ = Kind::boolean;
    bool b_ = false;
    BigInt i_;
    Rational r_;
    unsigned width_ = 0;
    std::vector<Value> default_;  // size 1 for arrays
    std::vector<std::pair<Value, Value>> entries_;
};

/// Reads a literal value term (true, 42, (- 3), 2.5, (/ 1 3), #b101, #xfd,
/// (_ bv5 8), ((as const ...) v), (store ...), array lambdas). Returns
/// nullopt for shapes it does not recognize.
std::optional<Value> read_value(const SExpr& term);

struct ModelParse {
    std::map<std::string, Value> values;
    std::vector<std::string> skipped;  // "name: reason"
};

/// Extracts zero-arity (define-fun name () Sort value) entries. Accepts both
/// "(model ...)" and bare-list layouts. When `only` is given, other names are
/// ignored silently.
ModelParse parse_model(const SExpr& model, const std::set<std::string>* only = nullptr);

Json to_json(const std::map<std::string, Value>& values);

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ground evaluator for the Bool / Int / Real / BitVec / Array fragment.
/// Unknown symbols or operators throw EvalError.
class Evaluator {
public:
    explicit Evaluator(std::map<std::string, Value> values) : values_(std::move(values)) {}

    /// Registers define-fun macros from a script.
    void add_definitions(const std::vector<Command>& commands);

    Value eval(const SExpr& term) const;

private:
    struct Macro {
        std::vector<std::string> params;
        SExpr body;
    };
    Value eval(const SExpr& term, std::vector<std::map<std::string, Value>>& env) const;
    Value apply(const std::string& op, const std::vector<Value>& args, const SExpr& at) const;
    Value apply_indexed(const SExpr& head, const std::vector<Value>& args) const;

    std::map<std::string, Value> values_;
    std::map<std::string, Macro> macros_;
};

struct WitnessCheck {
    int checked = 0;
    std::vector<std::string> violated;     // assertions evaluating to false
    std::vector<std::string> unsupported;  // assertions the evaluator could not decide
    bool holds() const { return violated.empty() && unsupported.empty(); }
};

/// Evaluates every (assert ...) of the script under `values`.
WitnessCheck check_witness(const std::vector<Command>& commands, const std::map<std::string, Value>& values);

}  // namespace mcpsolver::smt
