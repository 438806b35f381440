// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/smt/value.hpp"

#include <limits>

namespace mcpsolver::smt {

namespace {

BigInt pow2(unsigned w) { return BigInt(1) << w; }

BigInt parse_digits(const std::string& digits, unsigned base) {
    BigInt v = 0;
    for (char c : digits) {
        unsigned d;
        if (c >= '0' && c <= '9')
            d = static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f')
            d = static_cast<unsigned>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F')
            d = static_cast<unsigned>(c - 'A' + 10);
        else
            throw std::invalid_argument("bad digit");
        if (d >= base) throw std::invalid_argument("bad digit");
        v = v * base + d;
    }
    return v;
}

Json big_to_json(const BigInt& v) {
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
        return Json(static_cast<std::int64_t>(v));
    return Json(v.str());
}

std::optional<Value> read_literal_atom(const std::string& a) {
    if (a == "true") return Value::boolean(true);
    if (a == "false") return Value::boolean(false);
    try {
        switch (classify(a)) {
            case AtomClass::numeral: return Value::integer(BigInt(a));
            case AtomClass::decimal: {
                auto dot = a.find('.');
                std::string frac = a.substr(dot + 1);
                BigInt num(a.substr(0, dot) + frac);
                BigInt den = 1;
                for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
                return Value::real(Rational(num, den));
            }
            case AtomClass::binary:
                return Value::bitvector(static_cast<unsigned>(a.size() - 2), parse_digits(a.substr(2), 2));
            case AtomClass::hexadecimal:
                return Value::bitvector(static_cast<unsigned>(4 * (a.size() - 2)), parse_digits(a.substr(2), 16));
            default: return std::nullopt;
        }
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::optional<unsigned> index_arg(const SExpr& e) {
    if (!e.is_atom() || classify(e.atom) != AtomClass::numeral || e.atom.size() > 9) return std::nullopt;
    return static_cast<unsigned>(std::stoul(e.atom));
}

// (_ bvN w)
std::optional<Value> read_indexed_bv(const SExpr& e) {
    if (!e.is_call("_") || e.children.size() != 3) return std::nullopt;
    const auto& name = e.children[1];
    auto width = index_arg(e.children[2]);
    if (!name.is_atom() || name.atom.size() < 3 || name.atom.compare(0, 2, "bv") != 0 || !width) return std::nullopt;
    std::string digits = name.atom.substr(2);
    if (classify(digits) != AtomClass::numeral) return std::nullopt;
    return Value::bitvector(*width, BigInt(digits));
}

std::optional<Value> read_lambda(const SExpr& e) {
    // (lambda ((x S)) body) with body an ite chain over (= x k).
    if (e.children.size() != 3 || !e.children[1].is_list() || e.children[1].children.size() != 1) return std::nullopt;
    const SExpr& binding = e.children[1].children[0];
    if (!binding.is_list() || binding.children.empty() || !binding.children[0].is_atom()) return std::nullopt;
    const std::string& var = binding.children[0].atom;
    std::vector<std::pair<Value, Value>> entries;
    const SExpr* cur = &e.children[2];
    while (cur->is_call("ite") && cur->children.size() == 4) {
        const SExpr& cond = cur->children[1];
        if (!cond.is_call("=") || cond.children.size() != 3) return std::nullopt;
        const SExpr* key = nullptr;
        if (cond.children[1].is_atom(var))
            key = &cond.children[2];
        else if (cond.children[2].is_atom(var))
            key = &cond.children[1];
        if (!key) return std::nullopt;
        auto k = read_value(*key);
        auto v = read_value(cur->children[2]);
        if (!k || !v) return std::nullopt;
        entries.emplace_back(*k, *v);
        cur = &cur->children[3];
    }
    auto d = read_value(*cur);
    if (!d) return std::nullopt;
    Value arr = Value::array(*d);
    // Earlier branches take precedence, so store them last.
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) arr.array_store(it->first, it->second);
    return arr;
}

}  // namespace

// --- Value ----------------------------------------------------------------

Value Value::boolean(bool b) {
    Value v;
    v.kind_ = Kind::boolean;
    v.b_ = b;
    return v;
}

Value Value::integer(BigInt i) {
    Value v;
    v.kind_ = Kind::integer;
    v.i_ = std::move(i);
    return v;
}

Value Value::real(Rational r) {
    Value v;
    v.kind_ = Kind::real;
    v.r_ = std::move(r);
    return v;
}

Value Value::bitvector(unsigned width, BigInt i) {
    if (width == 0) throw std::invalid_argument("bit-vector width must be positive");
    Value v;
    v.kind_ = Kind::bitvector;
    v.width_ = width;
    BigInt m = pow2(width);
    i %= m;
    if (i < 0) i += m;
    v.i_ = std::move(i);
    return v;
}

Value Value::array(Value default_value) {
    Value v;
    v.kind_ = Kind::array;
    v.default_.push_back(std::move(default_value));
    return v;
}

bool Value::as_bool() const {
    if (kind_ != Kind::boolean) throw EvalError("expected a Bool value");
    return b_;
}

const BigInt& Value::as_int() const {
    if (kind_ != Kind::integer && kind_ != Kind::bitvector) throw EvalError("expected an Int or bit-vector value");
    return i_;
}

Rational Value::as_rational() const {
    if (kind_ == Kind::integer) return Rational(i_);
    if (kind_ == Kind::real) return r_;
    throw EvalError("expected a numeric value");
}

unsigned Value::width() const {
    if (kind_ != Kind::bitvector) throw EvalError("expected a bit-vector value");
    return width_;
}

BigInt Value::as_signed() const {
    unsigned w = width();
    return i_ >= pow2(w - 1) ? BigInt(i_ - pow2(w)) : i_;
}

const Value& Value::array_default() const {
    if (kind_ != Kind::array) throw EvalError("expected an array value");
    return default_.front();
}

const std::vector<std::pair<Value, Value>>& Value::array_entries() const {
    if (kind_ != Kind::array) throw EvalError("expected an array value");
    return entries_;
}

void Value::array_store(const Value& index, const Value& value) {
    if (kind_ != Kind::array) throw EvalError("store on a non-array value");
    for (auto& e : entries_)
        if (e.first == index) {
            e.second = value;
            return;
        }
    entries_.emplace_back(index, value);
}

Value Value::array_select(const Value& index) const {
    for (const auto& e : array_entries())
        if (e.first == index) return e.second;
    return array_default();
}

bool Value::operator==(const Value& o) const {
    if (kind_ != o.kind_) return false;
    switch (kind_) {
        case Kind::boolean: return b_ == o.b_;
        case Kind::integer: return i_ == o.i_;
        case Kind::real: return r_ == o.r_;
        case Kind::bitvector: return width_ == o.width_ && i_ == o.i_;
        case Kind::array: {
            if (!(default_.front() == o.default_.front())) return false;
            // Extensional over the explicit indices of both sides.
            for (const auto& e : entries_)
                if (!(o.array_select(e.first) == e.second)) return false;
            for (const auto& e : o.entries_)
                if (!(array_select(e.first) == e.second)) return false;
            return true;
        }
    }
    return false;
}

Json Value::to_json() const {
    switch (kind_) {
        case Kind::boolean: return Json(b_);
        case Kind::integer: return big_to_json(i_);
        case Kind::real: {
            Json j = Json::object();
            j["num"] = big_to_json(boost::multiprecision::numerator(r_));
            j["den"] = big_to_json(boost::multiprecision::denominator(r_));
            return j;
        }
        case Kind::bitvector: {
            Json j = Json::object();
            j["width"] = width_;
            j["value"] = big_to_json(i_);
            return j;
        }
        case Kind::array: {
            Json j = Json::object();
            j["default"] = default_.front().to_json();
            Json entries = Json::array();
            for (const auto& [k, v] : entries_) entries.push_back(Json::array({k.to_json(), v.to_json()}));
            j["entries"] = std::move(entries);
            return j;
        }
    }
    return Json();
}

namespace {

std::string sort_of(const Value& v) {
    switch (v.kind()) {
        case Value::Kind::boolean: return "Bool";
        case Value::Kind::integer: return "Int";
        case Value::Kind::real: return "Real";
        case Value::Kind::bitvector: return "(_ BitVec " + std::to_string(v.width()) + ")";
        case Value::Kind::array: {
            std::string index = v.array_entries().empty() ? "Int" : sort_of(v.array_entries().front().first);
            return "(Array " + index + " " + sort_of(v.array_default()) + ")";
        }
    }
    return "Int";
}

}  // namespace

std::string Value::to_smtlib() const {
    switch (kind_) {
        case Kind::boolean: return b_ ? "true" : "false";
        case Kind::integer: return i_ < 0 ? "(- " + BigInt(-i_).str() + ")" : i_.str();
        case Kind::real: {
            BigInt n = boost::multiprecision::numerator(r_);
            BigInt d = boost::multiprecision::denominator(r_);
            std::string mag = d == 1 ? BigInt(abs(n)).str() + ".0" : "(/ " + BigInt(abs(n)).str() + ".0 " + d.str() + ".0)";
            return n < 0 ? "(- " + mag + ")" : mag;
        }
        case Kind::bitvector: {
            std::string digits;
            if (width_ % 4 == 0) {
                static const char* hex = "0123456789abcdef";
                for (unsigned i = 0; i < width_ / 4; ++i)
                    digits.insert(digits.begin(), hex[static_cast<unsigned>((i_ >> (4 * i)) & 15)]);
                return "#x" + digits;
            }
            for (unsigned i = 0; i < width_; ++i) digits.insert(digits.begin(), bit_test(i_, i) ? '1' : '0');
            return "#b" + digits;
        }
        case Kind::array: {
            std::string out = "((as const " + sort_of(*this) + ") " + default_.front().to_smtlib() + ")";
            for (const auto& [k, v] : entries_) out = "(store " + out + " " + k.to_smtlib() + " " + v.to_smtlib() + ")";
            return out;
        }
    }
    return "";
}

// --- reading models -------------------------------------------------------

std::optional<Value> read_value(const SExpr& e) {
    if (e.is_atom()) return read_literal_atom(e.atom);
    const auto& ch = e.children;
    if (ch.empty()) return std::nullopt;
    if (e.is_call("-") && ch.size() == 2) {
        auto v = read_value(ch[1]);
        if (!v) return std::nullopt;
        if (v->kind() == Value::Kind::integer) return Value::integer(-v->as_int());
        if (v->kind() == Value::Kind::real) return Value::real(-v->as_rational());
        return std::nullopt;
    }
    if (e.is_call("/") && ch.size() == 3) {
        auto a = read_value(ch[1]);
        auto b = read_value(ch[2]);
        if (!a || !b) return std::nullopt;
        if (a->kind() == Value::Kind::bitvector || b->kind() == Value::Kind::bitvector) return std::nullopt;
        if (a->kind() == Value::Kind::boolean || b->kind() == Value::Kind::boolean) return std::nullopt;
        if (b->as_rational() == 0) return std::nullopt;
        return Value::real(a->as_rational() / b->as_rational());
    }
    if (e.is_call("_")) return read_indexed_bv(e);
    if (ch[0].is_call("as") && ch[0].children.size() >= 2 && ch[0].children[1].is_atom("const") && ch.size() == 2) {
        auto d = read_value(ch[1]);
        if (!d) return std::nullopt;
        return Value::array(*d);
    }
    if (e.is_call("store") && ch.size() == 4) {
        auto a = read_value(ch[1]);
        auto k = read_value(ch[2]);
        auto v = read_value(ch[3]);
        if (!a || !k || !v || a->kind() != Value::Kind::array) return std::nullopt;
        a->array_store(*k, *v);
        return a;
    }
    if (e.is_call("lambda")) return read_lambda(e);
    return std::nullopt;
}

ModelParse parse_model(const SExpr& model, const std::set<std::string>* only) {
    ModelParse out;
    if (!model.is_list()) return out;
    std::size_t first = model.is_call("model") ? 1 : 0;
    for (std::size_t i = first; i < model.children.size(); ++i) {
        const SExpr& entry = model.children[i];
        if (!entry.is_call("define-fun") || entry.children.size() != 5 || !entry.children[1].is_atom()) continue;
        std::string name = symbol_name(entry.children[1].atom);
        if (only && !only->count(name)) continue;
        if (!entry.children[2].is_list() || !entry.children[2].children.empty()) {
            out.skipped.push_back(name + ": function with arguments");
            continue;
        }
        auto v = read_value(entry.children[4]);
        if (!v) {
            std::string shape = to_string(entry.children[4]);
            if (shape.size() > 80) shape = shape.substr(0, 77) + "...";
            out.skipped.push_back(name + ": unrecognized value " + shape);
            continue;
        }
        if (entry.children[3].is_atom("Real") && v->kind() == Value::Kind::integer) v = Value::real(v->as_rational());
        out.values.insert_or_assign(name, *v);
    }
    return out;
}

Json to_json(const std::map<std::string, Value>& values) {
    Json j = Json::object();
    for (const auto& [k, v] : values) j[k] = v.to_json();
    return j;
}

// --- evaluation -------------------------------------------------------------

void Evaluator::add_definitions(const std::vector<Command>& commands) {
    for (const auto& c : commands) {
        if (c.name != "define-fun" || c.form.children.size() != 5) continue;
        const auto& ch = c.form.children;
        Macro m;
        for (const auto& p : ch[2].children)
            if (p.is_list() && !p.children.empty()) m.params.push_back(symbol_name(p.children[0].atom));
        m.body = ch[4];
        macros_.insert_or_assign(symbol_name(ch[1].atom), std::move(m));
    }
}

Value Evaluator::eval(const SExpr& term) const {
    std::vector<std::map<std::string, Value>> env;
    return eval(term, env);
}

Value Evaluator::eval(const SExpr& t, std::vector<std::map<std::string, Value>>& env) const {
    if (t.is_atom()) {
        if (auto lit = read_literal_atom(t.atom)) return *lit;
        std::string name = symbol_name(t.atom);
        for (auto it = env.rbegin(); it != env.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return f->second;
        }
        if (auto f = values_.find(name); f != values_.end()) return f->second;
        if (auto m = macros_.find(name); m != macros_.end() && m->second.params.empty()) {
            std::vector<std::map<std::string, Value>> fresh;
            return eval(m->second.body, fresh);
        }
        throw EvalError("no value for symbol " + name);
    }
    const auto& ch = t.children;
    if (ch.empty()) throw EvalError("empty term");
    const SExpr& head = ch[0];
    if (head.is_atom()) {
        const std::string& h = head.atom;
        if (h == "_") {
            if (auto v = read_indexed_bv(t)) return *v;
            throw EvalError("unsupported indexed term " + to_string(t));
        }
        if (h == "ite") {
            if (ch.size() != 4) throw EvalError("ite expects 3 arguments");
            return eval(ch[1], env).as_bool() ? eval(ch[2], env) : eval(ch[3], env);
        }
        if (h == "let") {
            if (ch.size() != 3 || !ch[1].is_list()) throw EvalError("malformed let");
            std::map<std::string, Value> frame;
            for (const auto& b : ch[1].children) {
                if (!b.is_list() || b.children.size() != 2) throw EvalError("malformed let binding");
                frame.insert_or_assign(symbol_name(b.children[0].atom), eval(b.children[1], env));
            }
            env.push_back(std::move(frame));
            Value v = eval(ch[2], env);
            env.pop_back();
            return v;
        }
        if (h == "!") {
            if (ch.size() < 2) throw EvalError("malformed annotation");
            return eval(ch[1], env);
        }
        if (h == "forall" || h == "exists" || h == "lambda" || h == "match")
            throw EvalError(h + " is not supported by the evaluator");
    }
    std::vector<Value> args;
    args.reserve(ch.size() - 1);
    for (std::size_t i = 1; i < ch.size(); ++i) args.push_back(eval(ch[i], env));
    if (head.is_list()) {
        if (head.is_call("as") && head.children.size() >= 2 && head.children[1].is_atom("const")) {
            if (args.size() != 1) throw EvalError("const array expects one argument");
            return Value::array(args[0]);
        }
        if (head.is_call("_")) return apply_indexed(head, args);
        throw EvalError("unsupported operator " + to_string(head));
    }
    std::string op = symbol_name(head.atom);
    if (auto m = macros_.find(op); m != macros_.end()) {
        if (m->second.params.size() != args.size()) throw EvalError("wrong number of arguments to " + op);
        std::vector<std::map<std::string, Value>> fresh(1);
        for (std::size_t i = 0; i < args.size(); ++i) fresh[0].insert_or_assign(m->second.params[i], args[i]);
        return eval(m->second.body, fresh);
    }
    return apply(op, args, t);
}

namespace {

void need(const std::vector<Value>& a, std::size_t n, const std::string& op) {
    if (a.size() != n) throw EvalError(op + " expects " + std::to_string(n) + " arguments");
}

bool any_real(const std::vector<Value>& a) {
    for (const auto& v : a)
        if (v.kind() == Value::Kind::real) return true;
    return false;
}

// SMT-LIB integer division: remainder always in [0, |d|).
std::pair<BigInt, BigInt> euclid(const BigInt& n, const BigInt& d) {
    if (d == 0) throw EvalError("division by zero");
    BigInt r = n % d;
    if (r < 0) r += abs(d);
    return {(n - r) / d, r};
}

BigInt floor_rational(const Rational& r) {
    BigInt n = boost::multiprecision::numerator(r);
    BigInt d = boost::multiprecision::denominator(r);
    return euclid(n, d).first;
}

}  // namespace

Value Evaluator::apply(const std::string& op, const std::vector<Value>& a, const SExpr& at) const {
    using K = Value::Kind;
    // Core.
    if (op == "true") return Value::boolean(true);
    if (op == "false") return Value::boolean(false);
    if (op == "not") {
        need(a, 1, op);
        return Value::boolean(!a[0].as_bool());
    }
    if (op == "and" || op == "or" || op == "xor") {
        bool acc = op == "and";
        for (const auto& v : a) {
            bool b = v.as_bool();
            acc = op == "and" ? acc && b : op == "or" ? acc || b : acc != b;
        }
        return Value::boolean(acc);
    }
    if (op == "=>") {
        if (a.size() < 2) throw EvalError("=> expects at least 2 arguments");
        bool acc = a.back().as_bool();
        for (std::size_t i = a.size() - 1; i-- > 0;) acc = !a[i].as_bool() || acc;
        return Value::boolean(acc);
    }
    if (op == "=" || op == "distinct") {
        if (a.size() < 2) throw EvalError(op + " expects at least 2 arguments");
        auto eq = [&](const Value& x, const Value& y) {
            if ((x.kind() == K::integer || x.kind() == K::real) && (y.kind() == K::integer || y.kind() == K::real))
                return x.as_rational() == y.as_rational();
            return x == y;
        };
        if (op == "=") {
            for (std::size_t i = 1; i < a.size(); ++i)
                if (!eq(a[0], a[i])) return Value::boolean(false);
            return Value::boolean(true);
        }
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = i + 1; j < a.size(); ++j)
                if (eq(a[i], a[j])) return Value::boolean(false);
        return Value::boolean(true);
    }
    // Arrays.
    if (op == "select") {
        need(a, 2, op);
        return a[0].array_select(a[1]);
    }
    if (op == "store") {
        need(a, 3, op);
        Value arr = a[0];
        arr.array_store(a[1], a[2]);
        return arr;
    }
    // Arithmetic.
    if (op == "+" || op == "*" || (op == "-" && a.size() >= 2)) {
        if (a.size() < 2) throw EvalError(op + " expects at least 2 arguments");
        if (any_real(a)) {
            Rational acc = a[0].as_rational();
            for (std::size_t i = 1; i < a.size(); ++i)
                if (op == "+") acc += a[i].as_rational();
                else if (op == "-") acc -= a[i].as_rational();
                else acc *= a[i].as_rational();
            return Value::real(acc);
        }
        if (a[0].kind() != K::integer) throw EvalError(op + " expects numeric arguments");
        BigInt acc = a[0].as_int();
        for (std::size_t i = 1; i < a.size(); ++i) {
            if (a[i].kind() != K::integer) throw EvalError(op + " expects numeric arguments");
            if (op == "+") acc += a[i].as_int();
            else if (op == "-") acc -= a[i].as_int();
            else acc *= a[i].as_int();
        }
        return Value::integer(acc);
    }
    if (op == "-") {
        need(a, 1, op);
        if (a[0].kind() == K::real) return Value::real(-a[0].as_rational());
        if (a[0].kind() != K::integer) throw EvalError("- expects a numeric argument");
        return Value::integer(-a[0].as_int());
    }
    if (op == "/") {
        if (a.size() < 2) throw EvalError("/ expects at least 2 arguments");
        Rational acc = a[0].as_rational();
        for (std::size_t i = 1; i < a.size(); ++i) {
            Rational d = a[i].as_rational();
            if (d == 0) throw EvalError("division by zero");
            acc /= d;
        }
        return Value::real(acc);
    }
    if (op == "div" || op == "mod") {
        need(a, 2, op);
        if (a[0].kind() != K::integer || a[1].kind() != K::integer) throw EvalError(op + " expects Int arguments");
        auto [q, r] = euclid(a[0].as_int(), a[1].as_int());
        return Value::integer(op == "div" ? q : r);
    }
    if (op == "abs") {
        need(a, 1, op);
        if (a[0].kind() == K::real) return Value::real(abs(a[0].as_rational()));
        return Value::integer(abs(a[0].as_int()));
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
        if (a.size() < 2) throw EvalError(op + " expects at least 2 arguments");
        for (std::size_t i = 0; i + 1 < a.size(); ++i) {
            Rational x = a[i].as_rational();
            Rational y = a[i + 1].as_rational();
            bool ok = op == "<" ? x < y : op == "<=" ? x <= y : op == ">" ? x > y : x >= y;
            if (!ok) return Value::boolean(false);
        }
        return Value::boolean(true);
    }
    if (op == "to_real") {
        need(a, 1, op);
        return Value::real(a[0].as_rational());
    }
    if (op == "to_int") {
        need(a, 1, op);
        return Value::integer(floor_rational(a[0].as_rational()));
    }
    if (op == "is_int") {
        need(a, 1, op);
        return Value::boolean(boost::multiprecision::denominator(a[0].as_rational()) == 1);
    }
    // Bit-vectors.
    if (op.rfind("bv", 0) == 0 || op == "concat") {
        if (a.empty()) throw EvalError(op + " expects arguments");
        if (op == "bv2nat" || op == "bv2int") {
            need(a, 1, op);
            return Value::integer(a[0].as_int());
        }
        unsigned w = a[0].width();
        for (const auto& v : a)
            if (v.kind() != K::bitvector) throw EvalError(op + " expects bit-vector arguments");
        if (op == "concat") {
            BigInt acc = 0;
            unsigned total = 0;
            for (const auto& v : a) {
                acc = (acc << v.width()) | v.as_int();
                total += v.width();
            }
            return Value::bitvector(total, acc);
        }
        BigInt mask = pow2(w) - 1;
        if (op == "bvnot") {
            need(a, 1, op);
            return Value::bitvector(w, mask ^ a[0].as_int());
        }
        if (op == "bvneg") {
            need(a, 1, op);
            return Value::bitvector(w, -a[0].as_int());
        }
        for (const auto& v : a)
            if (v.width() != w) throw EvalError(op + " expects operands of equal width");
        if (op == "bvand" || op == "bvor" || op == "bvxor" || op == "bvadd" || op == "bvmul") {
            BigInt acc = a[0].as_int();
            for (std::size_t i = 1; i < a.size(); ++i) {
                const BigInt& x = a[i].as_int();
                if (op == "bvand") acc &= x;
                else if (op == "bvor") acc |= x;
                else if (op == "bvxor") acc ^= x;
                else if (op == "bvadd") acc = (acc + x) & mask;
                else acc = (acc * x) & mask;
            }
            return Value::bitvector(w, acc);
        }
        need(a, 2, op);
        const BigInt& x = a[0].as_int();
        const BigInt& y = a[1].as_int();
        BigInt sx = a[0].as_signed();
        BigInt sy = a[1].as_signed();
        if (op == "bvnand") return Value::bitvector(w, mask ^ (x & y));
        if (op == "bvnor") return Value::bitvector(w, mask ^ (x | y));
        if (op == "bvxnor") return Value::bitvector(w, mask ^ (x ^ y));
        if (op == "bvsub") return Value::bitvector(w, x - y);
        if (op == "bvudiv") return Value::bitvector(w, y == 0 ? mask : BigInt(x / y));
        if (op == "bvurem") return Value::bitvector(w, y == 0 ? x : BigInt(x % y));
        if (op == "bvsdiv") {
            if (sy == 0) return Value::bitvector(w, sx < 0 ? BigInt(1) : mask);
            return Value::bitvector(w, sx / sy);  // truncating
        }
        if (op == "bvsrem") {
            if (sy == 0) return Value::bitvector(w, x);
            return Value::bitvector(w, sx % sy);  // sign of dividend
        }
        if (op == "bvsmod") {
            if (sy == 0) return Value::bitvector(w, x);
            BigInt r = sx % sy;
            if (r != 0 && ((r < 0) != (sy < 0))) r += sy;
            return Value::bitvector(w, r);
        }
        if (op == "bvshl") return Value::bitvector(w, y >= w ? BigInt(0) : BigInt((x << static_cast<unsigned>(y)) & mask));
        if (op == "bvlshr") return Value::bitvector(w, y >= w ? BigInt(0) : BigInt(x >> static_cast<unsigned>(y)));
        if (op == "bvashr") {
            if (y >= w) return Value::bitvector(w, sx < 0 ? mask : BigInt(0));
            BigInt s = sx;
            unsigned k = static_cast<unsigned>(y);
            // Arithmetic shift as floor division.
            return Value::bitvector(w, euclid(s, pow2(k)).first);
        }
        if (op == "bvcomp") return Value::bitvector(1, x == y ? 1 : 0);
        if (op == "bvult") return Value::boolean(x < y);
        if (op == "bvule") return Value::boolean(x <= y);
        if (op == "bvugt") return Value::boolean(x > y);
        if (op == "bvuge") return Value::boolean(x >= y);
        if (op == "bvslt") return Value::boolean(sx < sy);
        if (op == "bvsle") return Value::boolean(sx <= sy);
        if (op == "bvsgt") return Value::boolean(sx > sy);
        if (op == "bvsge") return Value::boolean(sx >= sy);
    }
    throw EvalError("unsupported operator " + op + " in " + to_string(at));
}

Value Evaluator::apply_indexed(const SExpr& head, const std::vector<Value>& a) const {
    const auto& h = head.children;
    if (h.size() < 2 || !h[1].is_atom()) throw EvalError("malformed indexed operator");
    const std::string& op = h[1].atom;
    std::vector<unsigned> idx;
    for (std::size_t i = 2; i < h.size(); ++i) {
        auto v = index_arg(h[i]);
        if (!v) throw EvalError("bad index in " + to_string(head));
        idx.push_back(*v);
    }
    need(a, 1, op);
    if (op == "int2bv") {
        if (idx.size() != 1) throw EvalError("int2bv expects one index");
        return Value::bitvector(idx[0], a[0].as_int());
    }
    const Value& x = a[0];
    unsigned w = x.width();
    if (op == "extract") {
        if (idx.size() != 2 || idx[0] < idx[1] || idx[0] >= w) throw EvalError("bad extract indices");
        return Value::bitvector(idx[0] - idx[1] + 1, x.as_int() >> idx[1]);
    }
    if (idx.size() != 1) throw EvalError(op + " expects one index");
    unsigned k = idx[0];
    if (op == "zero_extend") return Value::bitvector(w + k, x.as_int());
    if (op == "sign_extend") return Value::bitvector(w + k, x.as_signed());
    if (op == "repeat") {
        if (k == 0) throw EvalError("repeat count must be positive");
        BigInt acc = 0;
        for (unsigned i = 0; i < k; ++i) acc = (acc << w) | x.as_int();
        return Value::bitvector(w * k, acc);
    }
    if (op == "rotate_left" || op == "rotate_right") {
        k %= w;
        if (op == "rotate_right") k = (w - k) % w;
        BigInt v = x.as_int();
        return Value::bitvector(w, (v << k) | (v >> (w - k)));
    }
    throw EvalError("unsupported indexed operator " + op);
}

WitnessCheck check_witness(const std::vector<Command>& commands, const std::map<std::string, Value>& values) {
    WitnessCheck out;
    Evaluator ev(values);
    ev.add_definitions(commands);
    for (const auto& c : commands) {
        if (c.name != "assert" || c.form.children.size() != 2) continue;
        ++out.checked;
        const SExpr& term = c.form.children[1];
        try {
            if (!ev.eval(term).as_bool()) out.violated.push_back(to_string(term));
        } catch (const EvalError& e) {
            out.unsupported.push_back(to_string(term) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace mcpsolver::smt
