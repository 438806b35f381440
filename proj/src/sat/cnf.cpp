// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/sat/cnf.hpp"

#include <cstdlib>
#include <sstream>

namespace mcpsolver::sat {

void encode_atmost(CnfBuilder& b, const std::vector<Lit>& lits, int k) {
    const int n = static_cast<int>(lits.size());
    if (k < 0) {
        b.add({});  // unsatisfiable bound
        return;
    }
    if (k == 0) {
        for (Lit x : lits) b.add({-x});
        return;
    }
    if (k >= n) return;

    // s[i][j]: register for "at least j+1 of lits[0..i] are true"
    std::vector<std::vector<int>> s(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(k)));
    for (auto& row : s)
        for (int& v : row) v = b.fresh();

    b.add({-lits[0], s[0][0]});
    for (int j = 1; j < k; ++j) b.add({-s[0][j]});
    for (int i = 1; i < n; ++i) {
        b.add({-lits[i], s[i][0]});
        b.add({-s[i - 1][0], s[i][0]});
        for (int j = 1; j < k; ++j) {
            b.add({-lits[i], -s[i - 1][j - 1], s[i][j]});
            b.add({-s[i - 1][j], s[i][j]});
        }
        b.add({-lits[i], -s[i - 1][k - 1]});
    }
}

void encode_atleast(CnfBuilder& b, const std::vector<Lit>& lits, int k) {
    std::vector<Lit> negated;
    negated.reserve(lits.size());
    for (Lit x : lits) negated.push_back(-x);
    encode_atmost(b, negated, static_cast<int>(lits.size()) - k);
}

void encode_exactly(CnfBuilder& b, const std::vector<Lit>& lits, int k) {
    encode_atmost(b, lits, k);
    encode_atleast(b, lits, k);
}

CnfFormula compile(const std::vector<SatItem>& items) {
    CnfFormula cnf;
    int next = 1;
    for (const auto& item : items)
        if (item.form == ItemForm::var_decl)
            for (const auto& l : item.literals)
                if (cnf.name_map.emplace(l.name, next).second) ++next;
    cnf.num_base_vars = next - 1;

    CnfBuilder b(next);
    auto lits_of = [&](const SatItem& item) {
        std::vector<Lit> lits;
        for (const auto& l : item.literals) {
            int v = cnf.name_map.at(l.name);
            lits.push_back(l.negated ? -v : v);
        }
        return lits;
    };
    for (const auto& item : items) {
        switch (item.form) {
            case ItemForm::var_decl: break;
            case ItemForm::clause: b.add(lits_of(item)); break;
            case ItemForm::atmost: encode_atmost(b, lits_of(item), item.k); break;
            case ItemForm::atleast: encode_atleast(b, lits_of(item), item.k); break;
            case ItemForm::exactly: encode_exactly(b, lits_of(item), item.k); break;
        }
    }
    cnf.num_aux_vars = b.next_var() - next;
    cnf.clauses = std::move(b.clauses());
    return cnf;
}

Json decode(const Assignment& assignment, const CnfFormula& cnf) {
    Json out = Json::object();
    // Report in variable order, which is declaration order.
    std::vector<const std::string*> by_var(static_cast<std::size_t>(cnf.num_base_vars) + 1, nullptr);
    for (const auto& [name, v] : cnf.name_map) by_var[static_cast<std::size_t>(v)] = &name;
    for (std::size_t v = 1; v < by_var.size(); ++v)
        if (by_var[v]) out[*by_var[v]] = v < assignment.size() && assignment[v];
    return out;
}

bool satisfies(const Assignment& assignment, const std::vector<Clause>& clauses) {
    for (const auto& c : clauses) {
        bool sat = false;
        for (Lit l : c) {
            auto v = static_cast<std::size_t>(std::abs(l));
            if (v < assignment.size() && assignment[v] == (l > 0)) {
                sat = true;
                break;
            }
        }
        if (!sat) return false;
    }
    return true;
}

std::string to_dimacs(const CnfFormula& cnf) {
    std::ostringstream os;
    std::vector<const std::string*> by_var(static_cast<std::size_t>(cnf.num_base_vars) + 1, nullptr);
    for (const auto& [name, v] : cnf.name_map) by_var[static_cast<std::size_t>(v)] = &name;
    for (std::size_t v = 1; v < by_var.size(); ++v)
        if (by_var[v]) os << "c " << *by_var[v] << " = " << v << '\n';
    os << "p cnf " << cnf.num_vars() << ' ' << cnf.clauses.size() << '\n';
    for (const auto& c : cnf.clauses) {
        for (Lit l : c) os << l << ' ';
        os << "0\n";
    }
    return os.str();
}

}  // namespace mcpsolver::sat
