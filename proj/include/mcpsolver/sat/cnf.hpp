// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "mcpsolver/json.hpp"
#include "mcpsolver/sat/items.hpp"

namespace mcpsolver::sat {

/// DIMACS literal: +v or -v with v >= 1.
using Lit = int;
using Clause = std::vector<Lit>;

struct CnfFormula {
    int num_base_vars = 0;
    int num_aux_vars = 0;
    std::vector<Clause> clauses;
    std::map<std::string, int> name_map;  // named variables only

    int num_vars() const { return num_base_vars + num_aux_vars; }
    bool operator==(const CnfFormula&) const = default;
};

/// Allocates fresh variables and collects clauses; shared by the item
/// compiler and the cardinality encoders.
class CnfBuilder {
public:
    explicit CnfBuilder(int first_free_var = 1) : next_var_(first_free_var) {}

    int fresh() { return next_var_++; }
    void add(Clause c) { clauses_.push_back(std::move(c)); }
    int next_var() const { return next_var_; }
    std::vector<Clause>& clauses() { return clauses_; }

private:
    int next_var_;
    std::vector<Clause> clauses_;
};

/// Sequential-counter (Sinz 2005) encoding of sum(lits) <= k. Uses
/// |lits|*k register variables s(i,j) meaning "at least j of the first i
/// literals are true". k = 0 forces every literal false; k >= |lits|
/// adds nothing.
void encode_atmost(CnfBuilder& b, const std::vector<Lit>& lits, int k);

/// sum(lits) >= k, as atmost(|lits| - k) over the negated literals.
void encode_atleast(CnfBuilder& b, const std::vector<Lit>& lits, int k);

void encode_exactly(CnfBuilder& b, const std::vector<Lit>& lits, int k);

/// Maps declared names to variables 1..n in declaration order, then emits
/// clauses and cardinality encodings in item order. Deterministic.
CnfFormula compile(const std::vector<SatItem>& items);

/// Assignment indexed by variable id (index 0 unused).
using Assignment = std::vector<bool>;

/// name -> value for named variables only.
Json decode(const Assignment& assignment, const CnfFormula& cnf);

bool satisfies(const Assignment& assignment, const std::vector<Clause>& clauses);

/// "p cnf V C" followed by one 0-terminated clause per line. Named
/// variables are listed as "c name = v" comment lines.
std::string to_dimacs(const CnfFormula& cnf);

}  // namespace mcpsolver::sat
