// SPDX-License-Identifier: Apache-2.0
// Independent reference implementations used as test oracles.
#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcpsolver/sat/cnf.hpp"

namespace oracle {

using mcpsolver::sat::Clause;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline bool clause_true(const Clause& c, std::uint64_t bits) {
    for (int lit : c) {
        bool v = (bits >> (std::abs(lit) - 1)) & 1u;
        if ((lit > 0) == v) return true;
    }
    return false;
}

/// Truth-table satisfiability for at most 20 variables.
inline bool truth_table_sat(int num_vars, const std::vector<Clause>& clauses) {
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << num_vars); ++bits) {
        bool all = true;
        for (const auto& c : clauses)
            if (!clause_true(c, bits)) {
                all = false;
                break;
            }
        if (all) return true;
    }
    return false;
}

/// Number of assignments to variables 1..base that extend to a model,
/// searching the remaining variables depth-first. A clause is checked as
/// soon as its highest variable is assigned.
inline long projected_count(int base, int total, const std::vector<Clause>& clauses) {
    std::vector<std::vector<const Clause*>> closing(static_cast<std::size_t>(total) + 1);
    for (const auto& c : clauses) {
        int hi = 0;
        for (int lit : c) hi = std::max(hi, std::abs(lit));
        closing[static_cast<std::size_t>(hi)].push_back(&c);
    }
    std::vector<int> value(static_cast<std::size_t>(total) + 1, 0);
    auto ok_at = [&](int v) {
        for (const Clause* c : closing[static_cast<std::size_t>(v)]) {
            bool sat = false;
            for (int lit : *c)
                if ((lit > 0) == (value[static_cast<std::size_t>(std::abs(lit))] == 1)) {
                    sat = true;
                    break;
                }
            if (!sat) return false;
        }
        return true;
    };
    // Clauses with no variables (falsum) make everything unsat.
    if (!closing[0].empty()) return 0;
    auto extend = [&](auto&& self, int v) -> bool {
        if (v > total) return true;
        for (int b : {0, 1}) {
            value[static_cast<std::size_t>(v)] = b;
            if (ok_at(v) && self(self, v + 1)) return true;
        }
        return false;
    };
    long count = 0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << base); ++bits) {
        bool ok = true;
        for (int v = 1; v <= base && ok; ++v) {
            value[static_cast<std::size_t>(v)] = (bits >> (v - 1)) & 1u;
            ok = ok_at(v);
        }
        if (ok && extend(extend, base + 1)) ++count;
    }
    return count;
}

inline long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Pigeonhole principle PHP(p, h): p pigeons, h holes; unsat when p > h.
inline std::vector<Clause> pigeonhole(int pigeons, int holes) {
    auto var = [&](int p, int h) { return p * holes + h + 1; };
    std::vector<Clause> out;
    for (int p = 0; p < pigeons; ++p) {
        Clause c;
        for (int h = 0; h < holes; ++h) c.push_back(var(p, h));
        out.push_back(c);
    }
    for (int h = 0; h < holes; ++h)
        for (int p = 0; p < pigeons; ++p)
            for (int q = p + 1; q < pigeons; ++q) out.push_back({-var(p, h), -var(q, h)});
    return out;
}

/// Random CNF with 1..max_vars variables and 1..max_clauses clauses of
/// width 1..3 (duplicates and tautologies allowed).
inline std::pair<int, std::vector<Clause>> random_cnf(std::mt19937& rng, int max_vars, int max_clauses) {
    int n = std::uniform_int_distribution<int>(1, max_vars)(rng);
    int m = std::uniform_int_distribution<int>(1, max_clauses)(rng);
    std::vector<Clause> cs;
    for (int i = 0; i < m; ++i) {
        int w = std::uniform_int_distribution<int>(1, 3)(rng);
        Clause c;
        for (int j = 0; j < w; ++j) {
            int v = std::uniform_int_distribution<int>(1, n)(rng);
            c.push_back(std::bernoulli_distribution(0.5)(rng) ? v : -v);
        }
        cs.push_back(c);
    }
    return {n, cs};
}

}  // namespace oracle
