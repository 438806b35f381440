// SPDX-License-Identifier: Apache-2.0
#include "mcpsolver/sat/solver.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace mcpsolver::sat {

namespace {

// Internal literal: 2*v for +v, 2*v+1 for -v.
inline int encode(Lit l) { return l > 0 ? 2 * l : 2 * (-l) + 1; }
inline Lit external(int l) { return (l & 1) ? -(l >> 1) : (l >> 1); }
inline int var_of(int l) { return l >> 1; }
inline int neg(int l) { return l ^ 1; }

constexpr signed char kUnassigned = -1;

long luby(long i) {
    // 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
    long size = 1, seq = 0;
    while (size < i + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != i) {
        size = (size - 1) >> 1;
        --seq;
        i = i % size;
    }
    return 1L << seq;
}

class Cdcl {
public:
    Cdcl(int num_vars, const SolverOptions& opts) : n_(num_vars), opts_(opts) {
        const auto nv = static_cast<std::size_t>(n_) + 1;
        value_.assign(nv, kUnassigned);
        level_.assign(nv, 0);
        reason_.assign(nv, -1);
        phase_.assign(nv, 0);
        seen_.assign(nv, 0);
        rank_.assign(nv, 0);
        occurrences_.assign(nv, 0);
        watches_.assign(2 * nv, {});
    }

    // Returns false when the input already contains the empty clause or
    // contradicting units.
    bool load(const std::vector<Clause>& input) {
        for (const auto& c : input) {
            std::vector<int> lits;
            lits.reserve(c.size());
            for (Lit l : c) {
                if (l == 0 || std::abs(l) > n_) throw std::invalid_argument("literal out of range: " + std::to_string(l));
                lits.push_back(encode(l));
            }
            std::sort(lits.begin(), lits.end());
            lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
            bool tautology = false;
            for (std::size_t i = 1; i < lits.size(); ++i)
                if (lits[i] == neg(lits[i - 1])) tautology = true;
            if (tautology) continue;
            for (int l : lits) ++occurrences_[static_cast<std::size_t>(var_of(l))];
            if (lits.empty()) return ok_ = false;
            if (lits.size() == 1) {
                units_.push_back(lits[0]);
                continue;
            }
            add_clause(std::move(lits), false);
        }
        // Branching order: most occurrences first, then lowest id.
        order_.resize(static_cast<std::size_t>(n_));
        std::iota(order_.begin(), order_.end(), 1);
        std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
            return occurrences_[static_cast<std::size_t>(a)] > occurrences_[static_cast<std::size_t>(b)];
        });
        for (std::size_t i = 0; i < order_.size(); ++i) rank_[static_cast<std::size_t>(order_[i])] = static_cast<int>(i);
        return enqueue_units();
    }

    SolveResult run(std::optional<std::chrono::steady_clock::time_point> deadline) {
        SolveResult res;
        if (!ok_) {
            res.verdict = Verdict::unsat;
            return finish(res);
        }
        long restart_index = 0;
        long conflicts_until_restart = opts_.restart_base * luby(restart_index);

        for (;;) {
            int conflict = propagate();
            if (conflict >= 0) {
                ++stats_.conflicts;
                if (decision_level() == 0) {
                    res.verdict = Verdict::unsat;
                    return finish(res);
                }
                if (opts_.learning) {
                    learn_from(conflict);
                    --conflicts_until_restart;
                } else if (!flip_last_decision()) {
                    res.verdict = Verdict::unsat;
                    return finish(res);
                }
                continue;
            }

            if (opts_.learning && conflicts_until_restart <= 0) {
                ++stats_.restarts;
                if (deadline && std::chrono::steady_clock::now() >= *deadline) return finish(res);
                backtrack(0);
                reduce_learned();
                conflicts_until_restart = opts_.restart_base * luby(++restart_index);
                continue;
            }

            int v = pick_branch_var();
            if (v == 0) {
                res.verdict = Verdict::sat;
                Assignment a(static_cast<std::size_t>(n_) + 1, false);
                for (int x = 1; x <= n_; ++x) a[static_cast<std::size_t>(x)] = value_[static_cast<std::size_t>(x)] == 1;
                res.assignment = std::move(a);
                return finish(res);
            }
            if (deadline && std::chrono::steady_clock::now() >= *deadline) return finish(res);
            ++stats_.decisions;
            trail_lim_.push_back(static_cast<int>(trail_.size()));
            flipped_.push_back(false);
            assign(phase_[static_cast<std::size_t>(v)] ? 2 * v : 2 * v + 1, -1);
        }
    }

private:
    struct StoredClause {
        std::vector<int> lits;
        bool learned = false;
        bool deleted = false;
    };

    int n_;
    SolverOptions opts_;
    bool ok_ = true;
    std::vector<StoredClause> clauses_;
    std::vector<std::vector<int>> watches_;  // internal literal -> clause ids watching it
    std::vector<int> units_;
    std::vector<signed char> value_;  // per variable: -1, 0, 1
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<char> phase_;
    std::vector<char> seen_;
    std::vector<int> trail_;
    std::vector<int> trail_lim_;
    std::vector<bool> flipped_;  // per decision level, DPLL mode
    std::size_t qhead_ = 0;
    std::vector<int> order_;
    std::vector<int> rank_;
    std::vector<long> occurrences_;
    std::size_t order_pos_ = 0;
    std::size_t learned_count_ = 0;
    std::size_t learned_limit_ = 20000;
    SolveStats stats_;
    std::vector<Clause> learned_log_;

    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    // 1 true, 0 false, -1 unassigned
    int lit_value(int l) const {
        signed char v = value_[static_cast<std::size_t>(var_of(l))];
        if (v == kUnassigned) return -1;
        return (l & 1) ? 1 - v : v;
    }

    SolveResult& finish(SolveResult& r) {
        r.stats = stats_;
        if (opts_.record_learned) r.learned = std::move(learned_log_);
        return r;
    }

    int add_clause(std::vector<int> lits, bool learned) {
        int id = static_cast<int>(clauses_.size());
        watches_[static_cast<std::size_t>(lits[0])].push_back(id);
        watches_[static_cast<std::size_t>(lits[1])].push_back(id);
        clauses_.push_back({std::move(lits), learned, false});
        if (learned) ++learned_count_;
        return id;
    }

    bool enqueue_units() {
        for (int l : units_) {
            int val = lit_value(l);
            if (val == 0) return ok_ = false;
            if (val == -1) assign(l, -1);
        }
        return true;
    }

    void assign(int l, int reason) {
        auto v = static_cast<std::size_t>(var_of(l));
        value_[v] = (l & 1) ? 0 : 1;
        level_[v] = decision_level();
        reason_[v] = reason;
        trail_.push_back(l);
    }

    int propagate() {
        while (qhead_ < trail_.size()) {
            int p = trail_[qhead_++];
            int false_lit = neg(p);
            auto& ws = watches_[static_cast<std::size_t>(false_lit)];
            std::size_t i = 0, j = 0;
            while (i < ws.size()) {
                int cid = ws[i++];
                auto& c = clauses_[static_cast<std::size_t>(cid)];
                if (c.deleted) continue;
                auto& lits = c.lits;
                if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
                if (lit_value(lits[0]) == 1) {
                    ws[j++] = cid;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < lits.size(); ++k) {
                    if (lit_value(lits[k]) != 0) {
                        std::swap(lits[1], lits[k]);
                        watches_[static_cast<std::size_t>(lits[1])].push_back(cid);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                ws[j++] = cid;
                if (lit_value(lits[0]) == 0) {
                    while (i < ws.size()) ws[j++] = ws[i++];
                    ws.resize(j);
                    qhead_ = trail_.size();
                    return cid;
                }
                ++stats_.propagations;
                assign(lits[0], cid);
            }
            ws.resize(j);
        }
        return -1;
    }

    void backtrack(int level) {
        if (decision_level() <= level) return;
        auto stop = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(level)]);
        for (std::size_t i = trail_.size(); i-- > stop;) {
            auto v = static_cast<std::size_t>(var_of(trail_[i]));
            phase_[v] = value_[v] == 1;
            value_[v] = kUnassigned;
            reason_[v] = -1;
            order_pos_ = std::min(order_pos_, static_cast<std::size_t>(rank_[v]));
        }
        trail_.resize(stop);
        trail_lim_.resize(static_cast<std::size_t>(level));
        flipped_.resize(static_cast<std::size_t>(level));
        qhead_ = trail_.size();
    }

    int pick_branch_var() {
        while (order_pos_ < order_.size()) {
            int v = order_[order_pos_];
            if (value_[static_cast<std::size_t>(v)] == kUnassigned) return v;
            ++order_pos_;
        }
        return 0;
    }

    void learn_from(int conflict) {
        std::vector<int> learnt{0};
        int path = 0;
        int p = -1;
        auto idx = static_cast<long>(trail_.size()) - 1;
        int cid = conflict;
        const int current = decision_level();
        do {
            for (int q : clauses_[static_cast<std::size_t>(cid)].lits) {
                if (p >= 0 && q == p) continue;
                auto v = static_cast<std::size_t>(var_of(q));
                if (seen_[v] || level_[v] == 0) continue;
                seen_[v] = 1;
                if (level_[v] == current)
                    ++path;
                else
                    learnt.push_back(q);
            }
            while (!seen_[static_cast<std::size_t>(var_of(trail_[static_cast<std::size_t>(idx)]))]) --idx;
            p = trail_[static_cast<std::size_t>(idx)];
            --idx;
            cid = reason_[static_cast<std::size_t>(var_of(p))];
            seen_[static_cast<std::size_t>(var_of(p))] = 0;
            --path;
        } while (path > 0);
        learnt[0] = neg(p);
        for (std::size_t i = 1; i < learnt.size(); ++i) seen_[static_cast<std::size_t>(var_of(learnt[i]))] = 0;

        int back = 0;
        if (learnt.size() > 1) {
            std::size_t max_i = 1;
            for (std::size_t i = 2; i < learnt.size(); ++i)
                if (level_[static_cast<std::size_t>(var_of(learnt[i]))] >
                    level_[static_cast<std::size_t>(var_of(learnt[max_i]))])
                    max_i = i;
            std::swap(learnt[1], learnt[max_i]);
            back = level_[static_cast<std::size_t>(var_of(learnt[1]))];
        }
        if (opts_.record_learned) {
            Clause ext;
            for (int l : learnt) ext.push_back(external(l));
            learned_log_.push_back(std::move(ext));
        }
        backtrack(back);
        if (learnt.size() == 1) {
            units_.push_back(learnt[0]);
            assign(learnt[0], -1);
        } else {
            int first = learnt[0];
            int id = add_clause(std::move(learnt), true);
            assign(first, id);
        }
    }

    // DPLL: undo to the deepest decision not yet tried both ways and take
    // its other branch. False when every decision has been flipped.
    bool flip_last_decision() {
        int level = decision_level();
        while (level > 0 && flipped_[static_cast<std::size_t>(level - 1)]) --level;
        if (level == 0) return false;
        int decision = trail_[static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(level - 1)])];
        backtrack(level - 1);
        trail_lim_.push_back(static_cast<int>(trail_.size()));
        flipped_.push_back(true);
        assign(neg(decision), -1);
        return true;
    }

    // Called at level 0 only: no reason above level 0 can be invalidated.
    void reduce_learned() {
        if (learned_count_ < learned_limit_) return;
        std::vector<int> ids;
        for (std::size_t i = 0; i < clauses_.size(); ++i)
            if (clauses_[i].learned && !clauses_[i].deleted && clauses_[i].lits.size() > 2)
                ids.push_back(static_cast<int>(i));
        std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
            return clauses_[static_cast<std::size_t>(a)].lits.size() > clauses_[static_cast<std::size_t>(b)].lits.size();
        });
        for (std::size_t i = 0; i < ids.size() / 2; ++i) {
            clauses_[static_cast<std::size_t>(ids[i])].deleted = true;
            --learned_count_;
        }
        std::vector<StoredClause> kept;
        kept.reserve(clauses_.size());
        for (auto& c : clauses_)
            if (!c.deleted) kept.push_back(std::move(c));
        clauses_ = std::move(kept);
        for (auto& w : watches_) w.clear();
        for (std::size_t i = 0; i < clauses_.size(); ++i) {
            watches_[static_cast<std::size_t>(clauses_[i].lits[0])].push_back(static_cast<int>(i));
            watches_[static_cast<std::size_t>(clauses_[i].lits[1])].push_back(static_cast<int>(i));
        }
        std::fill(reason_.begin(), reason_.end(), -1);
        learned_limit_ += learned_limit_ / 2;
    }
};

}  // namespace

SolveResult solve(int num_vars, const std::vector<Clause>& clauses,
                  std::optional<std::chrono::steady_clock::time_point> deadline, const SolverOptions& options) {
    if (num_vars < 0) throw std::invalid_argument("negative variable count");
    Cdcl cdcl(num_vars, options);
    cdcl.load(clauses);
    SolveResult r = cdcl.run(deadline);
    if (r.verdict == Verdict::sat && !satisfies(*r.assignment, clauses))
        throw std::logic_error("internal error: SAT assignment does not satisfy the formula");
    return r;
}

}  // namespace mcpsolver::sat
