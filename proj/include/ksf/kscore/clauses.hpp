#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ksf/kscore/ksset.hpp"
#include "ksf/kscore/solver.hpp"

namespace ksf {

/// Second, independent colorability check through a CNF encoding. Variable
/// z_i is true when direction i takes the value 0. Each triad contributes
/// (z_i ∨ z_j ∨ z_k) and the three binary clauses ¬z_a ∨ ¬z_b.
class ClauseColorability {
public:
    explicit ClauseColorability(const KSSet& set) : nvars_(set.directions().size()) {
        for (const Triad& t : set.triads()) {
            clauses_.push_back({lit(t[0], true), lit(t[1], true), lit(t[2], true)});
            clauses_.push_back({lit(t[0], false), lit(t[1], false)});
            clauses_.push_back({lit(t[0], false), lit(t[2], false)});
            clauses_.push_back({lit(t[1], false), lit(t[2], false)});
        }
    }

    [[nodiscard]] std::size_t clause_count() const noexcept { return clauses_.size(); }

    /// DPLL with unit propagation; returns a model translated back to values.
    std::optional<Assignment> solve() {
        std::vector<std::int8_t> model(nvars_, -1);
        if (!dpll(model)) return std::nullopt;
        Assignment a;
        a.values.resize(nvars_);
        for (std::size_t i = 0; i < nvars_; ++i) a.values[i] = model[i] == 1 ? 0 : 1;
        return a;
    }

private:
    // Literal encoding: 2*var + (positive ? 0 : 1).
    static std::size_t lit(std::size_t var, bool positive) { return 2 * var + (positive ? 0 : 1); }

    static int eval(std::size_t l, const std::vector<std::int8_t>& model) {
        const std::int8_t v = model[l / 2];
        if (v < 0) return -1;
        return (l % 2 == 0) == (v == 1) ? 1 : 0;
    }

    bool dpll(std::vector<std::int8_t>& model) const {
        for (bool progress = true; progress;) {
            progress = false;
            for (const auto& clause : clauses_) {
                std::size_t unassigned = 0, last = 0;
                bool sat = false;
                for (std::size_t l : clause) {
                    const int e = eval(l, model);
                    if (e == 1) {
                        sat = true;
                        break;
                    }
                    if (e < 0) {
                        ++unassigned;
                        last = l;
                    }
                }
                if (sat) continue;
                if (unassigned == 0) return false;
                if (unassigned == 1) {
                    model[last / 2] = last % 2 == 0 ? 1 : 0;
                    progress = true;
                }
            }
        }
        std::size_t branch = nvars_;
        for (std::size_t v = 0; v < nvars_; ++v) {
            if (model[v] < 0) {
                branch = v;
                break;
            }
        }
        if (branch == nvars_) return true;
        for (std::int8_t val : {std::int8_t{1}, std::int8_t{0}}) {
            auto trial = model;
            trial[branch] = val;
            if (dpll(trial)) {
                model = std::move(trial);
                return true;
            }
        }
        return false;
    }

    std::size_t nvars_;
    std::vector<std::vector<std::size_t>> clauses_;
};

}  // namespace ksf
