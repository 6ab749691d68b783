#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "ksf/kscore/ksset.hpp"

namespace ksf {

/// {0,1} value per direction index, the value S^2 takes at that switch position.
struct Assignment {
    std::vector<std::uint8_t> values;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// The sum rule on one triad: exactly one of the three values is 0.
inline bool triad_satisfied(std::uint8_t a, std::uint8_t b, std::uint8_t c) noexcept {
    return a + b + c == 2;
}

inline bool triad_satisfied(const Triad& t, const Assignment& a) {
    return triad_satisfied(a.values.at(t[0]), a.values.at(t[1]), a.values.at(t[2]));
}

inline std::size_t count_violations(const KSSet& set, const Assignment& a) {
    std::size_t n = 0;
    for (const Triad& t : set.triads()) n += triad_satisfied(t, a) ? 0 : 1;
    return n;
}

struct ColorabilityReport {
    /// Present iff the set is colorable.
    std::optional<Assignment> witness;
    std::uint64_t nodes_explored = 0;
    double elapsed_seconds = 0.0;

    [[nodiscard]] bool colorable() const noexcept { return witness.has_value(); }
};

/// Depth-first search over {0,1} assignments that counts violated triads.
///
/// find_below(limit) looks for an assignment violating fewer than `limit`
/// triads. While violations can still be afforded the search branches freely;
/// once the budget is exhausted every remaining triad becomes a hard constraint
/// and unit propagation kicks in (one 0 forces the other two to 1, two 1s force
/// the third to 0). With limit = 1 this is the plain colorability search.
class TriadSearch {
public:
    explicit TriadSearch(const KSSet& set)
        : set_(set), membership_(set.membership()), value_(set.directions().size(), kUnset),
          zeros_(set.size(), 0), ones_(set.size(), 0), violated_(set.size(), 0) {
        order_.resize(value_.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            return membership_[a].size() > membership_[b].size();
        });
    }

    struct Found {
        Assignment assignment;
        std::size_t violations;
    };

    std::optional<Found> find_below(std::size_t limit) {
        limit_ = limit;
        found_.reset();
        if (limit_ == 0) return std::nullopt;
        dfs();
        return found_;
    }

    [[nodiscard]] std::uint64_t nodes() const noexcept { return nodes_; }

private:
    static constexpr std::int8_t kUnset = -1;

    bool dfs() {
        const std::size_t mark = trail_.size();
        bool ok = violated_count_ < limit_;
        if (ok && violated_count_ + 1 == limit_) ok = propagate();
        if (ok) {
            const auto next = std::find_if(order_.begin(), order_.end(),
                                           [&](std::size_t v) { return value_[v] == kUnset; });
            if (next == order_.end()) {
                record();
                undo(mark);
                return true;
            }
            const std::size_t var = *next;
            const std::int8_t first = cost_of(var, 0) <= cost_of(var, 1) ? 0 : 1;
            for (std::int8_t val : {first, static_cast<std::int8_t>(1 - first)}) {
                ++nodes_;
                const std::size_t inner = trail_.size();
                assign(var, val);
                const bool hit = dfs();
                undo(inner);
                if (hit) {
                    undo(mark);
                    return true;
                }
            }
        }
        undo(mark);
        return false;
    }

    /// Forces values implied by treating every unviolated triad as hard.
    /// Returns false on a conflict (a forced value violates a triad).
    bool propagate() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t t = 0; t < set_.size(); ++t) {
                if (violated_[t]) continue;
                const auto& idx = set_.triads()[t].indices();
                const int assigned = zeros_[t] + ones_[t];
                if (assigned == 3) continue;
                std::int8_t forced;
                if (zeros_[t] == 1) {
                    forced = 1;
                } else if (ones_[t] == 2) {
                    forced = 0;
                } else {
                    continue;
                }
                for (std::size_t v : idx) {
                    if (value_[v] == kUnset) assign(v, forced);
                }
                if (violated_count_ >= limit_) return false;
                changed = true;
            }
        }
        return true;
    }

    [[nodiscard]] int cost_of(std::size_t var, std::int8_t val) const {
        int c = 0;
        for (std::size_t t : membership_[var]) {
            if (violated_[t]) continue;
            const int z = zeros_[t] + (val == 0);
            const int o = ones_[t] + (val == 1);
            c += (z >= 2 || o == 3) ? 1 : 0;
        }
        return c;
    }

    void assign(std::size_t var, std::int8_t val) {
        value_[var] = val;
        trail_.push_back(var);
        for (std::size_t t : membership_[var]) {
            (val == 0 ? zeros_[t] : ones_[t]) += 1;
            const bool now = zeros_[t] >= 2 || ones_[t] == 3;
            if (now && !violated_[t]) {
                violated_[t] = 1;
                ++violated_count_;
            }
        }
    }

    void undo(std::size_t mark) {
        while (trail_.size() > mark) {
            const std::size_t var = trail_.back();
            trail_.pop_back();
            for (std::size_t t : membership_[var]) {
                (value_[var] == 0 ? zeros_[t] : ones_[t]) -= 1;
                const bool now = zeros_[t] >= 2 || ones_[t] == 3;
                if (!now && violated_[t]) {
                    violated_[t] = 0;
                    --violated_count_;
                }
            }
            value_[var] = kUnset;
        }
    }

    void record() {
        Assignment a;
        a.values.assign(value_.begin(), value_.end());
        found_ = Found{std::move(a), violated_count_};
    }

    const KSSet& set_;
    std::vector<std::vector<std::size_t>> membership_;
    std::vector<std::size_t> order_;
    std::vector<std::int8_t> value_;
    std::vector<std::uint8_t> zeros_, ones_, violated_;
    std::vector<std::size_t> trail_;
    std::size_t violated_count_ = 0;
    std::size_t limit_ = 1;
    std::uint64_t nodes_ = 0;
    std::optional<Found> found_;
};

/// Complete search for an assignment with exactly one 0 on every triad. A
/// returned witness has been re-checked against every triad.
inline ColorabilityReport is_colorable(const KSSet& set) {
    const auto start = std::chrono::steady_clock::now();
    TriadSearch search(set);
    auto found = search.find_below(1);
    ColorabilityReport report;
    report.nodes_explored = search.nodes();
    if (found) {
        if (count_violations(set, found->assignment) != 0) {
            throw NumericalError("solver produced a witness that violates a triad");
        }
        report.witness = std::move(found->assignment);
    }
    report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

struct MinViolation {
    std::size_t count = 0;
    Assignment witness;
    std::uint64_t nodes_explored = 0;
};

/// Branch and bound: each round asks for an assignment strictly better than
/// the incumbent until none exists.
inline MinViolation min_violation_witness(const KSSet& set) {
    TriadSearch search(set);
    MinViolation best;
    best.count = set.size() + 1;
    while (best.count > 0) {
        auto found = search.find_below(best.count);
        if (!found) break;
        best.count = found->violations;
        best.witness = std::move(found->assignment);
    }
    best.nodes_explored = search.nodes();
    if (count_violations(set, best.witness) != best.count) {
        throw NumericalError("branch and bound witness does not match its violation count");
    }
    return best;
}

inline std::size_t min_violated_triads(const KSSet& set) { return min_violation_witness(set).count; }

}  // namespace ksf
