#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ksf/error.hpp"
#include "ksf/geometry.hpp"

namespace ksf {

/// Three distinct direction indices, stored sorted.
class Triad {
public:
    Triad(std::size_t a, std::size_t b, std::size_t c) : idx_{a, b, c} {
        std::sort(idx_.begin(), idx_.end());
        if (idx_[0] == idx_[1] || idx_[1] == idx_[2]) {
            throw ValidationError("triad indices must be distinct");
        }
    }

    [[nodiscard]] std::size_t operator[](std::size_t m) const { return idx_[m]; }
    [[nodiscard]] const std::array<std::size_t, 3>& indices() const noexcept { return idx_; }
    [[nodiscard]] bool contains(std::size_t i) const noexcept {
        return idx_[0] == i || idx_[1] == i || idx_[2] == i;
    }

    auto operator<=>(const Triad&) const = default;

private:
    std::array<std::size_t, 3> idx_;
};

/// Enumerates all pairwise-orthogonal index triples, sorted lexicographically.
inline std::vector<Triad> find_triads(const std::vector<Direction>& dirs,
                                      double tol = kDefaultOrthogonalityTolerance) {
    const std::size_t n = dirs.size();
    std::vector<std::vector<std::size_t>> higher(n);  // orthogonal neighbours j > i, ascending
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (is_orthogonal(dirs[i], dirs[j], tol)) higher[i].push_back(j);
        }
    }
    std::vector<Triad> out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ni = higher[i];
        for (std::size_t a = 0; a < ni.size(); ++a) {
            const std::size_t j = ni[a];
            for (std::size_t b = a + 1; b < ni.size(); ++b) {
                const std::size_t k = ni[b];
                if (is_orthogonal(dirs[j], dirs[k], tol)) out.emplace_back(i, j, k);
            }
        }
    }
    return out;
}

/// A named list of switch positions together with the triads measured on them.
/// Immutable once built; construction validates orthogonality and uniqueness.
class KSSet {
public:
    KSSet(std::string name, double tolerance, std::vector<Direction> directions, std::vector<Triad> triads)
        : name_(std::move(name)), tolerance_(tolerance), directions_(std::move(directions)), triads_(std::move(triads)) {
        validate();
    }

    /// Triads are derived with find_triads.
    static KSSet from_directions(std::string name, std::vector<Direction> directions,
                                 double tolerance = kDefaultOrthogonalityTolerance) {
        auto triads = find_triads(directions, tolerance);
        return KSSet(std::move(name), tolerance, std::move(directions), std::move(triads));
    }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] double tolerance() const noexcept { return tolerance_; }
    [[nodiscard]] const std::vector<Direction>& directions() const noexcept { return directions_; }
    [[nodiscard]] const std::vector<Triad>& triads() const noexcept { return triads_; }
    /// Number of triads.
    [[nodiscard]] std::size_t size() const noexcept { return triads_.size(); }

    /// For each direction, the indices of the triads containing it.
    [[nodiscard]] std::vector<std::vector<std::size_t>> membership() const {
        std::vector<std::vector<std::size_t>> m(directions_.size());
        for (std::size_t t = 0; t < triads_.size(); ++t) {
            for (std::size_t i : triads_[t].indices()) m[i].push_back(t);
        }
        return m;
    }

    /// True when some direction is shared by two or more triads; a set without
    /// such sharing is trivially colorable.
    [[nodiscard]] bool has_shared_direction() const {
        for (const auto& m : membership()) {
            if (m.size() >= 2) return true;
        }
        return false;
    }

    /// Throws ValidationError unless the set has at least one triad.
    void require_triads() const {
        if (triads_.empty()) throw ValidationError("set '" + name_ + "' has no triads");
    }

private:
    void validate() const {
        if (!(tolerance_ >= 0.0) || !std::isfinite(tolerance_)) {
            throw ValidationError("tolerance must be a finite non-negative number");
        }
        for (std::size_t i = 0; i < directions_.size(); ++i) {
            for (std::size_t j = i + 1; j < directions_.size(); ++j) {
                if (same_ray(directions_[i], directions_[j])) {
                    throw ValidationError("directions " + std::to_string(i) + " and " + std::to_string(j) +
                                          " are the same ray");
                }
            }
        }
        std::set<Triad> seen;
        for (std::size_t t = 0; t < triads_.size(); ++t) {
            const Triad& tr = triads_[t];
            const std::string label = "triad " + std::to_string(t) + " [" + std::to_string(tr[0]) + "," +
                                      std::to_string(tr[1]) + "," + std::to_string(tr[2]) + "]";
            if (tr[2] >= directions_.size()) {
                throw ValidationError(label + " references a missing direction");
            }
            if (!is_orthogonal(directions_[tr[0]], directions_[tr[1]], tolerance_) ||
                !is_orthogonal(directions_[tr[0]], directions_[tr[2]], tolerance_) ||
                !is_orthogonal(directions_[tr[1]], directions_[tr[2]], tolerance_)) {
                throw ValidationError(label + " is not pairwise orthogonal");
            }
            if (!seen.insert(tr).second) throw ValidationError(label + " is a duplicate");
        }
    }

    std::string name_;
    double tolerance_;
    std::vector<Direction> directions_;
    std::vector<Triad> triads_;
};

namespace detail {

/// Index of the ray in dirs, appending it if new.
inline std::size_t find_or_add_ray(std::vector<Direction>& dirs, const Direction& d) {
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        if (same_ray(dirs[i], d)) return i;
    }
    dirs.push_back(d);
    return dirs.size() - 1;
}

}  // namespace detail

/// Rays of the Peres construction: orbits of (0,0,1), (0,1,1), (0,1,√2) and
/// (1,1,√2) under the 48 signed permutations of coordinates. 33 rays.
inline std::vector<Direction> generate_peres_directions() {
    const double r2 = std::sqrt(2.0);
    const std::array<Vec3, 4> seeds = {Vec3(0, 0, 1), Vec3(0, 1, 1), Vec3(0, 1, r2), Vec3(1, 1, r2)};
    std::vector<Direction> out;
    std::array<int, 3> perm{0, 1, 2};
    for (const Vec3& s : seeds) {
        std::sort(perm.begin(), perm.end());
        do {
            for (int signs = 0; signs < 8; ++signs) {
                Vec3 v;
                for (int c = 0; c < 3; ++c) {
                    v[c] = ((signs >> c) & 1 ? -1.0 : 1.0) * s[perm[c]];
                }
                detail::find_or_add_ray(out, normalize(v));
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    if (out.size() != 33) throw NumericalError("Peres construction produced an unexpected ray count");
    return out;
}

/// Adds a completing ray and triad for every orthogonal pair that is not yet
/// inside a common triad, repeating until no such pair remains. Existing
/// directions and triads keep their indices; new triads are appended.
inline KSSet triad_complete(const KSSet& set, int max_rounds = 16) {
    std::vector<Direction> dirs = set.directions();
    std::vector<Triad> triads = set.triads();
    const double tol = set.tolerance();
    std::set<Triad> have(triads.begin(), triads.end());

    for (int round = 0; round < max_rounds; ++round) {
        std::set<std::pair<std::size_t, std::size_t>> covered;
        for (const Triad& t : triads) {
            covered.emplace(t[0], t[1]);
            covered.emplace(t[0], t[2]);
            covered.emplace(t[1], t[2]);
        }
        std::vector<std::pair<std::size_t, std::size_t>> open;
        const std::size_t n = dirs.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (is_orthogonal(dirs[i], dirs[j], tol) && !covered.contains({i, j})) open.emplace_back(i, j);
            }
        }
        if (open.empty()) return KSSet(set.name(), tol, std::move(dirs), std::move(triads));
        for (auto [i, j] : open) {
            const std::size_t k = detail::find_or_add_ray(dirs, cross_complete(dirs[i], dirs[j]));
            Triad t(i, j, k);
            // A pair may be closed by an earlier pair's triad in this round.
            if (have.insert(t).second) triads.push_back(t);
        }
    }
    throw NumericalError("triad_complete: no fixpoint within " + std::to_string(max_rounds) + " rounds");
}

inline KSSet peres_set() { return KSSet::from_directions("peres-33", generate_peres_directions()); }

inline KSSet peres_completed_set() {
    KSSet s = triad_complete(peres_set());
    return KSSet("peres-33-completed", s.tolerance(), s.directions(), s.triads());
}

}  // namespace ksf
