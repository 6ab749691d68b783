#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ksf/error.hpp"
#include "ksf/kscore/ksset.hpp"
#include "ksf/kscore/solver.hpp"

namespace ksf {

/// Non-contextual hidden-variable model on a finite sample space. Each point
/// stands for a joint (system, apparatus) hidden state and fixes a value for
/// every switch position, regardless of which triad it is measured in.
class HVModel {
public:
    struct Point {
        double weight;
        Assignment assignment;
    };

    explicit HVModel(std::vector<Point> points) : points_(std::move(points)) {
        if (points_.empty()) throw InvalidConfig("hidden-variable model has no points");
        double total = 0.0;
        for (const Point& p : points_) {
            if (!(p.weight >= 0.0) || !std::isfinite(p.weight)) {
                throw InvalidConfig("hidden-variable weights must be non-negative");
            }
            for (std::uint8_t v : p.assignment.values) {
                if (v > 1) throw InvalidConfig("hidden-variable values must be 0 or 1");
            }
            total += p.weight;
        }
        if (std::abs(total - 1.0) > 1e-12) throw InvalidConfig("hidden-variable weights must sum to 1");
        cumulative_.reserve(points_.size());
        double acc = 0.0;
        for (const Point& p : points_) cumulative_.push_back(acc += p.weight);
    }

    [[nodiscard]] const std::vector<Point>& points() const noexcept { return points_; }

    /// Throws IncompleteModel unless every point values every direction of set.
    void require_covers(const KSSet& set) const {
        for (std::size_t p = 0; p < points_.size(); ++p) {
            if (points_[p].assignment.values.size() < set.directions().size()) {
                throw IncompleteModel("hidden-variable point " + std::to_string(p) + " lacks values for " +
                                      std::to_string(set.directions().size() - points_[p].assignment.values.size()) +
                                      " directions");
            }
        }
    }

    /// Point index for a uniform draw u in [0,1).
    [[nodiscard]] std::size_t locate(double u) const {
        const double target = u * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
        if (it == cumulative_.end()) --it;
        return static_cast<std::size_t>(it - cumulative_.begin());
    }

private:
    std::vector<Point> points_;
    std::vector<double> cumulative_;
};

/// The exclusion threshold 1/N. Only meaningful for an uncolorable set.
inline double epsilon_threshold(const KSSet& set) {
    set.require_triads();
    if (is_colorable(set).colorable()) {
        throw ColorableSet("set '" + set.name() + "' admits a value assignment; no threshold applies");
    }
    return 1.0 / static_cast<double>(set.size());
}

/// Lower bound on the measure of the intersection of the success sets:
/// max(0, 1 - Σ eps_k).
inline double union_bound_lower(std::span<const double> eps_per_triad) {
    double sum = 0.0;
    for (double e : eps_per_triad) sum += e;
    return std::max(0.0, 1.0 - sum);
}

/// ε_k for each triad: total weight of points whose values break the sum rule there.
inline std::vector<double> nchv_failure_probs(const HVModel& model, const KSSet& set) {
    model.require_covers(set);
    std::vector<double> eps(set.size(), 0.0);
    for (const auto& p : model.points()) {
        for (std::size_t t = 0; t < set.size(); ++t) {
            if (!triad_satisfied(set.triads()[t], p.assignment)) eps[t] += p.weight;
        }
    }
    return eps;
}

/// Weight of the points that satisfy every triad at once.
inline double intersection_measure(const HVModel& model, const KSSet& set) {
    model.require_covers(set);
    double m = 0.0;
    for (const auto& p : model.points()) {
        if (count_violations(set, p.assignment) == 0) m += p.weight;
    }
    return m;
}

}  // namespace ksf
