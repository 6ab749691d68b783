#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "ksf/error.hpp"
#include "ksf/quantum.hpp"

namespace ksf {

/// Exact one-sided upper confidence bound at level 1-α for a binomial
/// proportion: the p at which P(X <= failures; trials, p) = α. Found by
/// bisection on the regularized incomplete beta function, since
/// P(X <= k) = 1 - I_p(k+1, n-k).
inline double clopper_pearson_upper(std::uint64_t failures, std::uint64_t trials, double alpha) {
    if (trials == 0 || failures > trials) throw InvalidConfig("clopper_pearson_upper: need 0 <= failures <= trials, trials >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidConfig("clopper_pearson_upper: alpha must lie in (0,1)");
    if (failures == trials) return 1.0;
    const double a = static_cast<double>(failures) + 1.0;
    const double b = static_cast<double>(trials - failures);
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        // I_p is increasing in p; below the root the lower tail still exceeds α.
        if (boost::math::ibeta(a, b, mid) < 1.0 - alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

enum class Verdict { Excluded, Inconclusive };

inline std::string_view to_string(Verdict v) { return v == Verdict::Excluded ? "Excluded" : "Inconclusive"; }

/// Excluded iff every per-triad upper bound lies strictly below 1/N. The bounds
/// must already be computed at the per-triad level α/N.
inline Verdict verdict(std::span<const double> upper_bounds, std::size_t n_triads) {
    if (n_triads == 0) throw InvalidConfig("verdict: N must be at least 1");
    const double threshold = 1.0 / static_cast<double>(n_triads);
    if (upper_bounds.empty()) return Verdict::Inconclusive;
    const double u_max = *std::max_element(upper_bounds.begin(), upper_bounds.end());
    return u_max < threshold ? Verdict::Excluded : Verdict::Inconclusive;
}

enum class NoClickPolicy { CountAsFailure, Discard };

inline std::string_view to_string(NoClickPolicy p) {
    return p == NoClickPolicy::CountAsFailure ? "count_as_failure" : "discard";
}

/// Raw counts for one triad (or GHZ context).
struct TriadTally {
    std::array<std::uint64_t, 4> sum_counts{};
    std::uint64_t no_click = 0;

    void add(const MeasurementRecord& rec) {
        if (auto s = rec.sum()) {
            sum_counts[static_cast<std::size_t>(*s)] += 1;
        } else {
            no_click += 1;
        }
    }

    TriadTally& operator+=(const TriadTally& o) {
        for (std::size_t i = 0; i < 4; ++i) sum_counts[i] += o.sum_counts[i];
        no_click += o.no_click;
        return *this;
    }

    [[nodiscard]] std::uint64_t trials() const noexcept {
        return sum_counts[0] + sum_counts[1] + sum_counts[2] + sum_counts[3] + no_click;
    }
    [[nodiscard]] std::uint64_t denominator(NoClickPolicy p) const noexcept {
        return p == NoClickPolicy::CountAsFailure ? trials() : trials() - no_click;
    }
    [[nodiscard]] std::uint64_t failures(NoClickPolicy p) const noexcept {
        return denominator(p) - sum_counts[2];
    }
};

struct TriadStatistics {
    std::size_t index = 0;
    std::array<std::size_t, 3> members{};
    TriadTally tally;
    std::uint64_t failures = 0;
    std::uint64_t denominator = 0;
    double epsilon_hat = 0.0;
    double upper_bound = 1.0;
};

struct ExperimentReport {
    std::string mode = "ks";
    std::string set_name;
    std::size_t n_triads = 0;
    double alpha = 0.0;
    NoClickPolicy policy = NoClickPolicy::CountAsFailure;
    std::optional<std::uint64_t> trials_per_triad;
    std::vector<TriadStatistics> triads;
    double epsilon_max = 0.0;
    double u_max = 0.0;
    double threshold = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    std::optional<std::uint64_t> seed;
    std::string config_digest;
};

/// Shared statistics pipeline: failure fractions, Bonferroni-corrected upper
/// bounds at α/N, and the verdict against 1/N. A triad without usable trials
/// gets ε̂ = 0 and u = 1.
inline void fill_statistics(ExperimentReport& report, double alpha) {
    const std::size_t n = report.triads.size();
    if (n == 0) throw InvalidConfig("statistics need at least one triad");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidConfig("alpha must lie in (0,1)");
    report.n_triads = n;
    report.alpha = alpha;
    report.threshold = 1.0 / static_cast<double>(n);
    const double per_triad_alpha = alpha / static_cast<double>(n);
    std::vector<double> uppers;
    uppers.reserve(n);
    report.epsilon_max = 0.0;
    for (auto& t : report.triads) {
        t.denominator = t.tally.denominator(report.policy);
        t.failures = t.tally.failures(report.policy);
        if (t.denominator == 0) {
            t.epsilon_hat = 0.0;
            t.upper_bound = 1.0;
        } else {
            t.epsilon_hat = static_cast<double>(t.failures) / static_cast<double>(t.denominator);
            t.upper_bound = clopper_pearson_upper(t.failures, t.denominator, per_triad_alpha);
        }
        uppers.push_back(t.upper_bound);
        report.epsilon_max = std::max(report.epsilon_max, t.epsilon_hat);
    }
    report.u_max = *std::max_element(uppers.begin(), uppers.end());
    report.verdict = verdict(uppers, n);
}

/// Smallest per-triad trial count for which zero observed failures already
/// give u < 1/N at family level α: ceil(ln(α/N) / ln(1 - 1/N)).
inline std::uint64_t zero_failure_trials_needed(std::size_t n_triads, double alpha) {
    const double n = static_cast<double>(n_triads);
    return static_cast<std::uint64_t>(std::ceil(std::log(alpha / n) / std::log1p(-1.0 / n)));
}

}  // namespace ksf
