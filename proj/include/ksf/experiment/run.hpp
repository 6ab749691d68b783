#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "ksf/experiment/config.hpp"
#include "ksf/experiment/statistics.hpp"
#include "ksf/io/config_json.hpp"
#include "ksf/kscore/solver.hpp"
#include "ksf/rng.hpp"

namespace ksf {

/// Trials per RNG stream. Part of the determinism contract: streams are keyed
/// by (seed, triad, chunk), never by worker.
inline constexpr std::uint64_t kTrialsPerChunk = 4096;

struct RunOptions {
    /// 0 means std::thread::hardware_concurrency().
    unsigned threads = 0;
    /// Reject colorable sets up front (the verdict would be meaningless).
    bool require_uncolorable = true;
};

namespace detail {

/// Everything a worker needs to simulate one trial of one triad.
class TrialSimulator {
public:
    explicit TrialSimulator(const ExperimentConfig& c) : config_(c) {
        if (c.state.kind != StateSpec::Kind::RandomPerTrial) {
            const QState base =
                c.state.kind == StateSpec::Kind::Pure ? QState::pure(c.state.vector) : QState::maximally_mixed();
            fixed_state_ = depolarize(base, c.noise.depolarizing_p);
        }
        // Without jitter and with a fixed state the sequential distribution is
        // the same on every trial of a triad.
        const auto* q = std::get_if<QuantumSource>(&c.source);
        if (q && q->model == MeasurementModel::Sequential && c.noise.jitter_sigma == 0.0 && fixed_state_) {
            for (const Triad& t : c.set.triads()) {
                const auto& d = c.set.directions();
                cached_.push_back(branch_probabilities(*fixed_state_, d[t[0]], d[t[1]], d[t[2]]));
            }
        }
    }

    TriadTally run_chunk(std::size_t triad, std::uint64_t chunk) const {
        auto gen = derive_stream(config_.seed, triad, chunk);
        const std::uint64_t begin = chunk * kTrialsPerChunk;
        const std::uint64_t end = std::min(config_.trials_per_triad, begin + kTrialsPerChunk);
        TriadTally tally;
        for (std::uint64_t i = begin; i < end; ++i) {
            MeasurementRecord rec = trial(triad, gen);
            rec.triad_index = triad;
            apply_losses(rec, gen);
            tally.add(rec);
        }
        return tally;
    }

private:
    MeasurementRecord trial(std::size_t triad, SplitMix64& gen) const {
        const Triad& t = config_.set.triads()[triad];
        const auto& dirs = config_.set.directions();
        if (const auto* hv = std::get_if<HiddenVariableSource>(&config_.source)) {
            const auto& point = hv->model.points()[hv->model.locate(uniform01(gen))];
            MeasurementRecord rec;
            for (std::size_t m = 0; m < 3; ++m) rec.results[m] = static_cast<Outcome>(point.assignment.values[t[m]]);
            return rec;
        }
        const auto model = std::get<QuantumSource>(config_.source).model;
        if (!cached_.empty()) {
            MeasurementRecord rec;
            rec.results = pattern_outcomes(sample_index(std::span<const double>(cached_[triad]), gen));
            return rec;
        }
        const double sigma = config_.noise.jitter_sigma;
        const Direction d1 = jitter(dirs[t[0]], sigma, gen);
        const Direction d2 = jitter(dirs[t[1]], sigma, gen);
        const Direction d3 = jitter(dirs[t[2]], sigma, gen);
        const QState state =
            fixed_state_ ? *fixed_state_ : depolarize(random_pure_state(gen), config_.noise.depolarizing_p);
        if (model == MeasurementModel::Sequential) return sequential_measure(state, d1, d2, d3, gen);
        return joint_measure(state, gram_schmidt_frame(d1, d2, d3), gen);
    }

    void apply_losses(MeasurementRecord& rec, SplitMix64& gen) const {
        const double eta = config_.noise.detection_efficiency;
        if (eta >= 1.0) return;
        for (auto& r : rec.results) {
            if (uniform01(gen) >= eta) r = Outcome::NoClick;
        }
    }

    const ExperimentConfig& config_;
    std::optional<QState> fixed_state_;
    std::vector<BranchProbabilities> cached_;
};

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace detail

/// Monte Carlo run of the whole set: trials_per_triad trials on every triad,
/// in chunks that may run on several threads. The report depends only on the
/// configuration, never on the thread count.
inline ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {}) {
    config.validate();
    if (options.require_uncolorable && is_colorable(config.set).colorable()) {
        throw ColorableSet("set '" + config.set.name() + "' is colorable; an exclusion verdict is meaningless");
    }
    const std::size_t n = config.set.size();
    const std::uint64_t chunks = (config.trials_per_triad + kTrialsPerChunk - 1) / kTrialsPerChunk;
    const std::uint64_t jobs = chunks * n;
    std::vector<TriadTally> results(jobs);

    const detail::TrialSimulator sim(config);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            for (std::uint64_t job = next++; job < jobs; job = next++) {
                results[job] = sim.run_chunk(job / chunks, job % chunks);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = jobs;
        }
    };
    const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(detail::resolve_threads(options.threads), jobs));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    ExperimentReport report;
    report.set_name = config.set.name();
    report.policy = config.noise.no_click_policy;
    report.trials_per_triad = config.trials_per_triad;
    report.seed = config.seed;
    report.config_digest = io::config_digest(config);
    for (std::size_t t = 0; t < n; ++t) {
        TriadStatistics s;
        s.index = t;
        s.members = config.set.triads()[t].indices();
        for (std::uint64_t c = 0; c < chunks; ++c) s.tally += results[t * chunks + c];
        report.triads.push_back(s);
    }
    fill_statistics(report, config.alpha);
    return report;
}

/// One externally recorded trial.
struct TrialRow {
    std::uint64_t trial = 0;
    std::size_t triad = 0;
    std::array<Outcome, 3> results{};
};

/// The run_experiment statistics applied to recorded data.
inline ExperimentReport analyze_counts(const std::vector<TrialRow>& rows, const KSSet& set, double alpha,
                                       NoClickPolicy policy = NoClickPolicy::CountAsFailure,
                                       bool require_uncolorable = true) {
    set.require_triads();
    if (require_uncolorable && is_colorable(set).colorable()) {
        throw ColorableSet("set '" + set.name() + "' is colorable; an exclusion verdict is meaningless");
    }
    ExperimentReport report;
    report.set_name = set.name();
    report.policy = policy;
    for (std::size_t t = 0; t < set.size(); ++t) {
        TriadStatistics s;
        s.index = t;
        s.members = set.triads()[t].indices();
        report.triads.push_back(s);
    }
    io::Json digest_rows = io::Json::array();
    for (const TrialRow& row : rows) {
        if (row.triad >= set.size()) {
            throw UnknownTriad("trial " + std::to_string(row.trial) + " references triad " + std::to_string(row.triad) +
                               " but the set has " + std::to_string(set.size()));
        }
        MeasurementRecord rec;
        rec.triad_index = row.triad;
        rec.results = row.results;
        report.triads[row.triad].tally.add(rec);
        digest_rows.push_back({row.trial, row.triad, static_cast<int>(row.results[0]), static_cast<int>(row.results[1]),
                               static_cast<int>(row.results[2])});
    }
    fill_statistics(report, alpha);
    report.config_digest = io::canonical_digest(io::Json{{"alpha", alpha},
                                                     {"no_click_policy", std::string(to_string(policy))},
                                                     {"set", io::to_json(set)},
                                                     {"rows", digest_rows}});
    return report;
}

}  // namespace ksf
