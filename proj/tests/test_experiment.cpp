#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ksf/experiment/run.hpp"
#include "ksf/io/report_json.hpp"
#include "oracles.hpp"

using ksf::Direction;
using ksf::ExperimentConfig;
using ksf::KSSet;

namespace {

KSSet axes() {
    return KSSet::from_directions("axes", {Direction::axis_x(), Direction::axis_y(), Direction::axis_z()});
}

ExperimentConfig peres_config(std::uint64_t trials, std::uint64_t seed = 1) {
    ExperimentConfig c(ksf::peres_completed_set());
    c.trials_per_triad = trials;
    c.seed = seed;
    c.alpha = 0.01;
    return c;
}

std::string dump(const ksf::ExperimentReport& r) { return ksf::io::canonical_dump(ksf::io::to_json(r)); }

}  // namespace

TEST(RunExperiment, ZeroNoiseSequentialHasNoFailures) {
    const auto report = ksf::run_experiment(peres_config(10000), {.threads = 1});
    ASSERT_EQ(report.triads.size(), 40u);
    for (const auto& t : report.triads) {
        EXPECT_EQ(t.epsilon_hat, 0.0);
        EXPECT_EQ(t.tally.trials(), 10000u);
        EXPECT_LE(t.epsilon_hat, t.upper_bound);
    }
    EXPECT_EQ(report.verdict, ksf::Verdict::Excluded);
    EXPECT_DOUBLE_EQ(report.threshold, 0.025);
    EXPECT_EQ(report.seed, 1u);
    EXPECT_EQ(report.config_digest.size(), 64u);
}

TEST(RunExperiment, ZeroNoiseVerdictFlipsAtRequiredTrials) {
    const std::uint64_t need = ksf::zero_failure_trials_needed(40, 0.01);
    EXPECT_EQ(ksf::run_experiment(peres_config(need), {.threads = 1}).verdict, ksf::Verdict::Excluded);
    EXPECT_EQ(ksf::run_experiment(peres_config(need - 1), {.threads = 1}).verdict, ksf::Verdict::Inconclusive);
}

TEST(RunExperiment, JointModelNeverFailsWithoutLosses) {
    auto c = peres_config(2000);
    c.source = ksf::QuantumSource{ksf::MeasurementModel::Joint};
    c.noise.jitter_sigma = 0.2;
    c.state = ksf::StateSpec::random_per_trial();
    const auto report = ksf::run_experiment(c, {.threads = 2});
    EXPECT_EQ(report.epsilon_max, 0.0);
}

TEST(RunExperiment, JitteredTriadMatchesIntegratedBranchProbabilities) {
    // Oracle: average the exact failure probability 1 - P(sum=2) over jittered
    // triads drawn with an unrelated generator and rotation routine.
    constexpr double sigma = 0.2;
    std::mt19937_64 rng(123);
    std::normal_distribution<double> angle(0.0, sigma);
    std::uniform_real_distribution<double> azimuth(0.0, 2.0 * M_PI);
    auto rotate = [&](const ksf::Vec3& n) {
        const ksf::Vec3 helper = std::abs(n.x()) < 0.9 ? ksf::Vec3::UnitX() : ksf::Vec3::UnitY();
        const ksf::Vec3 u = n.cross(helper).normalized(), w = n.cross(u);
        const double phi = azimuth(rng);
        const ksf::Vec3 axis = std::cos(phi) * u + std::sin(phi) * w;
        return ksf::normalize(Eigen::AngleAxisd(angle(rng), axis) * n);
    };
    const auto mixed = ksf::QState::maximally_mixed();
    constexpr int m = 200000;
    double sum = 0, sumsq = 0;
    for (int k = 0; k < m; ++k) {
        const auto p = ksf::branch_probabilities(mixed, rotate(ksf::Vec3::UnitX()), rotate(ksf::Vec3::UnitY()),
                                                 rotate(ksf::Vec3::UnitZ()));
        const double fail = 1.0 - (p[3] + p[5] + p[6]);
        sum += fail;
        sumsq += fail * fail;
    }
    const double mean = sum / m;
    const double oracle_se = std::sqrt((sumsq / m - mean * mean) / m);

    ExperimentConfig c(axes());
    c.trials_per_triad = 100000;
    c.seed = 77;
    c.noise.jitter_sigma = sigma;
    const auto report = ksf::run_experiment(c, {.threads = 1, .require_uncolorable = false});
    const double n = 100000;
    const double sd = std::sqrt(mean * (1 - mean) / n);
    EXPECT_GT(mean, 0.01);
    EXPECT_NEAR(report.triads[0].epsilon_hat, mean, 4 * sd + 4 * oracle_se);
}

TEST(RunExperiment, DeterministicAcrossThreadCounts) {
    auto c = peres_config(5000, 99);
    c.noise.jitter_sigma = 0.05;
    c.noise.detection_efficiency = 0.98;
    const std::string one = dump(ksf::run_experiment(c, {.threads = 1}));
    EXPECT_EQ(one, dump(ksf::run_experiment(c, {.threads = 4})));
    EXPECT_EQ(one, dump(ksf::run_experiment(c, {.threads = 8})));
    c.seed = 100;
    EXPECT_NE(one, dump(ksf::run_experiment(c, {.threads = 1})));
}

TEST(RunExperiment, CountAsFailureDominatesDiscard) {
    auto c = peres_config(3000, 5);
    c.noise.jitter_sigma = 0.1;
    c.noise.detection_efficiency = 0.95;
    const auto strict = ksf::run_experiment(c, {.threads = 1});
    c.noise.no_click_policy = ksf::NoClickPolicy::Discard;
    const auto lenient = ksf::run_experiment(c, {.threads = 1});
    for (std::size_t t = 0; t < strict.triads.size(); ++t) {
        // Same stream, so the raw counts agree.
        EXPECT_EQ(strict.triads[t].tally.sum_counts, lenient.triads[t].tally.sum_counts);
        EXPECT_EQ(strict.triads[t].tally.no_click, lenient.triads[t].tally.no_click);
        EXPECT_GE(strict.triads[t].epsilon_hat, lenient.triads[t].epsilon_hat);
    }
    EXPECT_GT(strict.epsilon_max, 0.1);  // 1 - 0.95^3 ≈ 0.14 of trials lose a click
}

TEST(RunExperiment, DetectionLossRate) {
    auto c = peres_config(20000, 6);
    c.noise.detection_efficiency = 0.9;
    const auto r = ksf::run_experiment(c, {.threads = 1});
    const double p = 1 - 0.9 * 0.9 * 0.9;
    for (const auto& t : r.triads) {
        EXPECT_NEAR(t.epsilon_hat, p, 4 * std::sqrt(p * (1 - p) / 20000));
        EXPECT_EQ(t.tally.sum_counts[0] + t.tally.sum_counts[1] + t.tally.sum_counts[3], 0u);
    }
}

TEST(RunExperiment, HiddenVariableSourceCannotBeatThreshold) {
    const KSSet s = ksf::peres_completed_set();
    const auto best = ksf::min_violation_witness(s);
    ExperimentConfig c(s);
    c.trials_per_triad = 20000;
    c.seed = 8;
    c.source = ksf::HiddenVariableSource{ksf::HVModel({{1.0, best.witness}})};
    const auto r = ksf::run_experiment(c, {.threads = 1});
    const double p = static_cast<double>(best.count) / s.size();
    EXPECT_GE(r.epsilon_max, p - 3 * std::sqrt(p * (1 - p) / c.trials_per_triad));
    EXPECT_GE(r.u_max, r.threshold);
    EXPECT_EQ(r.verdict, ksf::Verdict::Inconclusive);
    // A deterministic model fails with certainty on its violated triad.
    EXPECT_EQ(r.epsilon_max, 1.0);
}

TEST(RunExperiment, Errors) {
    EXPECT_THROW(ksf::run_experiment(ExperimentConfig(axes())), ksf::ColorableSet);
    auto c = peres_config(0);
    EXPECT_THROW(ksf::run_experiment(c), ksf::InvalidConfig);
    c = peres_config(10);
    c.alpha = 1.0;
    EXPECT_THROW(ksf::run_experiment(c), ksf::InvalidConfig);
    c = peres_config(10);
    c.noise.detection_efficiency = 1.5;
    EXPECT_THROW(ksf::run_experiment(c), ksf::InvalidConfig);
    c = peres_config(10);
    c.source = ksf::HiddenVariableSource{ksf::HVModel({{1.0, ksf::Assignment{{1, 0}}}})};
    EXPECT_THROW(ksf::run_experiment(c), ksf::IncompleteModel);
    c = peres_config(10);
    c.state = ksf::StateSpec::pure(ksf::CVec3(1, 1, 0));
    EXPECT_THROW(ksf::run_experiment(c), ksf::InvalidConfig);
}

TEST(AnalyzeCounts, CountingExamples) {
    const KSSet s = ksf::peres_completed_set();
    std::vector<ksf::TrialRow> rows;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        rows.push_back({i, 0, {ksf::Outcome::One, ksf::Outcome::One, ksf::Outcome::Zero}});
    }
    auto r = ksf::analyze_counts(rows, s, 0.01);
    EXPECT_EQ(r.triads[0].epsilon_hat, 0.0);
    EXPECT_EQ(r.triads[0].tally.sum_counts[2], 1000u);
    // Triads without data stay at u = 1.
    EXPECT_EQ(r.triads[1].upper_bound, 1.0);
    EXPECT_EQ(r.verdict, ksf::Verdict::Inconclusive);

    rows.clear();
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto last = i < 990 ? ksf::Outcome::Zero : ksf::Outcome::One;
        rows.push_back({i, 3, {ksf::Outcome::One, ksf::Outcome::One, last}});
    }
    r = ksf::analyze_counts(rows, s, 0.01);
    EXPECT_DOUBLE_EQ(r.triads[3].epsilon_hat, 0.01);
    EXPECT_EQ(r.triads[3].tally.sum_counts[3], 10u);
}

TEST(AnalyzeCounts, UnknownTriad) {
    const KSSet s = ksf::peres_completed_set();
    std::vector<ksf::TrialRow> rows{{5, 40, {ksf::Outcome::One, ksf::Outcome::One, ksf::Outcome::One}}};
    EXPECT_THROW(ksf::analyze_counts(rows, s, 0.01), ksf::UnknownTriad);
}

TEST(AnalyzeCounts, SamePipelineAsSimulation) {
    auto c = peres_config(3000, 12);
    c.noise.jitter_sigma = 0.1;
    c.noise.detection_efficiency = 0.99;
    const auto sim = ksf::run_experiment(c, {.threads = 1});
    // Rebuild rows reproducing each triad's tallies.
    std::vector<ksf::TrialRow> rows;
    using O = ksf::Outcome;
    const std::array<std::array<O, 3>, 4> by_sum{{{O::Zero, O::Zero, O::Zero},
                                                  {O::Zero, O::Zero, O::One},
                                                  {O::Zero, O::One, O::One},
                                                  {O::One, O::One, O::One}}};
    std::uint64_t id = 0;
    for (const auto& t : sim.triads) {
        for (std::size_t s = 0; s < 4; ++s)
            for (std::uint64_t k = 0; k < t.tally.sum_counts[s]; ++k) rows.push_back({id++, t.index, by_sum[s]});
        for (std::uint64_t k = 0; k < t.tally.no_click; ++k) rows.push_back({id++, t.index, {O::NoClick, O::One, O::One}});
    }
    const auto an = ksf::analyze_counts(rows, c.set, c.alpha);
    ASSERT_EQ(an.triads.size(), sim.triads.size());
    for (std::size_t t = 0; t < an.triads.size(); ++t) {
        EXPECT_EQ(an.triads[t].epsilon_hat, sim.triads[t].epsilon_hat);
        EXPECT_EQ(an.triads[t].upper_bound, sim.triads[t].upper_bound);
    }
    EXPECT_EQ(an.verdict, sim.verdict);
    EXPECT_EQ(an.u_max, sim.u_max);
}
