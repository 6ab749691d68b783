#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ksf/error.hpp"
#include "ksf/experiment/statistics.hpp"
#include "ksf/io/canonical_json.hpp"
#include "ksf/io/report_json.hpp"
#include "ksf/quantum.hpp"
#include "ksf/rng.hpp"

namespace ksf::ghz {

using Vec8 = Eigen::Matrix<Complex, 8, 1>;
using Mat8 = Eigen::Matrix<Complex, 8, 8>;
using Mat2 = Eigen::Matrix2cd;

enum class Setting : std::uint8_t { X = 0, Y = 1 };
using Settings = std::array<Setting, 3>;

struct GHZContext {
    std::array<Setting, 3> settings{};
    int target_parity = 1;

    [[nodiscard]] std::string label() const {
        std::string s;
        for (Setting st : settings) s += st == Setting::X ? 'X' : 'Y';
        return s;
    }
};

/// Predetermined local results v(particle, setting) ∈ {+1, -1}.
struct LHVAssignment {
    std::array<std::array<int, 2>, 3> values{};

    [[nodiscard]] int value(std::size_t particle, Setting s) const {
        return values[particle][static_cast<std::size_t>(s)];
    }
};

inline Mat2 pauli(Setting s) {
    Mat2 m;
    if (s == Setting::X) {
        m << 0, 1, 1, 0;
    } else {
        m << 0, Complex(0, -1), Complex(0, 1), 0;
    }
    return m;
}

/// (|000> + |111>)/√2, qubit 1 most significant.
inline Vec8 ghz_state() {
    Vec8 v = Vec8::Zero();
    v[0] = v[7] = 1.0 / std::sqrt(2.0);
    return v;
}

inline Mat8 context_observable(const std::array<Setting, 3>& settings) {
    const Mat2 a = pauli(settings[0]), b = pauli(settings[1]), c = pauli(settings[2]);
    Mat8 out;
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            out(i, j) = a((i >> 2) & 1, (j >> 2) & 1) * b((i >> 1) & 1, (j >> 1) & 1) * c(i & 1, j & 1);
        }
    }
    return out;
}

/// <ψ| O1⊗O2⊗O3 |ψ>.
inline double context_parity(const Vec8& state, const std::array<Setting, 3>& settings) {
    if (!(std::abs(state.norm() - 1.0) <= 1e-12)) throw InvalidState("three-qubit state is not normalized");
    const Complex e = (state.adjoint() * context_observable(settings) * state)(0, 0);
    if (std::abs(e.imag()) > 1e-12) throw NumericalError("context expectation is not real");
    return e.real();
}

inline double context_parity(const Vec8& state, const GHZContext& ctx) { return context_parity(state, ctx.settings); }

/// XXX, XYY, YXY, YYX with targets read off the GHZ state.
inline std::vector<GHZContext> ghz_contexts() {
    using enum Setting;
    const std::array<std::array<Setting, 3>, 4> settings{{{X, X, X}, {X, Y, Y}, {Y, X, Y}, {Y, Y, X}}};
    std::vector<GHZContext> out;
    const Vec8 psi = ghz_state();
    for (const auto& s : settings) {
        const double p = context_parity(psi, s);
        if (std::abs(std::abs(p) - 1.0) > 1e-12) throw NumericalError("GHZ state is not an eigenstate of a context");
        out.push_back({s, p > 0 ? 1 : -1});
    }
    return out;
}

inline bool satisfies(const LHVAssignment& a, const GHZContext& ctx) {
    int product = 1;
    for (std::size_t q = 0; q < 3; ++q) product *= a.value(q, ctx.settings[q]);
    return product == ctx.target_parity;
}

inline std::size_t count_satisfied(const LHVAssignment& a, const std::vector<GHZContext>& contexts) {
    std::size_t n = 0;
    for (const auto& c : contexts) n += satisfies(a, c) ? 1 : 0;
    return n;
}

inline LHVAssignment lhv_from_mask(unsigned mask) {
    LHVAssignment a;
    for (std::size_t q = 0; q < 3; ++q) {
        for (std::size_t s = 0; s < 2; ++s) a.values[q][s] = (mask >> (2 * q + s)) & 1 ? -1 : 1;
    }
    return a;
}

struct LHVBound {
    std::size_t max_count = 0;
    LHVAssignment witness;
    double threshold = 0.0;
};

/// Exhausts all 64 local assignments.
inline LHVBound lhv_max_satisfiable() {
    const auto contexts = ghz_contexts();
    LHVBound best;
    for (unsigned mask = 0; mask < 64; ++mask) {
        const LHVAssignment a = lhv_from_mask(mask);
        const std::size_t n = count_satisfied(a, contexts);
        if (n > best.max_count) {
            best.max_count = n;
            best.witness = a;
        }
    }
    best.threshold = 1.0 / static_cast<double>(contexts.size());
    return best;
}

struct GhzRunConfig {
    std::uint64_t trials_per_context = 10000;
    std::uint64_t seed = 0;
    double alpha = 0.01;
    /// Weight of the GHZ projector against white noise: ρ = v|GHZ><GHZ| + (1-v) I/8.
    double visibility = 1.0;
};

/// Outcome probabilities of measuring each qubit in the eigenbasis of its
/// setting; index bit q set means result -1 on qubit q (qubit 1 = bit 2).
inline std::array<double, 8> outcome_probabilities(const Mat8& rho, const std::array<Setting, 3>& settings) {
    std::array<Eigen::Vector2cd, 2> basis_x{Eigen::Vector2cd(1, 1) / std::sqrt(2.0),
                                            Eigen::Vector2cd(1, -1) / std::sqrt(2.0)};
    std::array<Eigen::Vector2cd, 2> basis_y{Eigen::Vector2cd(1, Complex(0, 1)) / std::sqrt(2.0),
                                            Eigen::Vector2cd(1, Complex(0, -1)) / std::sqrt(2.0)};
    std::array<double, 8> p{};
    for (std::size_t pattern = 0; pattern < 8; ++pattern) {
        Vec8 e;
        std::array<Eigen::Vector2cd, 3> f;
        for (std::size_t q = 0; q < 3; ++q) {
            const std::size_t bit = (pattern >> (2 - q)) & 1;
            f[q] = settings[q] == Setting::X ? basis_x[bit] : basis_y[bit];
        }
        for (int i = 0; i < 8; ++i) e[i] = f[0][(i >> 2) & 1] * f[1][(i >> 1) & 1] * f[2][i & 1];
        p[pattern] = std::max(0.0, (e.adjoint() * rho * e)(0, 0).real());
    }
    return p;
}

struct GhzReport {
    std::vector<GHZContext> contexts;
    ExperimentReport report;
};

inline constexpr std::uint64_t kTrialsPerChunk = 4096;

/// Simulated GHZ source measured in the four contexts. Each context plays the
/// role of a triad: a trial passes when the observed parity equals the
/// target. A pass is tallied as the pattern (0,1,1), a failure as (1,1,1), so
/// the triad statistics apply unchanged with N = 4.
inline GhzReport run_ghz(const GhzRunConfig& config) {
    if (config.trials_per_context < 1) throw InvalidConfig("trials_per_context must be >= 1");
    if (!(config.visibility >= 0.0 && config.visibility <= 1.0)) throw InvalidConfig("visibility must lie in [0,1]");
    GhzReport out;
    out.contexts = ghz_contexts();
    const Vec8 psi = ghz_state();
    const Mat8 rho = config.visibility * (psi * psi.adjoint()) + (1.0 - config.visibility) * Mat8::Identity() / 8.0;

    ExperimentReport& r = out.report;
    r.mode = "ghz";
    r.set_name = "ghz-contexts";
    r.trials_per_triad = config.trials_per_context;
    r.seed = config.seed;
    for (std::size_t c = 0; c < out.contexts.size(); ++c) {
        const auto probs = outcome_probabilities(rho, out.contexts[c].settings);
        TriadStatistics s;
        s.index = c;
        s.members = {0, 1, 2};
        const std::uint64_t chunks = (config.trials_per_context + kTrialsPerChunk - 1) / kTrialsPerChunk;
        for (std::uint64_t chunk = 0; chunk < chunks; ++chunk) {
            auto gen = derive_stream(config.seed, c, chunk);
            const std::uint64_t end = std::min(config.trials_per_context, (chunk + 1) * kTrialsPerChunk);
            for (std::uint64_t i = chunk * kTrialsPerChunk; i < end; ++i) {
                const std::size_t pattern = ksf::detail::sample_index(std::span<const double>(probs), gen);
                const int parity = (std::popcount(pattern) % 2 == 0) ? 1 : -1;
                MeasurementRecord rec;
                rec.triad_index = c;
                rec.results = {parity == out.contexts[c].target_parity ? Outcome::Zero : Outcome::One, Outcome::One,
                               Outcome::One};
                s.tally.add(rec);
            }
        }
        r.triads.push_back(s);
    }
    fill_statistics(r, config.alpha);
    r.config_digest = io::canonical_digest(io::Json{{"mode", "ghz"},
                                                    {"trials_per_context", config.trials_per_context},
                                                    {"seed", config.seed},
                                                    {"alpha", config.alpha},
                                                    {"visibility", config.visibility}});
    return out;
}

inline io::Json to_json(const GhzReport& g) {
    io::Json j = io::to_json(g.report);
    io::Json contexts = io::Json::array();
    for (const auto& c : g.contexts) contexts.push_back({{"settings", c.label()}, {"target_parity", c.target_parity}});
    j["contexts"] = contexts;
    const LHVBound bound = lhv_max_satisfiable();
    j["lhv_max_satisfiable"] = bound.max_count;
    return j;
}

}  // namespace ksf::ghz
