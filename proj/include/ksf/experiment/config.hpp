#pragma once

#include <cstdint>
#include <variant>

#include "ksf/error.hpp"
#include "ksf/experiment/statistics.hpp"
#include "ksf/kscore/hidden_variables.hpp"
#include "ksf/kscore/ksset.hpp"
#include "ksf/quantum.hpp"

namespace ksf {

struct NoiseModel {
    /// Standard deviation of the misalignment angle of every switch, radians.
    double jitter_sigma = 0.0;
    /// Probability that a single S² measurement produces a click.
    double detection_efficiency = 1.0;
    NoClickPolicy no_click_policy = NoClickPolicy::CountAsFailure;
    double depolarizing_p = 0.0;

    void validate() const {
        if (!(jitter_sigma >= 0.0) || !std::isfinite(jitter_sigma)) throw InvalidConfig("jitter_sigma must be >= 0");
        if (!(detection_efficiency >= 0.0 && detection_efficiency <= 1.0)) {
            throw InvalidConfig("detection_efficiency must lie in [0,1]");
        }
        if (!(depolarizing_p >= 0.0 && depolarizing_p <= 1.0)) throw InvalidConfig("depolarizing_p must lie in [0,1]");
    }
};

struct StateSpec {
    enum class Kind { MaximallyMixed, Pure, RandomPerTrial };
    Kind kind = Kind::MaximallyMixed;
    CVec3 vector = CVec3::Zero();  // used when kind == Pure

    static StateSpec maximally_mixed() { return {}; }
    static StateSpec pure(const CVec3& v) { return {Kind::Pure, v}; }
    static StateSpec random_per_trial() { return {Kind::RandomPerTrial, CVec3::Zero()}; }
};

enum class MeasurementModel { Sequential, Joint };

inline std::string_view to_string(MeasurementModel m) { return m == MeasurementModel::Sequential ? "sequential" : "joint"; }

struct QuantumSource {
    MeasurementModel model = MeasurementModel::Sequential;
};

struct HiddenVariableSource {
    HVModel model;
};

using Source = std::variant<QuantumSource, HiddenVariableSource>;

struct ExperimentConfig {
    explicit ExperimentConfig(KSSet s) : set(std::move(s)) {}

    KSSet set;
    StateSpec state;
    NoiseModel noise;
    std::uint64_t trials_per_triad = 10000;
    std::uint64_t seed = 0;
    double alpha = 0.01;
    Source source = QuantumSource{};

    void validate() const {
        set.require_triads();
        noise.validate();
        if (trials_per_triad < 1) throw InvalidConfig("trials_per_triad must be >= 1");
        if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidConfig("alpha must lie in (0,1)");
        if (state.kind == StateSpec::Kind::Pure) {
            try {
                (void)QState::pure(state.vector);
            } catch (const InvalidState& e) {
                throw InvalidConfig(std::string("state: ") + e.what());
            }
        }
        if (const auto* hv = std::get_if<HiddenVariableSource>(&source)) {
            hv->model.require_covers(set);
        }
    }
};

}  // namespace ksf
