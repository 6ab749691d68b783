#pragma once

#include <filesystem>
#include <string>

#include "ksf/experiment/config.hpp"
#include "ksf/io/canonical_json.hpp"
#include "ksf/io/files.hpp"
#include "ksf/io/ks_json.hpp"

namespace ksf::io {

inline Json to_json(const HVModel& model) {
    Json points = Json::array();
    for (const auto& p : model.points()) {
        Json values = Json::array();
        for (std::uint8_t v : p.assignment.values) values.push_back(static_cast<int>(v));
        points.push_back({{"weight", p.weight}, {"values", values}});
    }
    return points;
}

inline HVModel hv_model_from_json(const Json& points) {
    if (!points.is_array()) throw InvalidConfig("hidden-variable 'points' must be an array");
    std::vector<HVModel::Point> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Json& p = points[i];
        if (!p.is_object() || !p.contains("weight") || !p["weight"].is_number() || !p.contains("values") ||
            !p["values"].is_array()) {
            throw InvalidConfig("hidden-variable point " + std::to_string(i) + " needs 'weight' and 'values'");
        }
        HVModel::Point point{p["weight"].get<double>(), {}};
        for (const Json& v : p["values"]) {
            if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
                throw InvalidConfig("hidden-variable point " + std::to_string(i) + " has a value other than 0/1");
            }
            point.assignment.values.push_back(static_cast<std::uint8_t>(v.get<int>()));
        }
        out.push_back(std::move(point));
    }
    return HVModel(std::move(out));
}

/// Canonical form of a configuration; its SHA-256 is the config digest.
inline Json to_json(const ExperimentConfig& c) {
    Json state;
    switch (c.state.kind) {
        case StateSpec::Kind::MaximallyMixed: state = {{"kind", "maximally_mixed"}}; break;
        case StateSpec::Kind::RandomPerTrial: state = {{"kind", "random"}}; break;
        case StateSpec::Kind::Pure: {
            Json v = Json::array();
            for (int i = 0; i < 3; ++i) v.push_back({c.state.vector[i].real(), c.state.vector[i].imag()});
            state = {{"kind", "pure"}, {"vector", v}};
            break;
        }
    }
    Json source;
    if (const auto* q = std::get_if<QuantumSource>(&c.source)) {
        source = {{"kind", "quantum"}, {"model", std::string(to_string(q->model))}};
    } else {
        source = {{"kind", "hidden_variable"}, {"points", to_json(std::get<HiddenVariableSource>(c.source).model)}};
    }
    return Json{{"set", to_json(c.set)},
                {"state", state},
                {"noise",
                 {{"jitter_sigma", c.noise.jitter_sigma},
                  {"detection_efficiency", c.noise.detection_efficiency},
                  {"no_click_policy", std::string(to_string(c.noise.no_click_policy))},
                  {"depolarizing_p", c.noise.depolarizing_p}}},
                {"trials_per_triad", c.trials_per_triad},
                {"seed", c.seed},
                {"alpha", c.alpha},
                {"source", source}};
}

inline std::string config_digest(const ExperimentConfig& c) { return canonical_digest(to_json(c)); }

namespace detail {

inline double number_or(const Json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw InvalidConfig(std::string("'") + key + "' must be a number");
    return obj[key].get<double>();
}

inline std::string string_or(const Json& obj, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) throw InvalidConfig(std::string("'") + key + "' must be a string");
    return obj[key].get<std::string>();
}

}  // namespace detail

/// Resolves the "set" entry: an inline KS-set object, the built-in names
/// "peres" / "peres-completed", or a path relative to base_dir.
inline KSSet resolve_set(const Json& entry, const std::filesystem::path& base_dir) {
    if (entry.is_object()) return ks_set_from_json(entry);
    if (!entry.is_string()) throw InvalidConfig("'set' must be an object, a built-in name or a path");
    const std::string s = entry.get<std::string>();
    if (s == "peres") return peres_set();
    if (s == "peres-completed") return peres_completed_set();
    const std::filesystem::path p(s);
    return parse_ks_file(p.is_absolute() ? p : base_dir / p);
}

inline ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = ".") {
    using detail::number_or;
    using detail::string_or;
    if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
    if (!j.contains("set")) throw InvalidConfig("config needs a 'set'");
    ExperimentConfig c(resolve_set(j["set"], base_dir));

    if (j.contains("state")) {
        const Json& s = j["state"];
        const std::string kind = s.is_string() ? s.get<std::string>() : string_or(s, "kind", "maximally_mixed");
        if (kind == "maximally_mixed") {
            c.state = StateSpec::maximally_mixed();
        } else if (kind == "random") {
            c.state = StateSpec::random_per_trial();
        } else if (kind == "pure") {
            if (!s.is_object() || !s.contains("vector") || !s["vector"].is_array() || s["vector"].size() != 3) {
                throw InvalidConfig("pure state needs a 3-entry 'vector'");
            }
            CVec3 v;
            for (int i = 0; i < 3; ++i) {
                const Json& e = s["vector"][i];
                if (e.is_number()) {
                    v[i] = Complex(e.get<double>(), 0.0);
                } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                    v[i] = Complex(e[0].get<double>(), e[1].get<double>());
                } else {
                    throw InvalidConfig("pure state entries must be numbers or [re, im]");
                }
            }
            c.state = StateSpec::pure(v);
        } else {
            throw InvalidConfig("unknown state kind '" + kind + "'");
        }
    }

    if (j.contains("noise")) {
        const Json& n = j["noise"];
        if (!n.is_object()) throw InvalidConfig("'noise' must be an object");
        c.noise.jitter_sigma = number_or(n, "jitter_sigma", 0.0);
        c.noise.detection_efficiency = number_or(n, "detection_efficiency", 1.0);
        c.noise.depolarizing_p = number_or(n, "depolarizing_p", 0.0);
        const std::string policy = string_or(n, "no_click_policy", "count_as_failure");
        if (policy == "count_as_failure") {
            c.noise.no_click_policy = NoClickPolicy::CountAsFailure;
        } else if (policy == "discard") {
            c.noise.no_click_policy = NoClickPolicy::Discard;
        } else {
            throw InvalidConfig("unknown no_click_policy '" + policy + "'");
        }
    }

    if (j.contains("trials_per_triad")) {
        if (!j["trials_per_triad"].is_number_unsigned()) throw InvalidConfig("'trials_per_triad' must be a positive integer");
        c.trials_per_triad = j["trials_per_triad"].get<std::uint64_t>();
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw InvalidConfig("'seed' must be a non-negative 64-bit integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    c.alpha = number_or(j, "alpha", c.alpha);

    if (j.contains("source")) {
        const Json& s = j["source"];
        const std::string kind = string_or(s, "kind", "quantum");
        if (kind == "quantum") {
            const std::string model = string_or(s, "model", "sequential");
            if (model == "sequential") {
                c.source = QuantumSource{MeasurementModel::Sequential};
            } else if (model == "joint") {
                c.source = QuantumSource{MeasurementModel::Joint};
            } else {
                throw InvalidConfig("unknown measurement model '" + model + "'");
            }
        } else if (kind == "hidden_variable") {
            if (!s.contains("points")) throw InvalidConfig("hidden_variable source needs 'points'");
            c.source = HiddenVariableSource{hv_model_from_json(s["points"])};
        } else {
            throw InvalidConfig("unknown source kind '" + kind + "'");
        }
    }
    c.validate();
    return c;
}

inline ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    return config_from_json(parse_json(text, path.string()), path.parent_path());
}

}  // namespace ksf::io
