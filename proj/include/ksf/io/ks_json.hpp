#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ksf/io/canonical_json.hpp"
#include "ksf/io/files.hpp"
#include "ksf/kscore/ksset.hpp"

namespace ksf::io {

/// { "name", "tolerance", "directions": [[x,y,z],...], "triads": [[i,j,k],...] }
inline Json to_json(const KSSet& set) {
    Json dirs = Json::array();
    for (const Direction& d : set.directions()) dirs.push_back({d.x(), d.y(), d.z()});
    Json triads = Json::array();
    for (const Triad& t : set.triads()) triads.push_back({t[0], t[1], t[2]});
    return Json{{"name", set.name()}, {"tolerance", set.tolerance()}, {"directions", dirs}, {"triads", triads}};
}

/// Validates a KS-set document. Directions already unit within 1e-12 keep
/// their exact values; others are normalized. Triads are derived with
/// find_triads when the key is absent.
inline KSSet ks_set_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("KS set document must be a JSON object");
    std::string name = "unnamed";
    if (j.contains("name")) {
        if (!j["name"].is_string()) throw ValidationError("'name' must be a string");
        name = j["name"].get<std::string>();
    }
    double tol = kDefaultOrthogonalityTolerance;
    if (j.contains("tolerance")) {
        if (!j["tolerance"].is_number()) throw ValidationError("'tolerance' must be a number");
        tol = j["tolerance"].get<double>();
    }
    if (!j.contains("directions") || !j["directions"].is_array()) {
        throw ValidationError("'directions' must be an array of [x,y,z]");
    }
    std::vector<Direction> dirs;
    for (std::size_t i = 0; i < j["directions"].size(); ++i) {
        const Json& d = j["directions"][i];
        if (!d.is_array() || d.size() != 3 || !d[0].is_number() || !d[1].is_number() || !d[2].is_number()) {
            throw ValidationError("direction " + std::to_string(i) + " must be [x,y,z]");
        }
        const Vec3 v(d[0].get<double>(), d[1].get<double>(), d[2].get<double>());
        try {
            dirs.push_back(std::abs(v.norm() - 1.0) <= Direction::kUnitTolerance ? Direction::from_unit(v)
                                                                                  : normalize(v));
        } catch (const ZeroVector&) {
            throw ValidationError("direction " + std::to_string(i) + " is a zero vector");
        }
    }
    if (!j.contains("triads")) return KSSet::from_directions(std::move(name), std::move(dirs), tol);
    if (!j["triads"].is_array()) throw ValidationError("'triads' must be an array of [i,j,k]");
    std::vector<Triad> triads;
    for (std::size_t t = 0; t < j["triads"].size(); ++t) {
        const Json& e = j["triads"][t];
        if (!e.is_array() || e.size() != 3 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned() ||
            !e[2].is_number_unsigned()) {
            throw ValidationError("triad " + std::to_string(t) + " must be three non-negative integers");
        }
        try {
            triads.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<std::size_t>());
        } catch (const ValidationError& err) {
            throw ValidationError("triad " + std::to_string(t) + ": " + err.what());
        }
    }
    return KSSet(std::move(name), tol, std::move(dirs), std::move(triads));
}

inline KSSet parse_ks_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    return ks_set_from_json(parse_json(text, path.string()));
}

}  // namespace ksf::io
