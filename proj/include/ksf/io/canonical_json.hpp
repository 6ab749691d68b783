#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "json.hpp"
#include "ksf/error.hpp"

namespace ksf::io {

using Json = nlohmann::json;

namespace detail {

inline void write_canonical(const Json& j, std::string& out) {
    switch (j.type()) {
        case Json::value_t::null: out += "null"; break;
        case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
        case Json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
        case Json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) throw NumericalError("cannot serialize a non-finite number");
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            std::string s(buf);
            if (s.find_first_of(".e") == std::string::npos) s += ".0";
            out += s;
            break;
        }
        case Json::value_t::string: out += j.dump(); break;
        case Json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += ',';
                first = false;
                write_canonical(e, out);
            }
            out += ']';
            break;
        }
        case Json::value_t::object: {
            // nlohmann::json keeps object keys in a std::map, so iteration is sorted.
            out += '{';
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ',';
                first = false;
                out += Json(key).dump();
                out += ':';
                write_canonical(value, out);
            }
            out += '}';
            break;
        }
        default: throw NumericalError("unsupported JSON value in canonical serialization");
    }
}

}  // namespace detail

/// Compact JSON with sorted keys and every double printed with 17 significant
/// digits (always carrying a '.' or exponent).
inline std::string canonical_dump(const Json& j) {
    std::string out;
    detail::write_canonical(j, out);
    return out;
}

/// Lowercase hex SHA-256.
inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw NumericalError("SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        hex += kHex[md[i] >> 4];
        hex += kHex[md[i] & 0xF];
    }
    return hex;
}

inline std::string canonical_digest(const Json& j) { return sha256_hex(canonical_dump(j)); }

/// Parses text, reporting failures as ParseError with line and byte offset.
inline Json parse_json(std::string_view text, std::string_view origin) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        std::size_t line = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte, text.size());
        for (std::size_t i = 0; i + 1 < stop; ++i) line += text[i] == '\n' ? 1 : 0;
        throw ParseError(std::string(origin) + ": invalid JSON at line " + std::to_string(line) + ", offset " +
                         std::to_string(e.byte) + ": " + e.what());
    }
}

}  // namespace ksf::io
