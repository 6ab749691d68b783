#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ksf/error.hpp"
#include "ksf/experiment/run.hpp"
#include "ksf/io/files.hpp"

namespace ksf::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    s = trim(s);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace detail

/// Trial CSV: header `trial,triad,r1,r2,r3`, results 0, 1 or -1 (no click).
/// Blank lines are skipped.
inline std::vector<TrialRow> parse_trial_csv(std::string_view text) {
    std::vector<TrialRow> rows;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        const std::string_view line = detail::trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;

        std::vector<std::string_view> fields;
        for (std::size_t start = 0;;) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(detail::trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (!header_seen) {
            const std::vector<std::string_view> want{"trial", "triad", "r1", "r2", "r3"};
            if (fields != want) throw MalformedRow(line_no, "expected header 'trial,triad,r1,r2,r3'");
            header_seen = true;
            continue;
        }
        if (fields.size() != 5) {
            throw MalformedRow(line_no, "expected 5 fields, found " + std::to_string(fields.size()));
        }
        TrialRow row;
        if (!detail::parse_int(fields[0], row.trial)) throw MalformedRow(line_no, "bad trial number");
        if (!detail::parse_int(fields[1], row.triad)) throw MalformedRow(line_no, "bad triad index");
        for (std::size_t m = 0; m < 3; ++m) {
            int r = 0;
            if (!detail::parse_int(fields[2 + m], r) || r < -1 || r > 1) {
                throw MalformedRow(line_no, "result r" + std::to_string(m + 1) + " must be 0, 1 or -1");
            }
            row.results[m] = static_cast<Outcome>(r);
        }
        rows.push_back(row);
    }
    if (!header_seen) throw MalformedRow(1, "missing header 'trial,triad,r1,r2,r3'");
    return rows;
}

inline std::vector<TrialRow> read_trial_csv(const std::filesystem::path& path) {
    return parse_trial_csv(read_text_file(path));
}

inline std::string format_trial_csv(const std::vector<TrialRow>& rows) {
    std::ostringstream out;
    out << "trial,triad,r1,r2,r3\n";
    for (const TrialRow& r : rows) {
        out << r.trial << ',' << r.triad << ',' << static_cast<int>(r.results[0]) << ','
            << static_cast<int>(r.results[1]) << ',' << static_cast<int>(r.results[2]) << '\n';
    }
    return out.str();
}

}  // namespace ksf::io
