#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ksf/error.hpp"

namespace ksf::io {

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ksf::io
