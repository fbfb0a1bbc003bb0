#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "soup/parser.hpp"

namespace soup::testing {

inline std::filesystem::path fixtures_dir() {
    const char* p = std::getenv("SOUP_FIXTURES");
    return p ? std::filesystem::path(p) : std::filesystem::path("fixtures");
}

inline ProjectIndex load_fixture(const std::string& name) {
    return load_project(fixtures_dir() / name);
}

// Parses a single in-memory source buffer as a one-file project.
inline ProjectIndex parse_one(const std::string& src, const std::string& path = "t.mc") {
    ProjectIndex index;
    parse_source(index, src, path);
    return index;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace soup::testing
