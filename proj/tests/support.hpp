#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "csv.hpp"

namespace cyclesync::test {

inline std::string data_path(const std::string& rel) { return std::string(CYCLESYNC_TEST_DIR) + "/" + rel; }

// Rows of an oracle CSV as raw string fields, header checked.
inline std::vector<std::vector<std::string>> oracle(const std::string& name, const std::vector<std::string>& header) {
    std::vector<std::vector<std::string>> out;
    for (auto& r : detail::read_csv(data_path("oracles/" + name), header)) out.push_back(std::move(r.fields));
    return out;
}

// Scratch file location for tests that write files.
inline std::string scratch_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "cyclesync_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

inline double num(const std::string& s) {
    double v = 0.0;
    detail::parse_double(detail::trim(s), v);
    return v;
}

}  // namespace cyclesync::test
