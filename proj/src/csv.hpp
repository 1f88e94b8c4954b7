#pragma once

#include <charconv>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "cyclesync/error.hpp"

namespace cyclesync::detail {

// Splits one comma-separated line. Double-quoted fields may contain commas.
inline std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline std::string trim(std::string_view s) {
    size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r' || s[a] == '\n')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r' || s[b - 1] == '\n')) --b;
    return std::string(s.substr(a, b - a));
}

inline bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last && first != last;
}

inline bool parse_int(const std::string& s, int& out) {
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty();
}

// Reads a CSV file with the exact expected header. Returns data rows with 1-based line numbers.
struct CsvRow {
    int line = 0;
    std::vector<std::string> fields;
};

inline std::vector<CsvRow> read_csv(const std::string& path, const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    bool have_header = false;
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line = line.substr(3);
        if (trim(line).empty()) continue;
        auto fields = split_csv(line);
        for (auto& f : fields) f = trim(f);
        if (!have_header) {
            if (fields != header) {
                std::string expect;
                for (size_t i = 0; i < header.size(); ++i) expect += (i ? "," : "") + header[i];
                fail(ErrorCode::MalformedRow, path + ":" + std::to_string(lineno) + ": expected header '" + expect + "'");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != header.size())
            fail(ErrorCode::MalformedRow, path + ":" + std::to_string(lineno) + ": expected " +
                                              std::to_string(header.size()) + " fields");
        rows.push_back({lineno, std::move(fields)});
    }
    if (!have_header) fail(ErrorCode::MalformedRow, path + ": missing header");
    return rows;
}

}  // namespace cyclesync::detail
