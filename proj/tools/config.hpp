#pragma once

#include <map>
#include <string>

namespace cyclesync::cli {

// Flattens an INI file into "section.key" -> value. Throws std::runtime_error on parse errors.
std::map<std::string, std::string> load_ini(const std::string& path);

// Parses "section.key=value". Throws std::runtime_error when malformed.
std::pair<std::string, std::string> parse_assignment(const std::string& text);

}  // namespace cyclesync::cli
