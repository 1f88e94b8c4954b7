#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <stdexcept>

namespace cyclesync::cli {

namespace {

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::map<std::string, std::string> load_ini(const std::string& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw std::runtime_error(e.what());
    }
    std::map<std::string, std::string> out;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw std::runtime_error(path + ": key '" + section + "' outside of a section");
        for (const auto& [key, value] : body) out[section + "." + key] = strip(value.data());
    }
    return out;
}

std::pair<std::string, std::string> parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw std::runtime_error("expected key=value, got '" + text + "'");
    const std::string key = strip(text.substr(0, eq));
    if (key.find('.') == std::string::npos) throw std::runtime_error("key '" + key + "' must look like section.key");
    return {key, strip(text.substr(eq + 1))};
}

}  // namespace cyclesync::cli
