#include "dispersio/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dispersio {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

double parse_double(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t.empty()) throw std::invalid_argument(what + ": empty value");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE)
        throw std::invalid_argument(what + ": not a number: '" + t + "'");
    if (std::isnan(v)) throw std::invalid_argument(what + ": NaN");
    return v;
}

long long parse_int(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t.empty()) throw std::invalid_argument(what + ": empty value");
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size() || errno == ERANGE)
        throw std::invalid_argument(what + ": not an integer: '" + t + "'");
    return v;
}

FlatConfig FlatConfig::parse(const std::string& text) {
    FlatConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": missing '='");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        if (!cfg.values_.emplace(key, value).second)
            throw std::invalid_argument("config: duplicate key '" + key + "'");
    }
    return cfg;
}

FlatConfig FlatConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string FlatConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double FlatConfig::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(it->second, key);
}

long long FlatConfig::get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_int(it->second, key);
}

bool FlatConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::invalid_argument(key + ": not a boolean: '" + v + "'");
}

std::vector<double> FlatConfig::get_list(const std::string& key, const std::vector<double>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_double(item, key));
    }
    return out;
}

void FlatConfig::require_known(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_)
        if (!allowed.count(k)) throw std::invalid_argument("config: unknown key '" + k + "'");
}

}  // namespace dispersio
