#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dispersio {

// Flat key=value text. '#' starts a comment; blank lines are skipped;
// whitespace around keys and values is trimmed. Duplicate keys and lines
// without '=' are errors. All errors are std::invalid_argument.
class FlatConfig {
public:
    FlatConfig() = default;

    static FlatConfig parse(const std::string& text);
    static FlatConfig load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // Comma-separated list of reals; empty string gives an empty list.
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

    // Throws when a key outside `allowed` is present.
    void require_known(const std::set<std::string>& allowed) const;

private:
    std::map<std::string, std::string> values_;
};

// Strict numeric parsing shared by the config reader and the CLI.
double parse_double(const std::string& s, const std::string& what);
long long parse_int(const std::string& s, const std::string& what);

}  // namespace dispersio
