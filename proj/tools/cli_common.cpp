#include "cli_common.hpp"

#include <charconv>
#include <cmath>

namespace dispersio::cli {

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

nlohmann::json exponent_json(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : os_(path), width_(header.size()) {
    if (!os_) throw ConfigError("cannot write " + path.string());
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

namespace {
template <class F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}
}  // namespace

std::vector<double> list_of(const Context& c, const std::string& key, const std::vector<double>& fallback) {
    return guarded([&] { return c.cfg.get_list(key, fallback); });
}
double real_of(const Context& c, const std::string& key, double fallback) {
    return guarded([&] { return c.cfg.get_double(key, fallback); });
}
long long int_of(const Context& c, const std::string& key, long long fallback) {
    return guarded([&] { return c.cfg.get_int(key, fallback); });
}
std::string string_of(const Context& c, const std::string& key, const std::string& fallback) {
    return guarded([&] { return c.cfg.get_string(key, fallback); });
}
bool bool_of(const Context& c, const std::string& key, bool fallback) {
    return guarded([&] { return c.cfg.get_bool(key, fallback); });
}
void require_keys(const Context& c, const std::set<std::string>& allowed) {
    guarded([&] {
        c.cfg.require_known(allowed);
        return 0;
    });
}

}  // namespace dispersio::cli
