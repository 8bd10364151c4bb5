#pragma once

#include "dispersio/config.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dispersio::cli {

enum ExitCode : int { kPass = 0, kInvariantFailure = 2, kConfigError = 3 };

// Anything the user can fix in the manifest or flags.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Context {
    std::filesystem::path out;
    std::uint64_t seed = 1;
    int workers = 1;
    FlatConfig cfg;
};

// Shortest round-trip decimal; "inf"/"-inf" for infinities.
std::string num(double v);

// Exponent as JSON: a number, or the string "inf".
nlohmann::json exponent_json(double v);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);

private:
    std::ofstream os_;
    std::size_t width_;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Config readers that turn parse failures into ConfigError.
std::vector<double> list_of(const Context& c, const std::string& key, const std::vector<double>& fallback);
double real_of(const Context& c, const std::string& key, double fallback);
long long int_of(const Context& c, const std::string& key, long long fallback);
std::string string_of(const Context& c, const std::string& key, const std::string& fallback);
bool bool_of(const Context& c, const std::string& key, bool fallback);
void require_keys(const Context& c, const std::set<std::string>& allowed);

// Runs fn(i) for i in [0, n) on `workers` threads. Each index is owned by
// one worker; the exception of the lowest failing index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    std::vector<std::exception_ptr> errs(n);
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    const int nt = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

int cmd_verify_symbol(const Context& c);
int cmd_decay_sweep(const Context& c);
int cmd_strichartz(const Context& c);
int cmd_lifespan(const Context& c);
int cmd_constants(const Context& c);

}  // namespace dispersio::cli
