#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dispersio::suite {

struct SymbolSuiteOptions {
    int samples = 1000;          // random (xi, nu) for eigen and completeness checks
    int hessian_samples = 500;   // per branch
    std::vector<double> nu_values;  // empty: log-uniform on (0.01, 100)
    double tol_eigen = 1e-9;
    double tol_completeness = 1e-10;
    double tol_symmetry = 1e-12;
    double tol_hessian = 1e-6;
    double tol_exponent = 0.05;
    std::uint64_t seed = 1;
};

struct CheckResult {
    std::string name;
    bool pass = true;
    double worst = 0.0;      // worst residual, or |fitted - target| for exponents
    double tolerance = 0.0;
    long count = 0;
};

struct SymbolSuiteReport {
    std::vector<CheckResult> checks;
    bool all_pass() const;
};

// Throws std::invalid_argument for non-positive nu values or sample counts.
SymbolSuiteReport run_symbol_suite(const SymbolSuiteOptions& opt);

}  // namespace dispersio::suite
