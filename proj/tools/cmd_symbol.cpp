#include "cli_common.hpp"
#include "symbol_suite.hpp"

#include "dispersio/fit.hpp"
#include "dispersio/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace dispersio::cli {

int cmd_verify_symbol(const Context& c) {
    require_keys(c, {"seed", "workers", "samples", "hessian_samples", "nu", "tol_eigen", "tol_completeness",
                     "tol_symmetry", "tol_hessian", "tol_exponent"});
    suite::SymbolSuiteOptions o;
    o.samples = static_cast<int>(int_of(c, "samples", o.samples));
    o.hessian_samples = static_cast<int>(int_of(c, "hessian_samples", o.hessian_samples));
    o.nu_values = list_of(c, "nu", {});
    o.tol_eigen = real_of(c, "tol_eigen", o.tol_eigen);
    o.tol_completeness = real_of(c, "tol_completeness", o.tol_completeness);
    o.tol_symmetry = real_of(c, "tol_symmetry", o.tol_symmetry);
    o.tol_hessian = real_of(c, "tol_hessian", o.tol_hessian);
    o.tol_exponent = real_of(c, "tol_exponent", o.tol_exponent);
    o.seed = c.seed;
    if (c.cfg.has("nu") && o.nu_values.empty()) throw ConfigError("nu: empty list");
    for (double t : {o.tol_eigen, o.tol_completeness, o.tol_symmetry, o.tol_hessian, o.tol_exponent}) {
        if (!(t > 0.0)) throw ConfigError("tolerances must be positive");
    }

    suite::SymbolSuiteReport rep;
    try {
        rep = suite::run_symbol_suite(o);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    nlohmann::json checks = nlohmann::json::array();
    for (const auto& ch : rep.checks) {
        checks.push_back({{"name", ch.name}, {"pass", ch.pass}, {"worst", ch.worst},
                          {"tolerance", ch.tolerance}, {"count", ch.count}});
        std::cout << (ch.pass ? "PASS " : "FAIL ") << ch.name << " worst=" << num(ch.worst)
                  << " tol=" << num(ch.tolerance) << '\n';
    }
    write_json(c.out / "verify_symbol.json", {{"command", "verify-symbol"},
                                              {"seed", c.seed},
                                              {"samples", o.samples},
                                              {"hessian_samples", o.hessian_samples},
                                              {"checks", checks},
                                              {"pass", rep.all_pass()}});
    return rep.all_pass() ? kPass : kInvariantFailure;
}

int cmd_constants(const Context& c) {
    require_keys(c, {"seed", "workers", "k_min", "k_max", "r", "max_spread", "slope_tol"});
    const int k_min = static_cast<int>(int_of(c, "k_min", -5));
    const int k_max = static_cast<int>(int_of(c, "k_max", 5));
    const auto rs = list_of(c, "r", {4.0, kInf});
    const double max_spread = real_of(c, "max_spread", 1e-6);
    const double slope_tol = real_of(c, "slope_tol", 0.01);
    if (k_max <= k_min) throw ConfigError("need k_max > k_min");
    if (rs.empty()) throw ConfigError("r: empty list");
    for (double r : rs)
        if (!(r >= 2.0)) throw ConfigError("r must be >= 2");

    const std::size_t nk = static_cast<std::size_t>(k_max - k_min + 1);
    std::vector<CutoffConstants> tab(nk * rs.size());
    parallel_for(tab.size(), c.workers, [&](std::size_t i) {
        tab[i] = cutoff_constants(k_min + static_cast<int>(i / rs.size()), rs[i % rs.size()]);
    });

    CsvWriter csv(c.out / "constants.csv", {"k", "r", "c1", "c2", "c4r"});
    for (std::size_t i = 0; i < tab.size(); ++i) {
        csv.row({std::to_string(k_min + static_cast<int>(i / rs.size())), num(rs[i % rs.size()]), num(tab[i].c1),
                 num(tab[i].c2), num(tab[i].c4r)});
    }

    auto spread = [&](auto get) {
        double lo = 1e300, hi = 0.0, mean = 0.0;
        for (std::size_t i = 0; i < nk; ++i) {
            const double v = get(tab[i * rs.size()]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            mean += v / nk;
        }
        return (hi - lo) / mean;
    };
    const double s1 = spread([](const CutoffConstants& x) { return x.c1; });
    const double s2 = spread([](const CutoffConstants& x) { return x.c2; });
    bool pass = s1 <= max_spread && s2 <= max_spread;

    nlohmann::json slopes = nlohmann::json::array();
    for (std::size_t j = 0; j < rs.size(); ++j) {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < nk; ++i) {
            x.push_back(k_min + static_cast<double>(i));
            y.push_back(std::log2(tab[i * rs.size() + j].c4r));
        }
        const double slope = fit_line(x, y).slope;
        const double target = 3.0 * (0.5 - (std::isinf(rs[j]) ? 0.0 : 1.0 / rs[j]));
        const bool ok = std::abs(slope - target) <= slope_tol;
        pass = pass && ok;
        slopes.push_back({{"r", exponent_json(rs[j])}, {"slope", slope}, {"target", target}, {"pass", ok}});
        std::cout << (ok ? "PASS " : "FAIL ") << "c4r dyadic slope r=" << num(rs[j]) << " slope=" << num(slope)
                  << " target=" << num(target) << '\n';
    }
    std::cout << (s1 <= max_spread ? "PASS " : "FAIL ") << "c1 spread=" << num(s1) << '\n';
    std::cout << (s2 <= max_spread ? "PASS " : "FAIL ") << "c2 spread=" << num(s2) << '\n';
    write_json(c.out / "constants_summary.json", {{"command", "constants"},
                                                  {"seed", c.seed},
                                                  {"k_min", k_min},
                                                  {"k_max", k_max},
                                                  {"c1_spread", s1},
                                                  {"c2_spread", s2},
                                                  {"max_spread", max_spread},
                                                  {"slopes", slopes},
                                                  {"pass", pass}});
    return pass ? kPass : kInvariantFailure;
}

}  // namespace dispersio::cli
