#include "cli_common.hpp"

#include "dispersio/error.hpp"
#include "dispersio/estimates.hpp"
#include "dispersio/fit.hpp"
#include "dispersio/lp.hpp"
#include "dispersio/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

namespace dispersio::cli {

namespace {

std::vector<Branch> branches_of(const Context& c) {
    std::vector<Branch> out;
    std::istringstream in(string_of(c, "branches", "minus,plus"));
    std::string item;
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item == "minus") out.push_back(Branch::minus);
        else if (item == "plus") out.push_back(Branch::plus);
        else if (!item.empty()) throw ConfigError("branches: unknown branch '" + item + "'");
    }
    if (out.empty()) throw ConfigError("branches: empty list");
    return out;
}

std::vector<int> int_list(const Context& c, const std::string& key, const std::vector<double>& fallback) {
    std::vector<int> out;
    for (double v : list_of(c, key, fallback)) {
        if (v != std::round(v)) throw ConfigError(key + ": integers expected");
        out.push_back(static_cast<int>(v));
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

std::string tag(double v) {
    std::string s = num(v);
    std::replace(s.begin(), s.end(), '.', 'p');
    std::replace(s.begin(), s.end(), '-', 'm');
    return s;
}

}  // namespace

int cmd_decay_sweep(const Context& c) {
    require_keys(c, {"seed", "workers", "branches", "sigma", "nu", "samples", "theta_lo", "theta_hi", "amplitude_a",
                     "min_alpha", "min_r2"});
    const auto branches = branches_of(c);
    const auto sigmas = list_of(c, "sigma", {0.01, 1.0, 100.0});
    const double nu = real_of(c, "nu", 1.0);
    const long long samples = int_of(c, "samples", 13);
    const double amp = real_of(c, "amplitude_a", 1.0);
    const double min_alpha = real_of(c, "min_alpha", 0.45);
    const double min_r2 = real_of(c, "min_r2", 0.95);
    if (sigmas.empty()) throw ConfigError("sigma: empty list");
    for (double s : sigmas)
        if (!(s > 0.0) || std::isinf(s)) throw ConfigError("sigma values must be positive");
    if (!(nu > 0.0) || std::isinf(nu)) throw ConfigError("nu must be positive");
    if (!(amp > 0.0)) throw ConfigError("amplitude_a must be positive");
    if (samples < 1) throw ConfigError("samples: empty theta grid");
    if (samples < 3) throw ConfigError("samples: the fit needs at least 3 theta values");
    const bool fixed_window = c.cfg.has("theta_lo") || c.cfg.has("theta_hi");
    if (fixed_window && !(c.cfg.has("theta_lo") && c.cfg.has("theta_hi"))) {
        throw ConfigError("theta_lo and theta_hi go together");
    }

    struct Cell {
        SweepRequest req;
        DecayMeasurement m;
        bool poor_fit = false;
    };
    std::vector<Cell> cells;
    for (Branch b : branches)
        for (double s : sigmas) {
            Cell cell;
            cell.req = default_sweep(b, s, static_cast<int>(samples));
            cell.req.amplitude_a = amp;
            if (fixed_window) {
                cell.req.theta_lo = real_of(c, "theta_lo", 0.0);
                cell.req.theta_hi = real_of(c, "theta_hi", 0.0);
                if (!(cell.req.theta_lo > 0.0) || !(cell.req.theta_hi > cell.req.theta_lo)) {
                    throw ConfigError("empty theta grid: need theta_hi > theta_lo > 0");
                }
                if (std::log10(cell.req.theta_hi / cell.req.theta_lo) < 2.0) {
                    throw ConfigError("theta window must span two decades");
                }
            }
            cells.push_back(cell);
        }

    parallel_for(cells.size(), c.workers, [&](std::size_t i) {
        try {
            decay_sweep(cells[i].req, {}, {}, 1, &cells[i].m);
        } catch (const PoorFit&) {
            cells[i].poor_fit = true;
        }
    });

    bool pass = true;
    nlohmann::json jc = nlohmann::json::array();
    for (const Cell& cell : cells) {
        const auto& m = cell.m;
        const double k = std::log2(nu / cell.req.sigma_k);
        const std::string reg = regime_name(m.regime);
        const std::string file = std::string("decay_") + branch_name(cell.req.branch) + "_" + reg + "_s" +
                                 tag(cell.req.sigma_k) + ".csv";
        CsvWriter csv(c.out / file, {"theta", "sup_abs", "regime", "branch", "sigma_k", "k", "nu"});
        for (const auto& s : m.samples) {
            csv.row({num(s.theta), num(s.sup_abs), reg, branch_name(cell.req.branch), num(cell.req.sigma_k), num(k),
                     num(nu)});
        }
        const bool ok = !cell.poor_fit && m.alpha >= min_alpha && m.fit_r2 >= min_r2;
        pass = pass && ok;
        jc.push_back({{"branch", branch_name(cell.req.branch)},
                      {"regime", reg},
                      {"sigma_k", cell.req.sigma_k},
                      {"k", k},
                      {"nu", nu},
                      {"theta_lo", cell.req.theta_lo},
                      {"theta_hi", cell.req.theta_hi},
                      {"samples", cell.req.n_samples},
                      {"alpha", m.alpha},
                      {"r2", m.fit_r2},
                      {"fit_window", {m.window_lo, m.window_hi}},
                      {"theta_onset", decay_onset_theta(m)},
                      {"trivial_bound_ok", m.trivial_bound_ok},
                      {"envelope_monotone", m.envelope_monotone},
                      {"pass", ok},
                      {"csv", file}});
        std::cout << (ok ? "PASS " : "FAIL ") << branch_name(cell.req.branch) << ' ' << reg
                  << " sigma_k=" << num(cell.req.sigma_k) << " alpha=" << num(m.alpha) << " r2=" << num(m.fit_r2)
                  << '\n';
    }
    write_json(c.out / "decay_summary.json", {{"command", "decay-sweep"},
                                              {"seed", c.seed},
                                              {"min_alpha", min_alpha},
                                              {"min_r2", min_r2},
                                              {"cells", jc},
                                              {"pass", pass}});
    return pass ? kPass : kInvariantFailure;
}

int cmd_strichartz(const Context& c) {
    require_keys(c, {"seed", "workers", "branches", "nu", "eps", "k", "q", "r", "sigma", "qtilde", "rtilde", "n",
                     "n_t", "t_horizon", "slope_tol", "max_spread"});
    const auto branches = branches_of(c);
    const double nu = real_of(c, "nu", 1e-3);
    const auto eps = list_of(c, "eps", {1.0, 0.5, 0.25, 0.125});
    const auto ks = int_list(c, "k", {-4, -3, -2, -1, 0, 1, 2, 3, 4});
    const double q = real_of(c, "q", 4.0);
    const double r = real_of(c, "r", kInf);
    const double sigma = real_of(c, "sigma", 0.5);
    const bool duhamel = c.cfg.has("qtilde") || c.cfg.has("rtilde");
    const double qt = real_of(c, "qtilde", 4.0);
    const double rt = real_of(c, "rtilde", kInf);
    const int n = static_cast<int>(int_of(c, "n", 32));
    const int n_t = static_cast<int>(int_of(c, "n_t", 400));
    const double t_horizon = real_of(c, "t_horizon", 0.0);
    const double slope_tol = real_of(c, "slope_tol", duhamel ? 0.15 : 0.1);
    const double max_spread = real_of(c, "max_spread", 16.0);

    const auto cls = classify_exponents(q, r, sigma);
    if (cls.cls == ExponentClass::excluded_endpoint) throw ConfigError("(q, r, sigma) is the excluded endpoint");
    if (cls.cls == ExponentClass::inadmissible) throw ConfigError("(q, r) is not sigma-admissible");
    const auto half = classify_exponents(q, r, 0.5).cls;
    if (half != ExponentClass::sharp && half != ExponentClass::nonsharp) {
        throw ConfigError("measurements need (q, r) admissible for sigma = 1/2");
    }
    if (duhamel && classify_exponents(qt, rt, 0.5).cls != ExponentClass::sharp) {
        throw ConfigError("(qtilde, rtilde) must be sharp admissible for sigma = 1/2");
    }
    if (!(nu > 0.0) || std::isinf(nu)) throw ConfigError("nu must be positive");
    if (eps.size() < 2) throw ConfigError("eps: need at least two values");
    for (double e : eps)
        if (!(e > 0.0) || std::isinf(e)) throw ConfigError("eps values must be positive");
    if (n < 8 || (n & (n - 1)) != 0) throw ConfigError("n must be a power of two >= 8");
    if (n_t < 2) throw ConfigError("n_t must be >= 2");

    struct Cell {
        Branch b;
        int k;
        double eps;
        StrichartzMeasurement m;
    };
    std::vector<Cell> cells;
    for (Branch b : branches)
        for (int k : ks)
            for (double e : eps) cells.push_back({b, k, e, {}});

    parallel_for(cells.size(), c.workers, [&](std::size_t i) {
        Cell& cell = cells[i];
        const SpectralField f = shell_data(cell.k, n, shell_box_length(cell.k, n));
        const PhysParams p = PhysParams::make(cell.eps, nu * cell.eps, 1.0);
        StrichartzOptions o;
        o.branch = cell.b;
        o.n_t = n_t;
        o.t_horizon = t_horizon;
        if (!duhamel) {
            cell.m = measure_strichartz(cell.k, p, f, q, r, o);
            return;
        }
        // Source on s in [0, eps], nine uniform samples of a modulated shell.
        std::vector<double> ts;
        std::vector<SpectralField> fs;
        for (int j = 0; j <= 8; ++j) {
            ts.push_back(cell.eps * j / 8.0);
            SpectralField g = f;
            g *= std::sin(std::numbers::pi * j / 8.0) + 0.5;
            fs.push_back(std::move(g));
        }
        cell.m = measure_duhamel_strichartz(cell.k, p, SampledSource::trapezoid(ts, fs), q, r, qt, rt, o);
    });

    CsvWriter csv(c.out / "strichartz.csv", {"branch", "k", "nu", "eps", "sigma_k", "regime", "q", "r", "qtilde",
                                             "rtilde", "measured", "predicted_shape", "ratio", "horizon",
                                             "tail_estimate"});
    nlohmann::json records = nlohmann::json::array();
    for (const Cell& cell : cells) {
        const auto& m = cell.m;
        const auto rc = classify_regime(cell.k, nu);
        csv.row({branch_name(cell.b), std::to_string(cell.k), num(nu), num(cell.eps), num(rc.sigma_k),
                 regime_name(rc.regime), num(q), num(r), duhamel ? num(qt) : "", duhamel ? num(rt) : "",
                 num(m.measured), num(m.predicted_shape), m.ratio ? num(*m.ratio) : "", num(m.horizon),
                 num(m.tail_estimate)});
        nlohmann::json ctx = {{"branch", branch_name(cell.b)}, {"k", cell.k}, {"nu", nu}, {"eps", cell.eps},
                              {"q", exponent_json(q)}, {"r", exponent_json(r)}};
        if (duhamel) {
            ctx["qtilde"] = exponent_json(qt);
            ctx["rtilde"] = exponent_json(rt);
        }
        records.push_back({{"context", ctx},
                           {"measured", m.measured},
                           {"predicted_shape", m.predicted_shape},
                           {"ratio", m.ratio ? nlohmann::json(*m.ratio) : nlohmann::json(nullptr)},
                           {"horizon", m.horizon},
                           {"tail_estimate", m.tail_estimate}});
    }
    write_json(c.out / "strichartz_records.json", records);

    // eps-slope per (branch, k), gated in the high regime; ratio spread
    // across k at the largest eps.
    const double target = (std::isinf(q) ? 0.0 : 1.0 / q) + (duhamel ? (std::isinf(qt) ? 0.0 : 1.0 / qt) : 0.0);
    bool pass = true;
    nlohmann::json slopes = nlohmann::json::array();
    nlohmann::json spreads = nlohmann::json::array();
    const double e_ref = *std::max_element(eps.begin(), eps.end());
    for (Branch b : branches) {
        double lo = 1e300, hi = 0.0;
        for (int k : ks) {
            std::vector<double> x, y;
            for (const Cell& cell : cells) {
                if (cell.b != b || cell.k != k) continue;
                x.push_back(cell.eps);
                y.push_back(duhamel ? cell.m.measured / *cell.m.source_norm : cell.m.measured);
                if (cell.eps == e_ref && cell.m.ratio) {
                    lo = std::min(lo, *cell.m.ratio);
                    hi = std::max(hi, *cell.m.ratio);
                }
            }
            const double slope = fit_loglog(x, y).slope;
            const bool gated = classify_regime(k, nu).regime == Regime::high;
            const bool ok = std::abs(slope - target) <= slope_tol;
            if (gated) pass = pass && ok;
            slopes.push_back({{"branch", branch_name(b)}, {"k", k}, {"slope", slope}, {"target", target},
                              {"gated", gated}, {"pass", ok}});
            std::cout << (ok ? "PASS " : "FAIL ") << branch_name(b) << " k=" << k << " eps-slope=" << num(slope)
                      << " target=" << num(target) << (gated ? "" : " (not gated)") << '\n';
        }
        const double sp = hi / lo;
        const bool ok = sp <= max_spread;
        pass = pass && ok;
        spreads.push_back({{"branch", branch_name(b)}, {"eps", e_ref}, {"spread", sp}, {"max_spread", max_spread},
                           {"pass", ok}});
        std::cout << (ok ? "PASS " : "FAIL ") << branch_name(b) << " k-spread=" << num(sp) << '\n';
    }
    write_json(c.out / "strichartz_summary.json", {{"command", "strichartz"},
                                                   {"seed", c.seed},
                                                   {"duhamel", duhamel},
                                                   {"slopes", slopes},
                                                   {"spreads", spreads},
                                                   {"pass", pass}});
    return pass ? kPass : kInvariantFailure;
}

}  // namespace dispersio::cli
