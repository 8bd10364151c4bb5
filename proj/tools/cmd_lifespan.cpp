#include "cli_common.hpp"

#include "dispersio/error.hpp"
#include "dispersio/fit.hpp"
#include "dispersio/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace dispersio::cli {

namespace {

struct Run {
    bool nonlinear = true;
    double eps = 1.0;
    SimConfig cfg;
    TrajectoryRecord rec;
    bool blowup = false;
    double dispersion = 0.0;
};

SpectralField load_ic(const std::string& ic, const SimConfig& cfg, double amp, double param) {
    if (ic == "bump" || ic == "acoustic" || ic == "shell") return initial_condition(ic, cfg, amp, param);
    SpectralField u;
    try {
        u = read_dspf(ic);
    } catch (const std::exception& e) {
        throw ConfigError("ic: '" + ic + "' is neither a named condition nor a readable snapshot (" + e.what() + ")");
    }
    if (u.n() != cfg.n || u.ncomp() != 4) throw ConfigError("ic snapshot must be a 4-component field with N matching");
    return u;
}

}  // namespace

int cmd_lifespan(const Context& c) {
    require_keys(c, {"seed", "workers", "N", "L", "eps", "delta", "gamma_bar", "dt", "t_max", "m", "ic", "amplitude",
                     "ic_param", "sample_every", "doubling", "q", "linear_sweep", "slope_lo", "slope_hi", "snapshots"});
    const int n = static_cast<int>(int_of(c, "N", 32));
    const double length = real_of(c, "L", 1.0);
    const auto eps = list_of(c, "eps", {1.0, 0.5, 0.25, 0.125});
    const std::string delta_s = string_of(c, "delta", "eps");
    const double gamma_bar = real_of(c, "gamma_bar", 1.0);
    const std::string ic = string_of(c, "ic", "bump");
    const double amp = real_of(c, "amplitude", 2.0);
    const double ic_param = real_of(c, "ic_param", 0.0);
    const double q = real_of(c, "q", 4.0);
    const bool linear_sweep = bool_of(c, "linear_sweep", true);
    const double slope_lo = real_of(c, "slope_lo", 0.10);
    const double slope_hi = real_of(c, "slope_hi", 0.40);
    const bool snapshots = bool_of(c, "snapshots", false);
    if (eps.empty()) throw ConfigError("eps: empty list");
    if (!(q >= 4.0) || std::isinf(q)) throw ConfigError("q must lie in [4, inf)");

    SimConfig base;
    base.n = n;
    base.length = length;
    base.dt = real_of(c, "dt", 0.005);
    base.t_max = real_of(c, "t_max", 10.0);
    base.m = real_of(c, "m", 3.0);
    base.doubling = real_of(c, "doubling", 2.0);
    base.sample_every = static_cast<int>(int_of(c, "sample_every", 1));
    if (!(base.t_max > 0.0) || base.sample_every < 1 || !(base.doubling > 1.0)) {
        throw ConfigError("need t_max > 0, sample_every >= 1, doubling > 1");
    }

    std::vector<Run> runs;
    for (bool nl : linear_sweep ? std::vector<bool>{true, false} : std::vector<bool>{true}) {
        for (double e : eps) {
            Run r;
            r.nonlinear = nl;
            r.eps = e;
            r.cfg = base;
            r.cfg.nonlinear = nl;
            const double delta = delta_s == "eps" ? e : real_of(c, "delta", 0.0);
            try {
                r.cfg.params = PhysParams::make(e, delta, gamma_bar);
                r.cfg.validate();
            } catch (const std::invalid_argument& ex) {
                throw ConfigError(ex.what());
            }
            runs.push_back(r);
        }
    }
    const SpectralField u0 = load_ic(ic, base, amp, ic_param);

    parallel_for(runs.size(), c.workers, [&](std::size_t i) {
        Run& r = runs[i];
        try {
            r.rec = run_lifespan(r.cfg, u0);
        } catch (const BlowupDetected& b) {
            r.rec = b.record();
            r.blowup = true;
        } catch (const CflViolation& v) {
            throw ConfigError(std::string("dt too large: ") + v.what());
        }
        r.dispersion = dispersion_report(r.rec, q, 0);
    });

    nlohmann::json jr = nlohmann::json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const Run& r = runs[i];
        const std::string mode = r.nonlinear ? "nonlinear" : "linear";
        const std::string stem = "trajectory_" + mode + "_eps" + num(r.eps);
        CsvWriter csv(c.out / (stem + ".csv"),
                      {"t", "h_m_norm", "linf", "grad_linf", "mode", "eps", "delta", "gamma_bar", "nu", "N", "L"});
        const auto& p = r.cfg.params;
        for (std::size_t j = 0; j < r.rec.t.size(); ++j) {
            csv.row({num(r.rec.t[j]), num(r.rec.h_m[j]), num(r.rec.linf[j]), num(r.rec.grad_linf[j]), mode,
                     num(p.epsilon), num(p.delta), num(p.gamma_bar), num(p.nu), std::to_string(n), num(length)});
        }
        if (snapshots) write_dspf((c.out / (stem + "_u0.dspf")).string(), u0);
        jr.push_back({{"mode", mode},
                      {"eps", p.epsilon},
                      {"delta", p.delta},
                      {"nu", p.nu},
                      {"t_doubling", r.rec.t_doubling},
                      {"doubled", r.rec.doubled},
                      {"blowup", r.blowup},
                      {"h_m_initial", r.rec.h_m_initial},
                      {"dispersion_q", q},
                      {"dispersion", r.dispersion},
                      {"csv", stem + ".csv"}});
    }

    // Monotone lifespan as eps decreases (ties allowed), nonlinear runs in
    // the order of decreasing eps.
    std::vector<const Run*> nl;
    for (const Run& r : runs)
        if (r.nonlinear) nl.push_back(&r);
    std::sort(nl.begin(), nl.end(), [](const Run* a, const Run* b) { return a->eps > b->eps; });
    bool monotone = true;
    for (std::size_t i = 1; i < nl.size(); ++i) monotone = monotone && nl[i]->rec.t_doubling >= nl[i - 1]->rec.t_doubling;
    std::cout << (monotone ? "PASS " : "FAIL ") << "T_doubling non-decreasing as eps decreases:";
    for (const Run* r : nl) std::cout << ' ' << num(r->rec.t_doubling);
    std::cout << '\n';

    nlohmann::json summary = {{"command", "lifespan"}, {"seed", c.seed}, {"ic", ic}, {"amplitude", amp},
                              {"runs", jr}, {"monotone", monotone}};
    bool pass = monotone;
    if (linear_sweep && eps.size() >= 2) {
        std::vector<double> x, y;
        for (const Run& r : runs)
            if (!r.nonlinear) {
                x.push_back(r.eps);
                y.push_back(r.dispersion);
            }
        const double slope = fit_loglog(x, y).slope;
        const bool ok = slope >= slope_lo && slope <= slope_hi;
        pass = pass && ok;
        summary["dispersion_slope"] = slope;
        summary["slope_window"] = {slope_lo, slope_hi};
        summary["slope_pass"] = ok;
        std::cout << (ok ? "PASS " : "FAIL ") << "linear dispersion slope " << num(slope) << " in [" << num(slope_lo)
                  << ", " << num(slope_hi) << "]\n";
    }
    summary["pass"] = pass;
    write_json(c.out / "lifespan_summary.json", summary);
    return pass ? kPass : kInvariantFailure;
}

}  // namespace dispersio::cli
