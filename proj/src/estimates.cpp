#include "dispersio/estimates.hpp"

#include "dispersio/error.hpp"
#include "dispersio/lp.hpp"
#include "dispersio/oscillatory.hpp"
#include "dispersio/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dispersio {

const char* exponent_class_name(ExponentClass c) {
    switch (c) {
        case ExponentClass::sharp: return "sharp";
        case ExponentClass::nonsharp: return "nonsharp";
        case ExponentClass::inadmissible: return "inadmissible";
        case ExponentClass::excluded_endpoint: return "excluded_endpoint";
    }
    return "?";
}

namespace {

double inv(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

bool rel_equal(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

double conjugate_exponent(double p) {
    if (std::isinf(p)) return 1.0;
    if (p == 1.0) return kInf;
    return p / (p - 1.0);
}

double physical_l2(const SpectralField& f) {
    return std::pow(2.0 * std::numbers::pi * f.length(), 1.5) * coeff_l2(f);
}

double resolve_amplitude(const StrichartzOptions& opt, const PhysParams& params) {
    return opt.amplitude_a > 0.0 ? opt.amplitude_a : 0.5 * params.gamma_bar;
}

// Per-mode phase p(xi) and a multiplier on the grid.
struct ModeTables {
    std::vector<double> phase;
    std::vector<double> mult;
};

ModeTables mode_tables(const SpectralField& f, const PhaseSpec& ph, int k, int fat_power) {
    ModeTables t;
    t.phase.resize(f.modes());
    t.mult.resize(f.modes());
    const int n = f.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                const Frequency xi{f.xi(i), f.xi(j), f.xi(l)};
                const std::size_t p = f.index(i, j, l);
                t.phase[p] = phase(ph, xi);
                if (fat_power == 0) {
                    t.mult[p] = 1.0;
                } else {
                    const double v = fat_cutoff(std::ldexp(xi.norm(), -k));
                    t.mult[p] = fat_power == 2 ? v * v : v;
                }
            }
    return t;
}

double cell_volume(const SpectralField& f) {
    const double h = f.spacing();
    return h * h * h;
}

// ||.||_{L^r} of the single-component field with coefficients `coef`.
double grid_norm(const SpectralField& shape, const std::vector<cplx>& coef, double r, int l,
                 SpectralField& scratch) {
    std::copy(coef.begin(), coef.end(), scratch.component(0));
    const auto mag = l == 0 ? magnitude(scratch) : gradient_magnitude(scratch);
    return lebesgue_norm_grid(mag, cell_volume(shape), r);
}

// Trapezoid L^q over samples; q = inf takes the max.
double lq_trapezoid(const std::vector<double>& t, const std::vector<double>& v, double q) {
    return time_lq(t, v, q);
}

bool horizon_ok(const std::vector<double>& v, double q) {
    if (std::isinf(q) || v.empty()) return true;
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::pow(x, q));
    return !(std::pow(v.back(), q) > 0.01 * peak);
}

constexpr int kHorizonDoublings = 12;

// Samples g on the time grid for horizon h; an automatic horizon is doubled
// until the last sample passes the 1% test, a fixed one throws at once.
template <class Sample>
std::vector<double> sample_until_decayed(double& h, bool automatic, double q, Sample&& sample) {
    for (int attempt = 0;; ++attempt) {
        std::vector<double> v = sample(h);
        if (horizon_ok(v, q)) return v;
        if (!automatic || attempt == kHorizonDoublings) {
            throw HorizonTooShort("final integrand sample exceeds 1% of its peak");
        }
        h *= 2.0;
    }
}

void check_sigma_half(double q, double r) {
    const auto t = classify_exponents(q, r, 0.5);
    if (t.cls != ExponentClass::sharp && t.cls != ExponentClass::nonsharp) {
        throw std::invalid_argument("(q, r) is not admissible for sigma = 1/2");
    }
}

}  // namespace

ExponentTriple classify_exponents(double q, double r, double sigma) {
    ExponentTriple t{q, r, sigma, ExponentClass::inadmissible, false};
    if (sigma > 1.0 && rel_equal(q, 2.0) && !std::isinf(r)) {
        t.is_endpoint = rel_equal(r, 2.0 * sigma / (sigma - 1.0));
    }
    if (q == 2.0 && std::isinf(r) && sigma == 1.0) {
        t.cls = ExponentClass::excluded_endpoint;
        return t;
    }
    if (!(q >= 2.0) || !(r >= 2.0) || !(sigma > 0.0)) return t;
    const double lhs = 2.0 * inv(q);
    const double rhs = sigma * (1.0 - 2.0 * inv(r));
    if (rel_equal(lhs, rhs)) {
        t.cls = ExponentClass::sharp;
    } else if (lhs < rhs) {
        t.cls = ExponentClass::nonsharp;
    }
    return t;
}

double shell_box_length(int k, int n) { return 3.0 * (n / 2 - 1) / (8.0 * std::ldexp(1.0, k)); }

SpectralField shell_data(int k, int n, double length) {
    SpectralField f(n, length, 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                const double r = std::sqrt(f.xi(i) * f.xi(i) + f.xi(j) * f.xi(j) + f.xi(l) * f.xi(l));
                f.at(0, i, j, l) = lp_phi(std::ldexp(r, -k));
            }
    const double nrm = physical_l2(f);
    if (nrm == 0.0) throw std::invalid_argument("shell_data: shell k does not meet the grid");
    f *= 1.0 / nrm;
    return f;
}

std::vector<double> strichartz_time_grid(double horizon, double tau, int n) {
    if (n < 2 || !(horizon > 0.0) || !(tau > 0.0)) {
        throw std::invalid_argument("time grid needs n >= 2 and positive horizon and tau");
    }
    std::vector<double> t(n);
    const double growth = std::log1p(horizon / tau);
    for (int i = 0; i < n; ++i) t[i] = tau * std::expm1(growth * i / (n - 1));
    t.back() = horizon;
    return t;
}

double auto_horizon(double eps_mk, double q, double r) {
    const double beta = 0.5 * q * (1.0 - 2.0 * inv(r));
    if (!(beta > 1.0)) throw std::invalid_argument("auto horizon needs (q/2)(1 - 2/r) > 1");
    return eps_mk * (std::pow(0.01, 1.0 / (1.0 - beta)) - 1.0);
}

namespace {

double tail_fraction(double horizon, double eps_mk, double q, double r) {
    if (std::isinf(q)) return 0.0;
    const double beta = 0.5 * q * (1.0 - 2.0 * inv(r));
    if (!(beta > 1.0)) return 1.0;
    return std::pow(1.0 + horizon / eps_mk, 1.0 - beta);
}

double pick_horizon(const StrichartzOptions& opt, double eps_mk, double q, double r) {
    if (opt.t_horizon > 0.0) return opt.t_horizon;
    if (std::isinf(q)) return auto_horizon(eps_mk, 4.0, kInf);
    return auto_horizon(eps_mk, q, r);
}

}  // namespace

StrichartzMeasurement measure_strichartz(int k, const PhysParams& params, const SpectralField& f,
                                         double q, double r, const StrichartzOptions& opt) {
    check_sigma_half(q, r);
    if (f.ncomp() != 1) throw std::invalid_argument("measure_strichartz: scalar field expected");
    const double a = resolve_amplitude(opt, params);
    const PhaseSpec ph{opt.branch, a, params.nu};
    const double mk = decay_scale_Mk(k, params.nu);
    const double eps_mk = params.epsilon * mk;

    StrichartzMeasurement m;
    m.k = k;
    m.nu = params.nu;
    m.eps = params.epsilon;
    m.q = q;
    m.r = r;
    m.horizon = pick_horizon(opt, eps_mk, q, r);
    m.predicted_shape = std::pow(2.0, 3.0 * k * (0.5 - inv(r))) * std::pow(eps_mk, inv(q));

    const double tau = std::min(eps_mk, params.delta / (a * std::ldexp(3.0, k)));
    const ModeTables tab = mode_tables(f, ph, k, 2);
    std::vector<cplx> base(f.modes());
    for (std::size_t p = 0; p < f.modes(); ++p) base[p] = tab.mult[p] * f.component(0)[p];
    std::vector<cplx> cur(f.modes());
    SpectralField scratch(f.n(), f.length(), 1);
    const auto& kt = simd::active();
    std::vector<double> t;
    const auto v = sample_until_decayed(m.horizon, opt.t_horizon <= 0.0, q, [&](double h) {
        t = strichartz_time_grid(h, tau, opt.n_t);
        std::vector<double> out(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            kt.cmul_phase(base.data(), tab.phase.data(), t[i] / params.delta, cur.data(), cur.size());
            out[i] = grid_norm(f, cur, r, 0, scratch);
        }
        return out;
    });
    m.tail_estimate = tail_fraction(m.horizon, eps_mk, q, r);
    m.measured = lq_trapezoid(t, v, q);
    m.ratio = m.measured / (m.predicted_shape * physical_l2(f));
    return m;
}

SampledSource SampledSource::trapezoid(std::vector<double> times, std::vector<SpectralField> fields) {
    if (times.size() != fields.size() || times.size() < 2) {
        throw std::invalid_argument("sampled source needs >= 2 times matching the fields");
    }
    const double h = times[1] - times[0];
    if (!(h > 0.0)) throw NonUniformGrid("source times must increase");
    for (std::size_t i = 1; i + 1 < times.size(); ++i) {
        if (std::abs((times[i + 1] - times[i]) - h) > 1e-9 * h) {
            throw NonUniformGrid("source times are not uniform");
        }
    }
    SampledSource s;
    s.weights.assign(times.size(), h);
    s.weights.front() = s.weights.back() = 0.5 * h;
    s.times = std::move(times);
    s.fields = std::move(fields);
    return s;
}

SampledSource SampledSource::impulse_at(double s0, double weight, SpectralField field) {
    SampledSource s;
    s.times = {s0};
    s.weights = {weight};
    s.fields.push_back(std::move(field));
    s.impulse = true;
    return s;
}

StrichartzMeasurement measure_duhamel_strichartz(int k, const PhysParams& params,
                                                 const SampledSource& source, double q, double r,
                                                 double qtilde, double rtilde,
                                                 const StrichartzOptions& opt) {
    check_sigma_half(q, r);
    if (classify_exponents(qtilde, rtilde, 0.5).cls != ExponentClass::sharp) {
        throw std::invalid_argument("(q~, r~) must be sharp admissible for sigma = 1/2");
    }
    if (source.fields.empty()) throw std::invalid_argument("empty source");
    const SpectralField& shape = source.fields.front();
    const double a = resolve_amplitude(opt, params);
    const PhaseSpec ph{opt.branch, a, params.nu};
    const double mk = decay_scale_Mk(k, params.nu);
    const double eps_mk = params.epsilon * mk;

    StrichartzMeasurement m;
    m.k = k;
    m.nu = params.nu;
    m.eps = params.epsilon;
    m.q = q;
    m.r = r;
    m.qtilde = qtilde;
    m.rtilde = rtilde;
    const double s_end = *std::max_element(source.times.begin(), source.times.end());
    const double s_begin = *std::min_element(source.times.begin(), source.times.end());
    double tail = pick_horizon(opt, eps_mk, q, r);
    m.predicted_shape = std::pow(2.0, 3.0 * k * (0.5 + 2.0 * inv(qtilde) - inv(r))) *
                        std::pow(eps_mk, inv(q) + inv(qtilde));

    const double tau = std::min(eps_mk, params.delta / (a * std::ldexp(3.0, k)));
    const ModeTables tab = mode_tables(shape, ph, k, 2);
    const std::size_t nm = shape.modes();
    for (const auto& fm : source.fields) {
        if (!fm.same_grid(shape) || fm.ncomp() != 1) {
            throw std::invalid_argument("source fields must share one scalar grid");
        }
    }
    std::vector<std::size_t> order(source.times.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return source.times[x] < source.times[y]; });
    std::vector<cplx> acc(nm), tmp(nm), cur(nm);
    const auto& kt = simd::active();
    SpectralField scratch(shape.n(), shape.length(), 1);

    std::vector<double> t;
    const auto v = sample_until_decayed(tail, opt.t_horizon <= 0.0, q, [&](double h) {
        // Output times: the source times followed by the stretched grid after them.
        t.clear();
        if (!source.impulse) t = source.times;
        for (double x : strichartz_time_grid(h, tau, opt.n_t)) {
            if (!t.empty() && s_end + x <= t.back()) continue;
            t.push_back(s_end + x);
        }
        if (source.impulse && s_begin < t.front()) t.insert(t.begin(), s_begin);

        // acc(t) = sum_{s_m <= t} w_m exp(-i s_m p/delta) F_m
        std::fill(acc.begin(), acc.end(), cplx(0.0, 0.0));
        std::vector<double> out(t.size());
        std::size_t next = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            while (next < order.size() && source.times[order[next]] <= t[i] * (1.0 + 1e-15)) {
                const std::size_t mi = order[next++];
                kt.cmul_phase(source.fields[mi].component(0), tab.phase.data(), -source.times[mi] / params.delta,
                              tmp.data(), nm);
                const double w = source.weights[mi];
                for (std::size_t p = 0; p < nm; ++p) acc[p] += w * tmp[p];
            }
            for (std::size_t p = 0; p < nm; ++p) tmp[p] = tab.mult[p] * acc[p];
            kt.cmul_phase(tmp.data(), tab.phase.data(), t[i] / params.delta, cur.data(), nm);
            out[i] = grid_norm(shape, cur, r, 0, scratch);
        }
        return out;
    });
    m.horizon = s_end + tail;
    m.tail_estimate = tail_fraction(tail, eps_mk, q, r);
    m.measured = lq_trapezoid(t, v, q);

    if (!source.impulse) {
        const double rp = conjugate_exponent(rtilde);
        const double qp = conjugate_exponent(qtilde);
        std::vector<double> fn;
        for (const auto& fm : source.fields) fn.push_back(lebesgue_norm(fm, rp));
        const double norm = time_lq(source.times, fn, qp);
        m.source_norm = norm;
        if (norm > 0.0) m.ratio = m.measured / (m.predicted_shape * norm);
    }
    return m;
}

double sobolev_norm_physical(const SpectralField& f, double s) {
    double acc = 0.0;
    const int n = f.n();
    for (int c = 0; c < f.ncomp(); ++c)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    const double x2 = f.xi(i) * f.xi(i) + f.xi(j) * f.xi(j) + f.xi(l) * f.xi(l);
                    acc += std::pow(1.0 + x2, s) * std::norm(f.at(c, i, j, l));
                }
    return std::pow(2.0 * std::numbers::pi * f.length(), 1.5) * std::sqrt(acc);
}

ChainBound besov_chain_bound(const SpectralField& f, const PhysParams& params, double q, int l,
                             const StrichartzOptions& opt) {
    if (l != 0 && l != 1) throw std::invalid_argument("besov_chain_bound: l must be 0 or 1");
    if (!(q >= 4.0) || std::isinf(q)) throw std::invalid_argument("besov_chain_bound: q in [4, inf)");
    if (f.ncomp() != 1) throw std::invalid_argument("besov_chain_bound: scalar field expected");
    ChainBound out;
    out.rhs = std::pow(params.epsilon, 1.0 / q) * sobolev_norm_physical(f, 2.0 + l);
    if (out.rhs == 0.0) return out;

    const double a = resolve_amplitude(opt, params);
    const PhaseSpec ph{opt.branch, a, params.nu};
    // Slowest envelope among the shells present on the grid.
    const double xi_lo = 1.0 / f.length();
    const double xi_hi = std::sqrt(3.0) * (f.n() / 2) / f.length();
    const int k_lo = static_cast<int>(std::floor(std::log2(xi_lo / (8.0 / 3.0))));
    const double eps_mk = params.epsilon * decay_scale_Mk(k_lo, params.nu);
    out.horizon = opt.t_horizon > 0.0 ? opt.t_horizon : auto_horizon(eps_mk, q, kInf);
    const double tau = std::min(params.epsilon, params.delta / (a * xi_hi));
    const ModeTables tab = mode_tables(f, ph, 0, 0);
    std::vector<cplx> cur(f.modes());
    SpectralField scratch(f.n(), f.length(), 1);
    const auto& kt = simd::active();
    std::vector<double> t;
    const auto v = sample_until_decayed(out.horizon, opt.t_horizon <= 0.0, q, [&](double h) {
        t = strichartz_time_grid(h, tau, opt.n_t);
        std::vector<double> g(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            kt.cmul_phase(f.component(0), tab.phase.data(), t[i] / params.delta, cur.data(), cur.size());
            g[i] = grid_norm(f, cur, kInf, l, scratch);
        }
        return g;
    });
    out.lhs = time_lq(t, v, q);
    return out;
}

}  // namespace dispersio
