#include "dispersio/solver.hpp"

#include "dispersio/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dispersio {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Physical samples of d/dx_axis of component c (Nyquist wave dropped).
std::vector<cplx> derivative_grid(const SpectralField& f, int c, int axis, SpectralField& scratch) {
    const int n = f.n();
    const cplx* src = f.component(c);
    cplx* dst = scratch.component(0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                const int idx = axis == 0 ? i : (axis == 1 ? j : l);
                const double k = (2 * idx == n) ? 0.0 : f.xi(idx);
                const std::size_t p = f.index(i, j, l);
                dst[p] = cplx(0.0, k) * src[p];
            }
    return to_physical(scratch, 0);
}

bool all_finite(const SpectralField& f) {
    for (const cplx& v : f.data())
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

SpectralField nonlinearity_impl(const SpectralField& f, double gamma_bar, double* umax) {
    if (f.ncomp() != 4) throw std::invalid_argument("nonlinearity: expected a 4-component field");
    const std::size_t m = f.modes();
    SpectralField scratch(f.n(), f.length(), 1);

    std::vector<std::vector<cplx>> v(4);
    for (int c = 0; c < 4; ++c) v[c] = to_physical(f, c);
    if (umax) {
        double mx = 0.0;
        for (std::size_t p = 0; p < m; ++p)
            mx = std::max(mx, std::norm(v[1][p]) + std::norm(v[2][p]) + std::norm(v[3][p]));
        *umax = std::sqrt(mx);
    }

    std::vector<std::vector<cplx>> out(4, std::vector<cplx>(m, cplx(0.0)));
    std::vector<cplx> divu(m, cplx(0.0));
    for (int axis = 0; axis < 3; ++axis) {
        const std::vector<cplx>& ua = v[1 + axis];
        const std::vector<cplx> db = derivative_grid(f, 0, axis, scratch);
        for (std::size_t p = 0; p < m; ++p) {
            out[0][p] += ua[p] * db[p];
            out[1 + axis][p] += gamma_bar * v[0][p] * db[p];
        }
        for (int c = 1; c < 4; ++c) {
            const std::vector<cplx> du = derivative_grid(f, c, axis, scratch);
            for (std::size_t p = 0; p < m; ++p) out[c][p] += ua[p] * du[p];
            if (c == 1 + axis)
                for (std::size_t p = 0; p < m; ++p) divu[p] += du[p];
        }
    }
    for (std::size_t p = 0; p < m; ++p) out[0][p] += gamma_bar * v[0][p] * divu[p];

    SpectralField res(f.n(), f.length(), 4);
    for (int c = 0; c < 4; ++c) from_physical(out[c], res, c);
    dealias(res);
    return res;
}

}  // namespace

void SimConfig::validate(bool allow_low_m) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("SimConfig: dt must be positive");
    if (!power_of_two(n)) throw std::invalid_argument("SimConfig: N must be a power of two");
    if (!(length > 0.0)) throw std::invalid_argument("SimConfig: L must be positive");
    if (!(t_max > 0.0)) throw std::invalid_argument("SimConfig: t_max must be positive");
    if (!(m >= 0.0) || (!allow_low_m && m < 3.0)) throw std::invalid_argument("SimConfig: m must be >= 3");
    if (!(doubling > 1.0)) throw std::invalid_argument("SimConfig: doubling factor must exceed 1");
    if (sample_every < 1) throw std::invalid_argument("SimConfig: sample cadence must be >= 1");
}

bool in_dealiased_band(const SpectralField& f, int i, int j, int l) {
    const int n = f.n();
    auto ok = [&](int idx) { return 3 * std::abs(f.wave(idx)) < n; };
    return ok(i) && ok(j) && ok(l);
}

void dealias(SpectralField& f) {
    const int n = f.n();
    for (int c = 0; c < f.ncomp(); ++c) {
        cplx* d = f.component(c);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l)
                    if (!in_dealiased_band(f, i, j, l)) d[f.index(i, j, l)] = 0.0;
    }
}

SpectralField nonlinearity(const SpectralField& u, double gamma_bar) {
    return nonlinearity_impl(u, gamma_bar, nullptr);
}

double sobolev_norm(const SpectralField& u, double m) {
    if (m < 0.0) throw std::invalid_argument("sobolev_norm: m must be >= 0");
    const int n = u.n();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                const double xi2 = u.xi(i) * u.xi(i) + u.xi(j) * u.xi(j) + u.xi(l) * u.xi(l);
                const double w = std::pow(1.0 + xi2, m);
                const std::size_t p = u.index(i, j, l);
                double a = 0.0;
                for (int c = 0; c < u.ncomp(); ++c) a += std::norm(u.component(c)[p]);
                s += w * a;
            }
    return std::sqrt(s);
}

double linf_norm(const SpectralField& u) {
    const auto mag = magnitude(u);
    return mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
}

double grad_linf_norm(const SpectralField& u) {
    const auto mag = gradient_magnitude(u);
    return mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
}

LawsonStepper::LawsonStepper(const SimConfig& cfg)
    : cfg_(cfg), plan_(std::make_shared<PropagatorPlan>(cfg.params, cfg.n, cfg.length)) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("LawsonStepper: dt must be positive");
    half_ = plan_->tabulate(0.5 * cfg.dt);
    full_ = plan_->tabulate(cfg.dt);
}

SpectralField LawsonStepper::rhs(const SpectralField& u) const {
    SpectralField f = nonlinearity_impl(u, cfg_.params.gamma_bar, nullptr);
    f *= -1.0;
    return f;
}

double LawsonStepper::cfl_number(const SpectralField& u) const {
    SpectralField vel(u.n(), u.length(), 3);
    for (int c = 0; c < 3; ++c) std::copy_n(u.component(c + 1), u.modes(), vel.component(c));
    return cfg_.dt * linf_norm(vel) * u.n() / u.length();
}

SpectralField LawsonStepper::step(const SpectralField& u) const {
    if (u.ncomp() != 4 || u.n() != cfg_.n || u.length() != cfg_.length)
        throw std::invalid_argument("step: field does not match the configured grid");
    const double h = cfg_.dt;
    const std::size_t m = u.modes() * 4;

    SpectralField eu, au;
    PropagatorPlan::apply(full_, u, eu);
    PropagatorPlan::apply(half_, u, au);

    if (!cfg_.nonlinear) {
        if (!all_finite(eu)) throw BlowupDetected("step: non-finite field", {});
        return eu;
    }

    double umax = 0.0;
    SpectralField k1 = nonlinearity_impl(u, cfg_.params.gamma_bar, &umax);
    k1 *= -1.0;
    if (cfg_.check_cfl && h * umax * u.n() / u.length() > 0.5)
        throw CflViolation("step: dt ||u||_inf N / L exceeds 0.5");

    SpectralField tmp = u, stage;
    {
        cplx* t = tmp.data().data();
        const cplx* a = k1.data().data();
        for (std::size_t p = 0; p < m; ++p) t[p] += 0.5 * h * a[p];
    }
    PropagatorPlan::apply(half_, tmp, stage);
    const SpectralField k2 = rhs(stage);

    stage = au;
    {
        cplx* s = stage.data().data();
        const cplx* a = k2.data().data();
        for (std::size_t p = 0; p < m; ++p) s[p] += 0.5 * h * a[p];
    }
    const SpectralField k3 = rhs(stage);

    SpectralField ak3;
    PropagatorPlan::apply(half_, k3, ak3);
    stage = eu;
    {
        cplx* s = stage.data().data();
        const cplx* a = ak3.data().data();
        for (std::size_t p = 0; p < m; ++p) s[p] += h * a[p];
    }
    const SpectralField k4 = rhs(stage);

    SpectralField ek1, a23;
    PropagatorPlan::apply(full_, k1, ek1);
    tmp = k2;
    tmp += k3;
    PropagatorPlan::apply(half_, tmp, a23);

    SpectralField out = eu;
    {
        cplx* o = out.data().data();
        const cplx* e1 = ek1.data().data();
        const cplx* a = a23.data().data();
        const cplx* b4 = k4.data().data();
        for (std::size_t p = 0; p < m; ++p) o[p] += (h / 6.0) * (e1[p] + 2.0 * a[p] + b4[p]);
    }
    if (!all_finite(out)) throw BlowupDetected("step: non-finite field", {});
    return out;
}

SpectralField step(const SpectralField& u, double dt, const SimConfig& cfg) {
    SimConfig c = cfg;
    c.dt = dt;
    return LawsonStepper(c).step(u);
}

TrajectoryRecord run_lifespan(const SimConfig& cfg_in, const SpectralField& u0) {
    cfg_in.validate(true);
    // An integer number of steps lands exactly on t_max.
    SimConfig cfg = cfg_in;
    const long long nsteps = std::max(1LL, static_cast<long long>(std::ceil(cfg.t_max / cfg.dt - 1e-9)));
    cfg.dt = cfg.t_max / static_cast<double>(nsteps);
    const LawsonStepper stepper(cfg);

    SpectralField u = u0;
    dealias(u);
    TrajectoryRecord rec;
    rec.h_m_initial = sobolev_norm(u, cfg.m);
    auto sample = [&](double t, double hm) {
        rec.t.push_back(t);
        rec.h_m.push_back(hm);
        rec.linf.push_back(linf_norm(u));
        rec.grad_linf.push_back(grad_linf_norm(u));
    };
    sample(0.0, rec.h_m_initial);

    rec.t_doubling = cfg.t_max;
    for (long long s = 1; s <= nsteps; ++s) {
        try {
            u = stepper.step(u);
        } catch (const BlowupDetected&) {
            throw BlowupDetected("run_lifespan: non-finite field", rec);
        }
        const double t = (s == nsteps) ? cfg.t_max : static_cast<double>(s) * cfg.dt;
        const double hm = sobolev_norm(u, cfg.m);
        if (!std::isfinite(hm) || hm > 1e6 * rec.h_m_initial)
            throw BlowupDetected("run_lifespan: H^m norm diverged", rec);
        if (hm > cfg.doubling * rec.h_m_initial) {
            sample(t, hm);
            rec.t_doubling = t;
            rec.doubled = true;
            return rec;
        }
        if (s % cfg.sample_every == 0 || s == nsteps) sample(t, hm);
    }
    return rec;
}

double dispersion_report(const TrajectoryRecord& rec, double q, int l) {
    if (l != 0 && l != 1) throw std::invalid_argument("dispersion_report: l must be 0 or 1");
    if (!(q >= 1.0)) throw std::invalid_argument("dispersion_report: q must be >= 1");
    std::vector<double> t, g;
    const std::vector<double>& src = l == 0 ? rec.linf : rec.grad_linf;
    for (std::size_t i = 0; i < rec.t.size() && i < src.size(); ++i) {
        if (rec.t[i] > rec.t_doubling) break;
        t.push_back(rec.t[i]);
        g.push_back(src[i]);
    }
    if (t.size() < 2) return 0.0;
    return time_lq(t, g, q);
}

SpectralField initial_condition(const std::string& name, const SimConfig& cfg, double amplitude, double param) {
    const int n = cfg.n;
    const double len = cfg.length;
    SpectralField f(n, len, 4);
    if (name == "bump") {
        const double w = param > 0.0 ? param : 0.6 * len;
        const double box = 2.0 * std::numbers::pi * len;
        const double h = box / n;
        const double c = 0.5 * box;
        std::vector<cplx> grid(f.modes());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    const double dx = i * h - c, dy = j * h - c, dz = l * h - c;
                    grid[f.index(i, j, l)] = amplitude * std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * w * w));
                }
        from_physical(grid, f, 0);
        // Drop the x3-average: those modes do not disperse.
        cplx* b = f.component(0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) b[f.index(i, j, 0)] = 0.0;
    } else if (name == "acoustic") {
        f.at(0, 1, 0, 0) = 0.5 * amplitude;
        f.at(0, n - 1, 0, 0) = 0.5 * amplitude;
    } else if (name == "shell") {
        const int k = static_cast<int>(std::lround(param));
        const double scale = std::ldexp(1.0, -k);
        cplx* b = f.component(0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    const double r = std::sqrt(f.xi(i) * f.xi(i) + f.xi(j) * f.xi(j) + f.xi(l) * f.xi(l));
                    b[f.index(i, j, l)] = amplitude * lp_phi(r * scale);
                }
    } else {
        throw std::invalid_argument("initial_condition: unknown name '" + name + "'");
    }
    dealias(f);
    return f;
}

}  // namespace dispersio
