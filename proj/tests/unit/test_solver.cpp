#include "doctest.h"

#include "dispersio/fit.hpp"
#include "dispersio/solver.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace dispersio;

namespace {

SimConfig small_config(int n, double eps, double delta, double gamma_bar, double dt) {
    SimConfig c;
    c.params = PhysParams::make(eps, delta, gamma_bar);
    c.n = n;
    c.length = 1.0;
    c.dt = dt;
    c.t_max = 1.0;
    return c;
}

double max_diff(const SpectralField& a, const SpectralField& b) {
    double d = 0.0;
    for (std::size_t p = 0; p < a.data().size(); ++p) d = std::max(d, std::abs(a.data()[p] - b.data()[p]));
    return d;
}

SpectralField band_noise(int n, unsigned long long seed, double amp) {
    SpectralField f = white_noise(n, 1.0, 4, seed, true);
    dealias(f);
    f *= amp / coeff_l2(f);
    return f;
}

double energy(const SpectralField& f) {
    double e = 0.0;
    for (const cplx& v : f.data()) e += std::norm(v);
    return 0.5 * e;
}

double flux(const SpectralField& u, double gamma_bar) {
    const SpectralField nl = nonlinearity(u, gamma_bar);
    double s = 0.0;
    for (std::size_t p = 0; p < u.data().size(); ++p) s -= (std::conj(u.data()[p]) * nl.data()[p]).real();
    return s;
}

// Test-only 1D reference: u = u(x1), fields (b, u1) on N points, direct DFT,
// 2/3 truncation, classical RK4 with the full right-hand side.
struct Ref1D {
    int n;
    double gamma_bar, delta;

    std::vector<cplx> dft(const std::vector<cplx>& g, int sign) const {
        std::vector<cplx> out(n);
        for (int k = 0; k < n; ++k) {
            cplx s = 0.0;
            for (int x = 0; x < n; ++x) s += g[x] * std::polar(1.0, sign * 2.0 * std::numbers::pi * k * x / n);
            out[k] = sign < 0 ? s / static_cast<double>(n) : s;
        }
        return out;
    }
    int wave(int k) const { return k < n / 2 ? k : k - n; }

    // State in coefficients (b, u); returns d/dt.
    std::array<std::vector<cplx>, 2> rhs(const std::array<std::vector<cplx>, 2>& s) const {
        std::array<std::vector<cplx>, 2> d;
        std::vector<cplx> db(n), du(n);
        for (int k = 0; k < n; ++k) {
            const double m = (2 * k == n) ? 0.0 : wave(k);
            db[k] = cplx(0, m) * s[0][k];
            du[k] = cplx(0, m) * s[1][k];
        }
        const auto b = dft(s[0], 1), u = dft(s[1], 1), bx = dft(db, 1), ux = dft(du, 1);
        std::vector<cplx> nb(n), nu(n);
        for (int x = 0; x < n; ++x) {
            nb[x] = u[x] * bx[x] + gamma_bar * b[x] * ux[x];
            nu[x] = u[x] * ux[x] + gamma_bar * b[x] * bx[x];
        }
        const auto nbh = dft(nb, -1), nuh = dft(nu, -1);
        d[0].resize(n);
        d[1].resize(n);
        for (int k = 0; k < n; ++k) {
            const bool keep = 3 * std::abs(wave(k)) < n;
            d[0][k] = -(gamma_bar / delta) * du[k] - (keep ? nbh[k] : 0.0);
            d[1][k] = -(gamma_bar / delta) * db[k] - (keep ? nuh[k] : 0.0);
        }
        return d;
    }
};

}  // namespace

TEST_CASE("sobolev_norm one-term sums") {
    SpectralField f(8, 1.0, 4);
    CHECK(sobolev_norm(f, 3.0) == 0.0);
    f.at(2, 2, 0, 0) = 1.0;  // |xi| = 2
    CHECK(sobolev_norm(f, 3.0) == doctest::Approx(5.0 * std::sqrt(5.0)).epsilon(1e-14));
    const SpectralField g = band_noise(16, 3, 1.0);
    CHECK(std::abs(sobolev_norm(g, 0.0) - coeff_l2(g)) < 1e-12);
    // m = 0 against the grid RMS.
    const auto mag = magnitude(g);
    double s = 0.0;
    for (double v : mag) s += v * v;
    CHECK(std::abs(sobolev_norm(g, 0.0) - std::sqrt(s / mag.size())) < 1e-12);
}

TEST_CASE("nonlinearity: constant field and the cos example") {
    SpectralField c(16, 1.0, 4);
    c.at(0, 0, 0, 0) = 0.3;
    c.at(1, 0, 0, 0) = -0.7;
    c.at(3, 0, 0, 0) = 0.2;
    CHECK(max_diff(nonlinearity(c, 0.4), SpectralField(16, 1.0, 4)) == 0.0);

    const double gb = 0.7;
    SpectralField f(16, 1.0, 4);
    f.at(0, 1, 0, 0) = 0.5;
    f.at(0, 15, 0, 0) = 0.5;
    const SpectralField nl = nonlinearity(f, gb);
    // gamma_bar cos(x1)(-sin(x1)) = -(gamma_bar/2) sin(2 x1), sampled directly.
    const auto g1 = to_physical(nl, 1);
    const double h = 2.0 * std::numbers::pi / 16;
    double err = 0.0;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
            for (int l = 0; l < 16; ++l) {
                const double x = i * h;
                err = std::max(err, std::abs(g1[nl.index(i, j, l)] - gb * std::cos(x) * (-std::sin(x))));
            }
    CHECK(err < 1e-14);
    for (int c2 : {0, 2, 3})
        for (std::size_t p = 0; p < nl.modes(); ++p) CHECK(std::abs(nl.component(c2)[p]) < 1e-15);
}

TEST_CASE("nonlinearity agrees with a 2x finer grid") {
    const SpectralField u = band_noise(16, 11, 1.0);
    SpectralField fine(32, 1.0, 4);
    for (int c = 0; c < 4; ++c)
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j)
                for (int l = 0; l < 16; ++l)
                    fine.at(c, fine.slot(u.wave(i)), fine.slot(u.wave(j)), fine.slot(u.wave(l))) = u.at(c, i, j, l);
    const SpectralField a = nonlinearity(u, 0.6);
    const SpectralField b = nonlinearity(fine, 0.6);
    double err = 0.0, ref = 0.0;
    for (int c = 0; c < 4; ++c)
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j)
                for (int l = 0; l < 16; ++l) {
                    if (!in_dealiased_band(u, i, j, l)) continue;
                    const cplx fb = b.at(c, fine.slot(u.wave(i)), fine.slot(u.wave(j)), fine.slot(u.wave(l)));
                    err = std::max(err, std::abs(a.at(c, i, j, l) - fb));
                    ref = std::max(ref, std::abs(fb));
                }
    CHECK(err < 1e-8 * ref);
    CHECK(std::abs(flux(u, 0.6) - flux(fine, 0.6)) < 1e-8 * std::abs(flux(u, 0.6)));
    CHECK(a.reality_defect() < 1e-13);
}

TEST_CASE("linear-only steps equal the exact propagator for any dt") {
    const SpectralField u0 = band_noise(16, 5, 1.0);
    for (double dt : {0.01, 0.37, 5.0}) {
        SimConfig cfg = small_config(16, 0.5, 0.25, 0.5, dt);
        cfg.nonlinear = false;
        const SpectralField a = step(u0, dt, cfg);
        const SpectralField b = evolve_system(u0, dt, cfg.params);
        CHECK(max_diff(a, b) < 1e-10);
        CHECK(std::abs(sobolev_norm(a, 3.0) - sobolev_norm(u0, 3.0)) < 1e-9 * sobolev_norm(u0, 3.0));
    }
}

TEST_CASE("linear-only lifespan run never doubles and conserves norms") {
    SimConfig cfg = small_config(16, 0.25, 0.25, 0.5, 0.05);
    cfg.nonlinear = false;
    cfg.t_max = 2.0;
    cfg.sample_every = 5;
    const SpectralField u0 = band_noise(16, 9, 1.0);
    const TrajectoryRecord rec = run_lifespan(cfg, u0);
    CHECK_FALSE(rec.doubled);
    CHECK(rec.t_doubling == cfg.t_max);
    for (double h : rec.h_m) CHECK(std::abs(h - rec.h_m_initial) < 1e-9 * rec.h_m_initial);
    CHECK(rec.t.back() == cfg.t_max);
}

TEST_CASE("reality is preserved step by step") {
    SimConfig cfg = small_config(16, 0.5, 0.5, 0.5, 0.02);
    SpectralField u = band_noise(16, 21, 0.2);
    LawsonStepper st(cfg);
    for (int s = 0; s < 5; ++s) {
        const double before = u.reality_defect();
        u = st.step(u);
        CHECK(u.reality_defect() - before < 1e-11);
    }
}

TEST_CASE("energy change over one step matches the nonlinear flux") {
    const double gb = 0.5, h = 1e-4;
    SimConfig cfg = small_config(16, 0.5, 0.5, gb, h);
    SpectralField u0 = initial_condition("bump", cfg, 0.5);
    u0 += band_noise(16, 4, 0.1);
    const SpectralField u1 = LawsonStepper(cfg).step(u0);
    const double rate = (energy(u1) - energy(u0)) / h;
    const double mid = 0.5 * (flux(u0, gb) + flux(u1, gb));
    CHECK(std::abs(rate - mid) < 1e-6 * std::abs(mid));
}

TEST_CASE("Richardson ratio of step() is about 16") {
    SimConfig cfg = small_config(16, 1.0, 1.0, 0.5, 0.1);
    cfg.t_max = 0.8;
    SpectralField u0 = initial_condition("bump", cfg, 0.5, 0.8);
    u0 += band_noise(16, 8, 0.05);
    auto run = [&](double dt) {
        SimConfig c = cfg;
        c.dt = dt;
        LawsonStepper st(c);
        SpectralField u = u0;
        const int n = static_cast<int>(std::lround(cfg.t_max / dt));
        for (int s = 0; s < n; ++s) u = st.step(u);
        return u;
    };
    const SpectralField a = run(0.1), b = run(0.05), c = run(0.025);
    const double ratio = coeff_l2(a - b) / coeff_l2(b - c);
    MESSAGE("Richardson ratio " << ratio);
    CHECK(ratio > 16.0 * 0.8);
    CHECK(ratio < 16.0 * 1.2);
}

TEST_CASE("CFL precondition") {
    SimConfig cfg = small_config(16, 1.0, 1.0, 0.5, 1.0);
    SpectralField u(16, 1.0, 4);
    u.at(1, 1, 0, 0) = 1.0;
    u.at(1, 15, 0, 0) = 1.0;
    CHECK_THROWS_AS(LawsonStepper(cfg).step(u), CflViolation);
}

TEST_CASE("config validation") {
    SimConfig cfg = small_config(16, 1.0, 1.0, 0.5, 0.1);
    CHECK_NOTHROW(cfg.validate());
    cfg.n = 24;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.n = 16;
    cfg.m = 2.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.m = 3.0;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("dispersion_report of a zero trajectory") {
    SimConfig cfg = small_config(16, 1.0, 1.0, 0.5, 0.1);
    cfg.m = 3.0;
    SpectralField z(16, 1.0, 4);
    cfg.t_max = 0.3;
    const auto rec = run_lifespan(cfg, z);
    CHECK(dispersion_report(rec, 4.0, 0) == 0.0);
    CHECK(dispersion_report(rec, 4.0, 1) == 0.0);
}

TEST_CASE("nu = 0 one-dimensional acoustic data against a direct reference") {
    const double gb = 0.5, delta = 1.0, T = 0.1;
    SimConfig cfg = small_config(32, std::numeric_limits<double>::infinity(), delta, gb, 0.01);
    CHECK(cfg.params.nu == 0.0);
    SpectralField u0(32, 1.0, 4);
    u0.at(0, 1, 0, 0) = 0.1;
    u0.at(0, 31, 0, 0) = 0.1;
    u0.at(1, 1, 0, 0) = cplx(0, -0.05);
    u0.at(1, 31, 0, 0) = cplx(0, 0.05);
    u0.at(0, 2, 0, 0) = 0.03;
    u0.at(0, 30, 0, 0) = 0.03;
    LawsonStepper st(cfg);
    SpectralField u = u0;
    for (int s = 0; s < 10; ++s) u = st.step(u);

    Ref1D ref{128, gb, delta};
    std::array<std::vector<cplx>, 2> s{std::vector<cplx>(128), std::vector<cplx>(128)};
    s[0][1] = 0.1;
    s[0][127] = 0.1;
    s[1][1] = cplx(0, -0.05);
    s[1][127] = cplx(0, 0.05);
    s[0][2] = 0.03;
    s[0][126] = 0.03;
    const int nsteps = 2000;
    const double h = T / nsteps;
    auto axpy = [](const std::array<std::vector<cplx>, 2>& a, double c, const std::array<std::vector<cplx>, 2>& b) {
        auto r = a;
        for (int q = 0; q < 2; ++q)
            for (std::size_t k = 0; k < r[q].size(); ++k) r[q][k] += c * b[q][k];
        return r;
    };
    for (int it = 0; it < nsteps; ++it) {
        const auto k1 = ref.rhs(s);
        const auto k2 = ref.rhs(axpy(s, h / 2, k1));
        const auto k3 = ref.rhs(axpy(s, h / 2, k2));
        const auto k4 = ref.rhs(axpy(s, h, k3));
        for (int q = 0; q < 2; ++q)
            for (int k = 0; k < 128; ++k) s[q][k] += h / 6 * (k1[q][k] + 2.0 * k2[q][k] + 2.0 * k3[q][k] + k4[q][k]);
    }
    double err = 0.0;
    for (int m = -10; m <= 10; ++m) {
        const int a = m < 0 ? m + 128 : m;
        err = std::max(err, std::abs(u.at(0, u.slot(m), 0, 0) - s[0][a]));
        err = std::max(err, std::abs(u.at(1, u.slot(m), 0, 0) - s[1][a]));
    }
    MESSAGE("1D reference error " << err);
    CHECK(err < 1e-4);
}

TEST_CASE("linear single-shell sweep: epsilon slope and one derivative per 2^k") {
    // t_max = 10 stays ahead of the periodic-box floor of ||u||_inf.
    const int k = 1;
    std::vector<double> eps, d0;
    for (double e : {1.0, 0.25, 0.0625}) {
        SimConfig c = small_config(32, e, e, 1.0, 0.025);
        c.t_max = 10.0;
        c.nonlinear = false;
        const auto rec = run_lifespan(c, initial_condition("shell", c, 1.0, k));
        const double a = dispersion_report(rec, 4.0, 0);
        const double b = dispersion_report(rec, 4.0, 1);
        CHECK(std::abs(b / a / std::ldexp(1.0, k) - 1.0) <= 0.3);
        eps.push_back(e);
        d0.push_back(a);
    }
    CHECK(std::abs(fit_loglog(eps, d0).slope - 0.25) <= 0.15);
}

TEST_CASE("doubling the amplitude does not lengthen the lifespan") {
    SimConfig c = small_config(32, 1.0, 1.0, 1.0, 0.005);
    c.t_max = 5.0;
    const auto r1 = run_lifespan(c, initial_condition("bump", c, 1.0));
    const auto r2 = run_lifespan(c, initial_condition("bump", c, 2.0));
    CHECK(r1.doubled);
    CHECK(r2.doubled);
    CHECK(r2.t_doubling <= r1.t_doubling);
}
