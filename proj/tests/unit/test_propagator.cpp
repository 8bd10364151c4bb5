#include "doctest.h"

#include "dispersio/error.hpp"
#include "dispersio/lp.hpp"
#include "dispersio/propagator.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

using namespace dispersio;

namespace {

double max_diff(const SpectralField& a, const SpectralField& b) {
    double d = 0.0;
    for (std::size_t p = 0; p < a.data().size(); ++p) d = std::max(d, std::abs(a.data()[p] - b.data()[p]));
    return d;
}

// Real state (re0, im0, ..., re3, im3) of one Fourier mode under
// U' = -(gamma_bar/delta) L U + F.
using State = std::array<double, 8>;

State integrate_mode(const Mat4c& L, double coef, const Vec4c& u0, const Vec4c& force, double T) {
    namespace ode = boost::numeric::odeint;
    State x;
    for (int c = 0; c < 4; ++c) {
        x[2 * c] = u0(c).real();
        x[2 * c + 1] = u0(c).imag();
    }
    auto rhs = [&](const State& s, State& d, double) {
        Vec4c v;
        for (int c = 0; c < 4; ++c) v(c) = cplx(s[2 * c], s[2 * c + 1]);
        const Vec4c w = -coef * (L * v) + force;
        for (int c = 0; c < 4; ++c) {
            d[2 * c] = w(c).real();
            d[2 * c + 1] = w(c).imag();
        }
    };
    ode::integrate_adaptive(ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_fehlberg78<State>()), rhs, x, 0.0,
                            T, T / 200);
    return x;
}

}  // namespace

TEST_CASE("scalar evolution") {
    const PhaseSpec spec{Branch::minus, 1.0, 0.8};
    const SpectralField f = white_noise(8, 1.0, 1, 3);
    CHECK(max_diff(evolve_scalar(f, 0.0, spec, 0.5), f) == 0.0);
    SpectralField one(8, 1.0, 1);
    one.at(0, 1, 2, 3) = 1.0;
    const double t = 0.37, delta = 0.25;
    const cplx v = evolve_scalar(one, t, spec, delta).at(0, 1, 2, 3);
    CHECK(std::abs(v - std::polar(1.0, (t / delta) * phase(spec, {1, 2, 3}))) < 1e-14);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int s = 0; s < 10; ++s) CHECK(std::abs(coeff_l2(evolve_scalar(f, u(rng), spec, 0.1)) - coeff_l2(f)) < 1e-12);
}

TEST_CASE("lambda_k") {
    const PhaseSpec spec{Branch::plus, 1.0, 1.0};
    const DyadicPartition part = build_partition(-2, 5);
    const SpectralField f = white_noise(16, 1.0, 1, 8);
    const SpectralField dk = apply_shell(f, 2, part);
    CHECK(max_diff(lambda_k(dk, 0.7, 2, spec, 0.3, false), evolve_scalar(dk, 0.7, spec, 0.3)) < 1e-15);
    CHECK(max_diff(lambda_k(f, 0.0, 2, spec, 0.3, true), apply_fat_cutoff(f, 2, 2)) < 1e-15);
    CHECK(coeff_l2(lambda_k(f, 3.1, 1, spec, 0.3, false)) <= coeff_l2(f));
    // Diagonal multipliers commute.
    const SpectralField a = evolve_scalar(apply_shell(f, 1, part), 2.0, spec, 0.1);
    const SpectralField b = apply_shell(evolve_scalar(f, 2.0, spec, 0.1), 1, part);
    CHECK(max_diff(a, b) < 1e-12);
}

TEST_CASE("system propagator: identity, unitarity, group property") {
    const PhysParams par = PhysParams::make(0.5, 0.4, 0.7);
    const PropagatorPlan plan(par, 8, 1.0);
    CHECK(plan.degenerate_count() > 0);
    const SpectralField u = white_noise(8, 1.0, 4, 5);
    CHECK(max_diff(plan.evolve(u, 0.0), u) < 1e-14);
    double worst = 0.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            for (int l = 0; l < 8; ++l) {
                const Mat4c e = plan.mode_matrix(i, j, l, 1.7);
                worst = std::max(worst, (e.adjoint() * e - Mat4c::Identity()).norm());
            }
    CHECK(worst < 1e-10);
    for (double t : {0.3, 4.0, 25.0}) {
        const SpectralField v = plan.evolve(u, t);
        CHECK(std::abs(coeff_l2(v) - coeff_l2(u)) < 1e-12 * coeff_l2(u));
        CHECK(max_diff(plan.evolve(v, -t), u) < 1e-10);
        CHECK(max_diff(plan.evolve(plan.evolve(u, 0.4 * t), 0.6 * t), v) < 1e-10);
    }
    const auto tab = plan.tabulate(1.1);
    SpectralField out;
    PropagatorPlan::apply(tab, u, out);
    CHECK(max_diff(out, plan.evolve(u, 1.1)) < 1e-13);
}

TEST_CASE("acoustic oscillation at nu = 0") {
    const double gb = 0.6, delta = 0.5;
    const PhysParams par = PhysParams::make(std::numeric_limits<double>::infinity(), delta, gb);
    SpectralField u(8, 1.0, 4);
    u.at(0, 1, 0, 0) = 1.0;
    const PropagatorPlan plan(par, 8, 1.0);
    for (double t : {0.1, 1.0, 3.3}) {
        const SpectralField v = plan.evolve(u, t);
        const double w = gb * 1.0 / delta * t;
        CHECK(std::abs(v.at(0, 1, 0, 0) - std::cos(w)) < 1e-12);
        CHECK(std::abs(v.at(1, 1, 0, 0) - cplx(0, -std::sin(w))) < 1e-12);
    }
}

TEST_CASE("mode-ODE oracle on random modes") {
    const PhysParams par = PhysParams::make(0.3, 0.2, 0.8);
    const int n = 16;
    const PropagatorPlan plan(par, n, 1.0);
    const SpectralField u = white_noise(n, 1.0, 4, 13);
    const double T = 0.9;
    const SpectralField v = plan.evolve(u, T);
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> pick(0, n - 1);
    double worst = 0.0;
    for (int s = 0; s < 64; ++s) {
        int i = pick(rng), j = pick(rng), l = s < 4 ? 0 : pick(rng);  // include xi3 = 0 modes
        const Frequency xi{u.xi(i), u.xi(j), u.xi(l)};
        Vec4c u0;
        for (int c = 0; c < 4; ++c) u0(c) = u.at(c, i, j, l);
        const State x = integrate_mode(symbol_matrix(xi, par.nu), par.gamma_bar / par.delta, u0, Vec4c::Zero(), T);
        for (int c = 0; c < 4; ++c) worst = std::max(worst, std::abs(v.at(c, i, j, l) - cplx(x[2 * c], x[2 * c + 1])));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("Simpson weights") {
    auto w = simpson_weights({0.0, 0.5, 1.0});
    CHECK(w[1] == doctest::Approx(2.0 / 3.0));
    w = simpson_weights({0.0, 1.0, 2.0, 3.0});
    CHECK(w[0] == doctest::Approx(3.0 / 8.0));
    CHECK(w[1] == doctest::Approx(9.0 / 8.0));
    CHECK_THROWS_AS(simpson_weights({0.0, 0.5, 1.5}), NonUniformGrid);
}

TEST_CASE("scalar Duhamel against closed forms") {
    const double delta = 0.5;
    const PhaseSpec spec{Branch::minus, 1.0, 0.9};
    const int nt = 801;
    const double T = 2.0;
    std::vector<double> tg(nt);
    for (int i = 0; i < nt; ++i) tg[i] = T * i / (nt - 1);

    std::vector<SpectralField> zero(nt, SpectralField(8, 1.0, 1));
    CHECK(coeff_l2(duhamel_scalar(zero, tg, spec, delta)) == 0.0);

    // xi3 = 0 on the minus branch: p = 0, the integrand is constant.
    SpectralField c(8, 1.0, 1);
    c.at(0, 2, 1, 0) = cplx(0.3, -0.2);
    std::vector<SpectralField> cs(nt, c);
    CHECK(std::abs(duhamel_scalar(cs, tg, spec, delta).at(0, 2, 1, 0) - T * c.at(0, 2, 1, 0)) < 1e-13);

    // exp(i omega s) at a mode with p != 0.
    const double omega = 3.0;
    const Frequency xi{1, 2, 1};
    const double p = phase(spec, xi);
    std::vector<SpectralField> os;
    for (double s : tg) {
        SpectralField f(8, 1.0, 1);
        f.at(0, 1, 2, 1) = std::polar(1.0, omega * s);
        os.push_back(f);
    }
    const cplx got = duhamel_scalar(os, tg, spec, delta).at(0, 1, 2, 1);
    const cplx I1(0, 1);
    const cplx want = (std::exp(I1 * omega * T) - std::exp(I1 * (T / delta) * p)) / (I1 * omega - I1 * p / delta);
    CHECK(std::abs(got - want) < 1e-8);
}

TEST_CASE("system Duhamel against the forced mode ODE") {
    const PhysParams par = PhysParams::make(0.5, 0.5, 0.5);
    const PropagatorPlan plan(par, 8, 1.0);
    SpectralField f(8, 1.0, 4);
    f.at(0, 1, 2, 1) = 0.4;
    f.at(2, 1, 2, 1) = cplx(0.0, 0.3);
    const int nt = 401;
    const double T = 1.5;
    std::vector<double> tg(nt);
    for (int i = 0; i < nt; ++i) tg[i] = T * i / (nt - 1);
    const SpectralField d = duhamel(std::vector<SpectralField>(nt, f), tg, plan);
    Vec4c force;
    for (int c = 0; c < 4; ++c) force(c) = f.at(c, 1, 2, 1);
    const State x = integrate_mode(symbol_matrix({1, 2, 1}, par.nu), par.gamma_bar / par.delta, Vec4c::Zero(), force, T);
    for (int c = 0; c < 4; ++c) CHECK(std::abs(d.at(c, 1, 2, 1) - cplx(x[2 * c], x[2 * c + 1])) < 1e-8);
}
