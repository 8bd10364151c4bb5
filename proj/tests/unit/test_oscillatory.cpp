#include "doctest.h"

#include "dispersio/error.hpp"
#include "dispersio/lp.hpp"
#include "dispersio/oscillatory.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

using namespace dispersio;

namespace {

constexpr double kPi = std::numbers::pi;

double mass_oracle() {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto f = [](double r) { return 4.0 * kPi * r * r * fat_cutoff(r); };
    const double knots[] = {0.5, 0.75, 8.0 / 3.0, 3.0};
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += GK::integrate(f, knots[i], knots[i + 1], 15, 1e-14);
    return s;
}

// Spherical-coordinate tensor rule for the full kernel: radial Gauss panels
// split at the cutoff knots, Gauss in cos(polar), trapezoid in azimuth.
cplx kernel_oracle_3d(const KernelSpec& spec, const Vec3& x) {
    using G = boost::math::quadrature::gauss<double, 20>;
    std::vector<double> rn, rw;
    const double knots[] = {0.5, 0.75, 8.0 / 3.0, 3.0};
    const int panels[] = {12, 40, 12};
    for (int k = 0; k < 3; ++k) {
        const double h = (knots[k + 1] - knots[k]) / panels[k];
        for (int p = 0; p < panels[k]; ++p) {
            const double a = knots[k] + p * h, c = a + 0.5 * h;
            for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
                const double xs = G::abscissa()[i];
                const double w = G::weights()[i] * 0.5 * h;
                rn.push_back(c + 0.5 * h * xs);
                rw.push_back(w);
                if (xs != 0.0) {
                    rn.push_back(c - 0.5 * h * xs);
                    rw.push_back(w);
                }
            }
        }
    }
    std::vector<double> un, uw;
    const int upanels = 8;
    for (int p = 0; p < upanels; ++p) {
        const double a = -1.0 + 2.0 * p / upanels, h = 2.0 / upanels, c = a + 0.5 * h;
        for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
            const double xs = G::abscissa()[i];
            const double w = G::weights()[i] * 0.5 * h;
            un.push_back(c + 0.5 * h * xs);
            uw.push_back(w);
            if (xs != 0.0) {
                un.push_back(c - 0.5 * h * xs);
                uw.push_back(w);
            }
        }
    }
    const int nphi = 96;
    cplx acc = 0.0;
    for (std::size_t a = 0; a < rn.size(); ++a) {
        const double R = rn[a], fr = fat_cutoff(R);
        if (fr == 0.0) continue;
        for (std::size_t b = 0; b < un.size(); ++b) {
            const double ct = un[b], st = std::sqrt(1.0 - ct * ct);
            const Frequency xi0{R * st, 0.0, R * ct};
            const double q = phase(spec.phase, xi0);
            for (int c = 0; c < nphi; ++c) {
                const double ph = 2.0 * kPi * c / nphi;
                const double xd = x(0) * R * st * std::cos(ph) + x(1) * R * st * std::sin(ph) + x(2) * R * ct;
                acc += rw[a] * uw[b] * (2.0 * kPi / nphi) * R * R * fr * std::polar(1.0, spec.theta * (xd + q));
            }
        }
    }
    return acc;
}

KernelSpec spec_of(Branch b, double sigma, double theta, SubKernel sub = SubKernel::full) {
    KernelSpec s;
    s.phase = PhaseSpec{b, 1.0, sigma};
    s.theta = theta;
    s.sub = sub;
    return s;
}

}  // namespace

TEST_CASE("regimes and M_k") {
    CHECK(classify_regime(10, 1.0).regime == Regime::high);
    CHECK(classify_regime(10, 1.0).sigma_k == doctest::Approx(1.0 / 1024));
    CHECK(classify_regime(0, 1.0).regime == Regime::middle);
    CHECK(classify_regime(-10, 1.0).regime == Regime::low);
    CHECK(classify_sigma(1.0 / 60) == Regime::high);
    CHECK(classify_sigma(60.0) == Regime::middle);
    CHECK(decay_scale_Mk(0, 1.0) == 1.0);
    CHECK(decay_scale_Mk(-10, 1.0) == std::ldexp(1.0, 30));
    CHECK(decay_scale_Mk(0, 60.0) == 1.0);
    const PhysParams p = PhysParams::make(0.5, 0.25, 2.0);
    const KernelSpec ks = KernelSpec::from_time(3.0, 2, p, Branch::plus, 0.7);
    CHECK(ks.theta == doctest::Approx(0.7 * 4 * 3.0 / 0.25));
    CHECK(ks.phase.rot_scale == doctest::Approx(p.nu / 4));
}

TEST_CASE("kernel mass and theta = 0") {
    const double m = mass_oracle();
    CHECK(kernel_mass() == doctest::Approx(m).epsilon(1e-10));
    CHECK(kernel_mass(SubKernel::I1) + kernel_mass(SubKernel::I2) == doctest::Approx(m).epsilon(1e-10));
    CHECK(std::abs(eval_kernel(spec_of(Branch::plus, 1.0, 0.0), {0, 0, 0}) - m) < 1e-10 * m);
    // sigma = 0 on the minus branch: q = 0.
    CHECK(std::abs(eval_kernel(spec_of(Branch::minus, 0.0, 40.0), {0, 0, 0}) - m) < 1e-10 * m);
}

TEST_CASE("reduced kernel against a 3D spherical quadrature") {
    for (Branch b : {Branch::minus, Branch::plus}) {
        const KernelSpec s = spec_of(b, 0.7, 3.0);
        for (const Vec3& x : {Vec3(0, 0, 0), Vec3(0.4, -0.3, 0.8), Vec3(-1.1, 0.2, -0.5)}) {
            const cplx a = eval_kernel(s, x);
            const cplx o = kernel_oracle_3d(s, x);
            CHECK(std::abs(a - o) < 1e-8 * kernel_mass());
        }
    }
}

TEST_CASE("self-convergence at theta = 50") {
    const KernelSpec s = spec_of(Branch::plus, 1.0, 50.0);
    QuadOptions fine;
    fine.nodes_per_oscillation *= 2.0;
    fine.min_nodes_axis *= 2;
    const cplx a = eval_kernel(s, {0, 0, 0});
    const cplx b = eval_kernel(s, {0, 0, 0}, fine);
    CHECK(std::abs(a - b) < 1e-8 * kernel_mass());
}

TEST_CASE("symmetries") {
    // Kernel is the integral of exp(i theta (x.xi + q)): flipping theta
    // conjugates, plus q is even in xi3 so K is even in x3, minus q is odd
    // under xi -> -xi so K is real.
    for (Branch b : {Branch::minus, Branch::plus}) {
        const KernelSpec s = spec_of(b, 0.5, 30.0);
        KernelSpec neg = s;
        neg.theta = -s.theta;
        const auto v = eval_kernel_grid(s, {0.3, 1.2}, {0.7, -0.7});
        const auto w = eval_kernel_grid(neg, {0.3, 1.2}, {0.7, -0.7});
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(v[i] - std::conj(w[i])) < 1e-10);
            if (b == Branch::minus) CHECK(std::abs(v[i].imag()) < 1e-12 * kernel_mass());
        }
        if (b == Branch::plus) {
            CHECK(std::abs(v[0] - v[1]) < 1e-10);
            CHECK(std::abs(v[2] - v[3]) < 1e-10);
        }
    }
}

TEST_CASE("sup search basics") {
    const double mass = kernel_mass();
    const SupResult s0 = sup_kernel(spec_of(Branch::plus, 1.0, 0.0));
    CHECK(s0.value == doctest::Approx(mass).epsilon(1e-10));
    const KernelSpec s = spec_of(Branch::plus, 1.0, 100.0);
    const SupResult r = sup_kernel(s);
    CHECK(r.value >= std::abs(eval_kernel(s, {0, 0, 0})) * (1 - 1e-12));
    CHECK(r.value <= mass);
    CHECK(r.value >= r.grid_value);
    SearchPolicy dense;
    dense.lattice = 33;
    dense.grid_r = 65;
    dense.grid_x3 = 65;
    const SupResult d = sup_kernel(s, dense);
    CHECK(std::abs(d.value - r.value) < 0.01 * d.value);
    CHECK_FALSE(stationary_predictors(s, 9).empty());
}

TEST_CASE("resolution budget") {
    QuadOptions tight;
    tight.max_nodes_total = 1e5;
    CHECK_THROWS_AS(eval_kernel(spec_of(Branch::minus, 1.0, 1e4), {0, 0, 0}, tight), UnresolvedOscillation);
    const QuadPlan p1 = plan_quadrature(spec_of(Branch::minus, 1.0, 10.0), 1.0, -1.0, 1.0);
    const QuadPlan p2 = plan_quadrature(spec_of(Branch::minus, 1.0, 1000.0), 1.0, -1.0, 1.0);
    CHECK(p2.n_rho > p1.n_rho);
    CHECK(p2.n_xi3 > p1.n_xi3);
}

TEST_CASE("sweep request validation and default windows") {
    CHECK(default_sweep(Branch::minus, 0.01).theta_lo == doctest::Approx(100.0));
    CHECK(default_sweep(Branch::minus, 100.0).theta_lo == doctest::Approx(1000.0));
    CHECK(default_sweep(Branch::plus, 100.0).theta_lo == doctest::Approx(100.0));
    CHECK(default_sweep(Branch::plus, 1.0).theta_hi == doctest::Approx(1000.0));
    SweepRequest bad;
    bad.theta_lo = 1.0;
    bad.theta_hi = 50.0;
    CHECK_THROWS_AS(decay_sweep(bad), std::invalid_argument);
}

TEST_CASE("short middle-regime sweep decays") {
    SweepRequest req;
    req.branch = Branch::plus;
    req.sigma_k = 1.0;
    req.theta_lo = 1.0;
    req.theta_hi = 100.0;
    req.n_samples = 5;
    const DecayMeasurement m = decay_sweep(req);
    CHECK(m.alpha >= 0.45);
    CHECK(m.fit_r2 >= 0.95);
    CHECK(m.trivial_bound_ok);
    CHECK(m.regime == Regime::middle);
    const double onset = decay_onset_theta(m);
    CHECK(onset > 0.1);
    CHECK(onset < 10.0);
}
