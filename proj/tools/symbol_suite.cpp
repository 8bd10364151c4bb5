#include "symbol_suite.hpp"

#include "dispersio/error.hpp"
#include "dispersio/fit.hpp"
#include "dispersio/symbol.hpp"

#include <Eigen/Eigenvalues>
#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

namespace dispersio::suite {

bool SymbolSuiteReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

const cplx I1(0.0, 1.0);

std::array<double, 4> numeric_eigenvalues(const Frequency& xi, double nu) {
    Eigen::ComplexEigenSolver<Mat4c> es(symbol_matrix(xi, nu));
    std::array<double, 4> p;
    for (int j = 0; j < 4; ++j) p[j] = (es.eigenvalues()(j) / I1).real();
    std::sort(p.begin(), p.end(), std::greater<>());
    return p;
}

using quad = __float128;

quad phase_q(int sign, double a, double s, const quad x[3]) {
    const quad h2 = x[0] * x[0] + x[1] * x[1];
    return a * (sqrtq(h2 + (x[2] + s) * (x[2] + s)) + sign * sqrtq(h2 + (x[2] - s) * (x[2] - s)));
}

// Central second differences with step 1e-5, evaluated in quad precision so
// the roundoff stays far below the 1e-6 comparison.
double fd_hessian_det(const PhaseSpec& spec, const Frequency& xi) {
    const double h = 1e-5;
    const int sg = spec.branch == Branch::plus ? 1 : -1;
    const double x0[3] = {xi.xi1, xi.xi2, xi.xi3};
    Mat3 H;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            quad acc = 0;
            for (int si : {-1, 1})
                for (int sj : {-1, 1}) {
                    quad x[3] = {x0[0], x0[1], x0[2]};
                    x[i] += si * (quad)h;
                    x[j] += sj * (quad)h;
                    acc += si * sj * phase_q(sg, spec.amplitude_a, spec.rot_scale, x);
                }
            H(i, j) = static_cast<double>(acc / (4 * (quad)h * (quad)h));
        }
    return H.determinant();
}

class Sampler {
public:
    Sampler(const SymbolSuiteOptions& opt) : rng_(opt.seed), nus_(opt.nu_values) {}

    Frequency frequency() {
        Vec3 d(g_(rng_), g_(rng_), g_(rng_));
        d *= std::exp(lg_(rng_)) / d.norm();
        return {d(0), d(1), d(2)};
    }
    double nu() {
        if (nus_.empty()) return std::exp(lg_(rng_));
        return nus_[std::uniform_int_distribution<std::size_t>(0, nus_.size() - 1)(rng_)];
    }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

private:
    std::mt19937_64 rng_;
    std::vector<double> nus_;
    std::normal_distribution<double> g_;
    std::uniform_real_distribution<double> lg_{std::log(0.01), std::log(100.0)};
};

void note(CheckResult& c, double residual) {
    c.worst = std::max(c.worst, residual);
    ++c.count;
}

void finish(CheckResult& c) { c.pass = c.worst <= c.tolerance; }

}  // namespace

SymbolSuiteReport run_symbol_suite(const SymbolSuiteOptions& opt) {
    if (opt.samples < 1 || opt.hessian_samples < 1) throw std::invalid_argument("sample counts must be positive");
    for (double nu : opt.nu_values) {
        if (!(nu > 0.0) || std::isinf(nu)) throw std::invalid_argument("nu values must be positive and finite");
    }
    Sampler s(opt);

    CheckResult eig{"eigenvalues_vs_numeric", true, 0.0, opt.tol_eigen, 0};
    CheckResult comp{"projection_completeness", true, 0.0, opt.tol_completeness, 0};
    CheckResult resid{"eigenvector_residual", true, 0.0, opt.tol_completeness, 0};
    CheckResult sym{"phase_parity_and_rotation", true, 0.0, opt.tol_symmetry, 0};
    for (int i = 0; i < opt.samples; ++i) {
        const Frequency xi = s.frequency();
        const double nu = s.nu();
        const auto p = eigenvalues(xi, nu);
        const auto o = numeric_eigenvalues(xi, nu);
        double e = 0.0;
        for (int j = 0; j < 4; ++j) e = std::max(e, std::abs(p[j] - o[j]) / std::abs(p[0]));
        note(eig, e);

        if (!is_degenerate(xi, nu)) {
            const EigenData ed = eigenprojections(xi, nu);
            const Mat4c L = symbol_matrix(xi, nu);
            Mat4c sum = Mat4c::Zero();
            double r = 0.0;
            for (int j = 0; j < 4; ++j) {
                sum += ed.projection(j);
                const Vec4c v = ed.r.col(j);
                r = std::max(r, (L * v - I1 * ed.p[j] * v).norm() / (xi.norm() + nu));
            }
            note(comp, (sum - Mat4c::Identity()).norm());
            note(resid, r);
        }

        const double ang = s.uniform(0.0, 2.0 * 3.141592653589793);
        const Frequency rot{std::cos(ang) * xi.xi1 - std::sin(ang) * xi.xi2,
                            std::sin(ang) * xi.xi1 + std::cos(ang) * xi.xi2, xi.xi3};
        const Frequency flip{xi.xi1, xi.xi2, -xi.xi3};
        for (Branch b : {Branch::minus, Branch::plus}) {
            const PhaseSpec ph{b, 1.0, nu};
            const double q = phase(ph, xi);
            const double scale = std::max(1.0, std::abs(q));
            const double parity = b == Branch::plus ? phase(ph, flip) - q : phase(ph, flip) + q;
            note(sym, std::max(std::abs(parity), std::abs(phase(ph, rot) - q)) / scale);
        }
    }

    CheckResult hes{"hessian_determinant_vs_fd", true, 0.0, opt.tol_hessian, 0};
    for (Branch b : {Branch::minus, Branch::plus}) {
        int n = 0;
        while (n < opt.hessian_samples) {
            const Frequency xi{s.uniform(-2.0, 2.0), s.uniform(-2.0, 2.0), s.uniform(-2.0, 2.0)};
            const double sigma = opt.nu_values.empty() ? s.uniform(0.1, 3.0) : s.nu();
            if (std::abs(xi.xi3) < 0.05 || xi.horizontal() < 0.05) continue;
            const PhaseSpec ph{b, 0.9, sigma};
            const double f = hessian_determinant_formula(ph, xi);
            note(hes, std::abs(f - fd_hessian_det(ph, xi)) / std::abs(f));
            ++n;
        }
    }

    // Log-log slopes of |det| as xi3 -> 0 (minus) and |xi_h| -> 0 (both).
    auto exponent = [&](const std::string& name, double target, auto&& value) {
        std::vector<double> x, y;
        for (int i = 0; i < 12; ++i) {
            const double t = std::pow(10.0, -2.0 - 0.25 * i);
            x.push_back(t);
            y.push_back(std::abs(value(t)));
        }
        CheckResult c{name, true, 0.0, opt.tol_exponent, 12};
        c.worst = std::abs(fit_loglog(x, y).slope - target);
        return c;
    };
    const PhaseSpec m{Branch::minus, 1.0, 0.8};
    const PhaseSpec p{Branch::plus, 1.0, 0.8};
    CheckResult ex3 = exponent("degeneracy_exponent_xi3_minus", 1.0,
                               [&](double t) { return hessian_determinant_formula(m, {0.5, 0.4, t}); });
    CheckResult exm = exponent("degeneracy_exponent_xih_minus", 2.0,
                               [&](double t) { return hessian_determinant_formula(m, {0.6 * t, 0.8 * t, 0.5}); });
    CheckResult exp_ = exponent("degeneracy_exponent_xih_plus", 2.0,
                                [&](double t) { return hessian_determinant_formula(p, {0.6 * t, 0.8 * t, 0.5}); });

    SymbolSuiteReport rep;
    for (CheckResult* c : {&eig, &comp, &resid, &sym, &hes, &ex3, &exm, &exp_}) {
        finish(*c);
        rep.checks.push_back(*c);
    }
    return rep;
}

}  // namespace dispersio::suite
