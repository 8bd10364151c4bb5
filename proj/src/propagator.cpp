#include "dispersio/propagator.hpp"

#include "dispersio/error.hpp"
#include "dispersio/lp.hpp"
#include "dispersio/simd/kernels.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace dispersio {

namespace {

template <class Fn>
void for_modes(int n, Fn fn) {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) fn(i, j, l);
}

std::vector<double> phase_table(const SpectralField& f, const PhaseSpec& spec) {
    std::vector<double> ph(f.modes());
    for_modes(f.n(), [&](int i, int j, int l) {
        ph[f.index(i, j, l)] = phase(spec, {f.xi(i), f.xi(j), f.xi(l)});
    });
    return ph;
}

}  // namespace

SpectralField evolve_scalar(const SpectralField& f, double t, const PhaseSpec& spec, double delta) {
    SpectralField out(f.n(), f.length(), f.ncomp());
    const auto ph = phase_table(f, spec);
    const auto& kt = simd::active();
    for (int c = 0; c < f.ncomp(); ++c) {
        kt.cmul_phase(f.component(c), ph.data(), t / delta, out.component(c), f.modes());
    }
    return out;
}

SpectralField lambda_k(const SpectralField& f, double t, int k, const PhaseSpec& spec, double delta,
                       bool squared) {
    return apply_fat_cutoff(evolve_scalar(f, t, spec, delta), k, squared ? 2 : 1);
}

PropagatorPlan::PropagatorPlan(const PhysParams& params, int n, double length)
    : params_(params), n_(n), length_(length) {
    const std::size_t total = static_cast<std::size_t>(n) * n * n;
    p_.resize(total);
    r_.resize(total);
    degenerate_.assign(total, 0);
    SpectralField probe(n, length, 1);
    for_modes(n, [&](int i, int j, int l) {
        const Frequency xi{probe.xi(i), probe.xi(j), probe.xi(l)};
        const std::size_t k = idx(i, j, l);
        if (is_degenerate(xi, params_.nu)) {
            degenerate_[k] = 1;
            return;
        }
        const EigenData ed = eigenprojections(xi, params_.nu);
        p_[k] = ed.p;
        r_[k] = ed.r;
    });
}

std::size_t PropagatorPlan::degenerate_count() const {
    std::size_t c = 0;
    for (auto d : degenerate_) c += d;
    return c;
}

Mat4c PropagatorPlan::mode_matrix(int i, int j, int l, double t) const {
    const double tau = params_.gamma_bar * t / params_.delta;
    const std::size_t k = idx(i, j, l);
    if (degenerate_[k]) {
        auto wave = [this](int a) { return (a < n_ / 2 ? a : a - n_) / length_; };
        const Mat4c L = symbol_matrix(Frequency{wave(i), wave(j), wave(l)}, params_.nu);
        const Mat4c arg = -tau * L;
        return arg.exp();
    }
    Mat4c e = Mat4c::Zero();
    for (int m = 0; m < 4; ++m) {
        const cplx ph = std::polar(1.0, -tau * p_[k][m]);
        e.noalias() += ph * (r_[k].col(m) * r_[k].col(m).adjoint());
    }
    return e;
}

SpectralField PropagatorPlan::evolve(const SpectralField& u, double t) const {
    if (u.n() != n_ || u.length() != length_ || u.ncomp() != 4) {
        throw std::invalid_argument("evolve: field does not match the plan grid");
    }
    SpectralField out(n_, length_, 4);
    const double tau = params_.gamma_bar * t / params_.delta;
    for_modes(n_, [&](int i, int j, int l) {
        const std::size_t k = idx(i, j, l);
        Vec4c v;
        for (int c = 0; c < 4; ++c) v(c) = u.component(c)[k];
        Vec4c w;
        if (degenerate_[k]) {
            w = mode_matrix(i, j, l, t) * v;
        } else {
            w.setZero();
            for (int m = 0; m < 4; ++m) {
                const cplx coef = r_[k].col(m).dot(v) * std::polar(1.0, -tau * p_[k][m]);
                w += coef * r_[k].col(m);
            }
        }
        for (int c = 0; c < 4; ++c) out.component(c)[k] = w(c);
    });
    return out;
}

PropagatorPlan::StepTable PropagatorPlan::tabulate(double t) const {
    StepTable tab;
    tab.t = t;
    tab.e.resize(p_.size());
    for_modes(n_, [&](int i, int j, int l) { tab.e[idx(i, j, l)] = mode_matrix(i, j, l, t); });
    return tab;
}

void PropagatorPlan::apply(const StepTable& table, const SpectralField& in, SpectralField& out) {
    if (table.e.size() != in.modes() || in.ncomp() != 4) {
        throw std::invalid_argument("apply: table does not match the field");
    }
    if (!out.same_grid(in)) out = SpectralField(in.n(), in.length(), 4);
    const std::size_t m = in.modes();
    const cplx* a = in.component(0);
    const cplx* b = in.component(1);
    const cplx* c = in.component(2);
    const cplx* d = in.component(3);
    cplx* oa = out.component(0);
    cplx* ob = out.component(1);
    cplx* oc = out.component(2);
    cplx* od = out.component(3);
    for (std::size_t k = 0; k < m; ++k) {
        const Mat4c& e = table.e[k];
        const cplx v0 = a[k], v1 = b[k], v2 = c[k], v3 = d[k];
        oa[k] = e(0, 0) * v0 + e(0, 1) * v1 + e(0, 2) * v2 + e(0, 3) * v3;
        ob[k] = e(1, 0) * v0 + e(1, 1) * v1 + e(1, 2) * v2 + e(1, 3) * v3;
        oc[k] = e(2, 0) * v0 + e(2, 1) * v1 + e(2, 2) * v2 + e(2, 3) * v3;
        od[k] = e(3, 0) * v0 + e(3, 1) * v1 + e(3, 2) * v2 + e(3, 3) * v3;
    }
}

SpectralField evolve_system(const SpectralField& u, double t, const PhysParams& params) {
    return PropagatorPlan(params, u.n(), u.length()).evolve(u, t);
}

std::vector<double> simpson_weights(const std::vector<double>& t) {
    const std::size_t n = t.size();
    std::vector<double> w(n, 0.0);
    if (n < 2) return w;
    const double h = t[1] - t[0];
    if (!(h > 0.0)) throw NonUniformGrid("time grid must be increasing");
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (std::abs((t[i + 1] - t[i]) - h) > 1e-9 * h) {
            throw NonUniformGrid("time grid is not uniform");
        }
    }
    const std::size_t intervals = n - 1;
    if (intervals == 1) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    const std::size_t simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if (simpson_end != intervals) {
        const std::size_t s = simpson_end;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    return w;
}

SpectralField duhamel_scalar(const std::vector<SpectralField>& source, const std::vector<double>& t_grid,
                             const PhaseSpec& spec, double delta) {
    if (source.empty() || source.size() != t_grid.size()) {
        throw std::invalid_argument("duhamel: source and time grid sizes differ");
    }
    const auto w = simpson_weights(t_grid);
    const double T = t_grid.back();
    SpectralField acc(source[0].n(), source[0].length(), source[0].ncomp());
    for (std::size_t m = 0; m < source.size(); ++m) {
        if (w[m] == 0.0) continue;
        SpectralField term = evolve_scalar(source[m], T - t_grid[m], spec, delta);
        term *= w[m];
        acc += term;
    }
    return acc;
}

SpectralField duhamel(const std::vector<SpectralField>& source, const std::vector<double>& t_grid,
                      const PropagatorPlan& plan) {
    if (source.empty() || source.size() != t_grid.size()) {
        throw std::invalid_argument("duhamel: source and time grid sizes differ");
    }
    const auto w = simpson_weights(t_grid);
    const double T = t_grid.back();
    SpectralField acc(plan.n(), plan.length(), 4);
    for (std::size_t m = 0; m < source.size(); ++m) {
        if (w[m] == 0.0) continue;
        SpectralField term = plan.evolve(source[m], T - t_grid[m]);
        term *= w[m];
        acc += term;
    }
    return acc;
}

}  // namespace dispersio
