#include "dispersio/oscillatory.hpp"

#include "dispersio/error.hpp"
#include "dispersio/fit.hpp"
#include "dispersio/lp.hpp"
#include "dispersio/quadrature.hpp"
#include "dispersio/simd/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>
#include <tuple>
#include <stdexcept>
#include <exception>

namespace dispersio {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFatLo = 0.5;
constexpr double kFatHi = 3.0;
constexpr double kPlateauLo = 0.75;
constexpr double kPlateauHi = 8.0 / 3.0;
constexpr double kSplitOut = 1.0 / 28.0;
constexpr double kSplitIn = 1.0 / 29.0;
}  // namespace

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::high: return "high";
        case Regime::middle: return "middle";
        case Regime::low: return "low";
    }
    return "?";
}

const char* subkernel_name(SubKernel s) {
    switch (s) {
        case SubKernel::full: return "full";
        case SubKernel::I1: return "I1";
        case SubKernel::I2: return "I2";
    }
    return "?";
}

Regime classify_sigma(double sigma_k) {
    if (sigma_k <= 1.0 / 60.0) return Regime::high;
    if (sigma_k <= 60.0) return Regime::middle;
    return Regime::low;
}

RegimeClass classify_regime(int k, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("classify_regime: nu must be positive");
    const double s = std::ldexp(nu, -k);
    return {s, classify_sigma(s)};
}

double decay_scale_Mk(int k, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("decay_scale_Mk: nu must be positive");
    const double s = std::ldexp(nu, -k);
    return s <= 60.0 ? 1.0 : s * s * s;
}

KernelSpec KernelSpec::from_time(double t, int k, const PhysParams& params, Branch branch,
                                 double amplitude_a, SubKernel sub) {
    KernelSpec s;
    s.phase = PhaseSpec{branch, 1.0, std::ldexp(params.nu, -k)};
    s.theta = amplitude_a * std::ldexp(1.0, k) * t / params.delta;
    s.sub = sub;
    return s;
}

namespace {

double sub_weight(SubKernel sub, double z) {
    switch (sub) {
        case SubKernel::full: return 1.0;
        case SubKernel::I1: return split_psi1(z);
        case SubKernel::I2: return split_psi2(z);
    }
    return 1.0;
}

// Radial fat cutoff from |xi|^2 with exact plateau and zero regions.
inline double fat_from_r2(double r2) {
    if (r2 <= kFatLo * kFatLo || r2 >= kFatHi * kFatHi) return 0.0;
    if (r2 >= kPlateauLo * kPlateauLo && r2 <= kPlateauHi * kPlateauHi) return 1.0;
    return fat_cutoff(std::sqrt(r2));
}

struct Domain {
    double rho_lo, rho_hi, z_lo, z_hi;
    std::vector<double> z_breaks;
};

Domain domain_for(SubKernel sub) {
    if (sub == SubKernel::I1) {
        return {std::sqrt(kFatLo * kFatLo - kSplitOut * kSplitOut), kFatHi, -kSplitOut, kSplitOut,
                {-kSplitIn, kSplitIn}};
    }
    if (sub == SubKernel::I2) {
        return {0.0, kFatHi, -kFatHi, kFatHi, {-kSplitOut, -kSplitIn, kSplitIn, kSplitOut}};
    }
    return {0.0, kFatHi, -kFatHi, kFatHi, {}};
}

// Ranges of the phase gradient over the support, from a fine lattice.
struct GradRange {
    double rho_abs_max;  // max |d_rho q|
    double z_min, z_max; // range of d_xi3 q
};

GradRange gradient_range(const PhaseSpec& ph, SubKernel sub) {
    static std::mutex mu;
    static std::map<std::tuple<int, double, double, int>, GradRange> memo;
    const auto key = std::make_tuple(static_cast<int>(ph.branch), ph.amplitude_a, ph.rot_scale,
                                     static_cast<int>(sub));
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
    }
    const Domain d = domain_for(sub);
    const int nr = 301, nz = 601;
    GradRange g{0.0, 1e300, -1e300};
    const double s = ph.sign();
    const double sig = ph.rot_scale;
    for (int i = 0; i < nr; ++i) {
        const double rho = d.rho_lo + (d.rho_hi - d.rho_lo) * i / (nr - 1);
        for (int j = 0; j < nz; ++j) {
            const double z = d.z_lo + (d.z_hi - d.z_lo) * j / (nz - 1);
            if (fat_from_r2(rho * rho + z * z) <= 0.0 || sub_weight(sub, z) <= 0.0) continue;
            const double A = std::hypot(rho, z + sig);
            const double B = std::hypot(rho, z - sig);
            if (A < 1e-12 || B < 1e-12) continue;
            const double dr = ph.amplitude_a * rho * (1.0 / A + s / B);
            const double dz = ph.amplitude_a * ((z + sig) / A + s * (z - sig) / B);
            g.rho_abs_max = std::max(g.rho_abs_max, std::abs(dr));
            g.z_min = std::min(g.z_min, dz);
            g.z_max = std::max(g.z_max, dz);
        }
    }
    std::lock_guard<std::mutex> lock(mu);
    memo.emplace(key, g);
    return g;
}

std::size_t nodes_for(double theta, double grad, double len, const QuadOptions& opt) {
    const double n = opt.nodes_per_oscillation * (1.0 + std::abs(theta) * grad * len / kTwoPi);
    return std::max(opt.min_nodes_axis, static_cast<std::size_t>(std::ceil(n)));
}

}  // namespace

QuadPlan plan_quadrature(const KernelSpec& spec, double r_max, double x3_lo, double x3_hi,
                         const QuadOptions& opt) {
    const GradRange g = gradient_range(spec.phase, spec.sub);
    const Domain d = domain_for(spec.sub);
    QuadPlan p;
    p.grad_rho = g.rho_abs_max + std::abs(r_max);
    p.grad_xi3 = std::max({std::abs(x3_lo + g.z_min), std::abs(x3_lo + g.z_max),
                           std::abs(x3_hi + g.z_min), std::abs(x3_hi + g.z_max)});
    p.n_rho = nodes_for(spec.theta, p.grad_rho, d.rho_hi - d.rho_lo, opt);
    p.n_xi3 = nodes_for(spec.theta, p.grad_xi3, d.z_hi - d.z_lo, opt);
    return p;
}

std::vector<std::complex<double>> eval_kernel_grid(const KernelSpec& spec, const std::vector<double>& rs,
                                                   const std::vector<double>& x3s,
                                                   const QuadOptions& opt, QuadPlan* used) {
    const std::size_t na = rs.size();
    const std::size_t nc = x3s.size();
    std::vector<cplx> out(na * nc, cplx(0.0, 0.0));
    if (na == 0 || nc == 0) return out;

    double r_max = 0.0;
    for (double r : rs) r_max = std::max(r_max, std::abs(r));
    const auto [x3_lo_it, x3_hi_it] = std::minmax_element(x3s.begin(), x3s.end());
    const QuadPlan plan = plan_quadrature(spec, r_max, *x3_lo_it, *x3_hi_it, opt);
    if (used != nullptr) *used = plan;
    if (static_cast<double>(plan.n_rho) * static_cast<double>(plan.n_xi3) > opt.max_nodes_total) {
        throw UnresolvedOscillation("node rule needs " + std::to_string(plan.n_rho) + " x " +
                                    std::to_string(plan.n_xi3) + " nodes, above the budget");
    }

    const Domain d = domain_for(spec.sub);
    const QuadRule qr = gauss_legendre_panels(d.rho_lo, d.rho_hi, {}, plan.n_rho);
    const QuadRule qz = gauss_legendre_panels(d.z_lo, d.z_hi, d.z_breaks, plan.n_xi3);
    const std::size_t nr = qr.size();
    const std::size_t nz = qz.size();
    const double theta = spec.theta;
    const auto& kt = simd::active();

    std::vector<double> zw(nz);
    for (std::size_t j = 0; j < nz; ++j) zw[j] = qz.w[j] * sub_weight(spec.sub, qz.x[j]);

    // Et[c][j] = exp(i theta x3_c z_j)
    std::vector<cplx> et(nc * nz);
    {
        const std::vector<double> ones(nz, 1.0);
        for (std::size_t c = 0; c < nc; ++c) {
            kt.cexp_weighted(qz.x.data(), ones.data(), theta * x3s[c], et.data() + c * nz, nz);
        }
    }

    constexpr std::size_t kRowBlock = 16;
    constexpr std::size_t kChunk = 512;
    std::vector<double> wrow(nz);
    std::vector<cplx> gblk(kRowBlock * nz);
    std::vector<cplx> hblk(kRowBlock * nc);
    std::vector<double> j0(na * kRowBlock);

    simd::PhaseRow row;
    row.sigma = spec.phase.rot_scale;
    row.a = spec.phase.amplitude_a;
    row.sign = spec.phase.sign();
    row.theta = theta;

    for (std::size_t i0 = 0; i0 < nr; i0 += kRowBlock) {
        const std::size_t rb = std::min(kRowBlock, nr - i0);
        // Columns with any support in this block: |z| < sqrt(9 - rho_min^2).
        const double rho_min = qr.x[i0];
        const double zlim = std::sqrt(std::max(0.0, kFatHi * kFatHi - rho_min * rho_min));
        const std::size_t jlo = static_cast<std::size_t>(
            std::lower_bound(qz.x.begin(), qz.x.end(), -zlim) - qz.x.begin());
        const std::size_t jhi = static_cast<std::size_t>(
            std::upper_bound(qz.x.begin(), qz.x.end(), zlim) - qz.x.begin());
        if (jhi <= jlo) continue;
        const std::size_t width = jhi - jlo;

        for (std::size_t b = 0; b < rb; ++b) {
            const double rho = qr.x[i0 + b];
            const double rw = kTwoPi * qr.w[i0 + b] * rho;
            const double r2 = rho * rho;
            for (std::size_t j = jlo; j < jhi; ++j) {
                wrow[j - jlo] = rw * zw[j] * fat_from_r2(r2 + qz.x[j] * qz.x[j]);
            }
            row.rho = rho;
            kt.oscillatory_row(row, qz.x.data() + jlo, wrow.data(), gblk.data() + b * width, width);
        }

        std::fill(hblk.begin(), hblk.end(), cplx(0.0, 0.0));
        for (std::size_t j0c = 0; j0c < width; j0c += kChunk) {
            const std::size_t kk = std::min(kChunk, width - j0c);
            kt.cgemm_nt(gblk.data() + j0c, width, et.data() + jlo + j0c, nz, hblk.data(), nc, rb, nc, kk);
        }

        for (std::size_t a = 0; a < na; ++a) {
            for (std::size_t b = 0; b < rb; ++b) {
                j0[a * kRowBlock + b] = ::j0(std::abs(theta * rs[a]) * qr.x[i0 + b]);
            }
        }
        for (std::size_t a = 0; a < na; ++a) {
            cplx* o = out.data() + a * nc;
            for (std::size_t b = 0; b < rb; ++b) {
                const double jv = j0[a * kRowBlock + b];
                const cplx* h = hblk.data() + b * nc;
                for (std::size_t c = 0; c < nc; ++c) o[c] += jv * h[c];
            }
        }
    }
    return out;
}

std::complex<double> eval_kernel(const KernelSpec& spec, const Vec3& x, const QuadOptions& opt) {
    const double r = std::hypot(x(0), x(1));
    return eval_kernel_grid(spec, {r}, {x(2)}, opt).front();
}

double kernel_mass(SubKernel sub) {
    KernelSpec s;
    s.theta = 0.0;
    s.sub = sub;
    return eval_kernel_grid(s, {0.0}, {0.0}).front().real();
}

std::vector<CylPoint> stationary_predictors(const KernelSpec& spec, int lattice) {
    std::vector<CylPoint> pts;
    const double h = 2.0 * kFatHi / (lattice - 1);
    for (int i = 0; i < lattice; ++i) {
        for (int j = 0; j < lattice; ++j) {
            for (int l = 0; l < lattice; ++l) {
                const Frequency xi{-kFatHi + i * h, -kFatHi + j * h, -kFatHi + l * h};
                const double r = xi.norm();
                if (fat_cutoff(r) <= 0.0 || sub_weight(spec.sub, xi.xi3) <= 0.0) continue;
                Vec3 g;
                try {
                    g = phase_gradient(spec.phase, xi);
                } catch (const SingularPoint&) {
                    continue;
                }
                pts.push_back({std::hypot(g(0), g(1)), -g(2)});
            }
        }
    }
    return pts;
}

std::vector<double> axis_images(const KernelSpec& spec) {
    const Domain d = domain_for(spec.sub);
    const double a = spec.phase.amplitude_a, sg = spec.phase.sign(), sig = spec.phase.rot_scale;
    std::vector<double> out;
    const int m = 4000;
    for (int j = 0; j <= m; ++j) {
        const double z = d.z_lo + (d.z_hi - d.z_lo) * j / m;
        if (fat_from_r2(z * z) <= 0.0 || sub_weight(spec.sub, z) <= 0.0) continue;
        const double A = std::abs(z + sig), B = std::abs(z - sig);
        if (A < 1e-12 || B < 1e-12) continue;
        const double x3 = -a * ((z + sig) / A + sg * (z - sig) / B);
        bool seen = false;
        for (double v : out) seen = seen || std::abs(v - x3) < 1e-9 * (1.0 + std::abs(x3));
        if (!seen) out.push_back(x3);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

struct Cand {
    double val;
    double r;
    double x3;
};

}  // namespace

SupResult sup_kernel(const KernelSpec& spec, const SearchPolicy& policy, const QuadOptions& opt) {
    SupResult res;
    const double theta = std::abs(spec.theta);
    if (theta == 0.0) {
        res.value = std::abs(eval_kernel_grid(spec, {0.0}, {0.0}, opt, &res.plan).front());
        res.grid_value = res.value;
        res.origin_included = true;
        return res;
    }

    const auto preds = stationary_predictors(spec, policy.lattice);
    double rmax = 0.0, zlo = 1e300, zhi = -1e300;
    for (const auto& p : preds) {
        rmax = std::max(rmax, p.r);
        zlo = std::min(zlo, p.x3);
        zhi = std::max(zhi, p.x3);
    }
    // Features of |I| have width ~ 1/theta; keep the hull at least that wide.
    const double floor_w = 8.0 / theta;
    const double zc = 0.5 * (zlo + zhi);
    const double zh = std::max(policy.dilation * 0.5 * (zhi - zlo), floor_w);
    const double rh = std::max(policy.dilation * rmax, floor_w);

    const auto rs = linspace(0.0, rh, policy.grid_r);
    const auto zs = linspace(zc - zh, zc + zh, policy.grid_x3);
    const auto vals = eval_kernel_grid(spec, rs, zs, opt, &res.plan);

    std::vector<Cand> cands;
    for (std::size_t a = 0; a < rs.size(); ++a) {
        for (std::size_t c = 0; c < zs.size(); ++c) {
            cands.push_back({std::abs(vals[a * zs.size() + c]), rs[a], zs[c]});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.val > y.val; });
    res.grid_value = cands.front().val;
    res.value = cands.front().val;
    res.argmax = {cands.front().r, cands.front().x3};

    // Local zoom around the best distinct grid points.
    const double dr0 = rs.size() > 1 ? rs[1] - rs[0] : rh;
    const double dz0 = zs.size() > 1 ? zs[1] - zs[0] : zh;
    std::vector<Cand> starts;
    for (const auto& c : cands) {
        bool near = false;
        for (const auto& s : starts) {
            if (std::abs(s.r - c.r) <= 1.5 * dr0 && std::abs(s.x3 - c.x3) <= 1.5 * dz0) near = true;
        }
        if (!near) starts.push_back(c);
        if (static_cast<int>(starts.size()) >= policy.refine_starts) break;
    }
    // Each level shrinks the spacing by 4 with a 9-point window per axis.
    const int extra = static_cast<int>(std::ceil(0.5 * std::log2(std::max(1.0, std::max(dr0, dz0) * theta / 0.1))));
    const int levels = std::min(8, std::max(policy.refine_levels, extra));
    double dr = dr0, dz = dz0;
    for (int lev = 0; lev < levels && !starts.empty(); ++lev) {
        dr *= 0.25;
        dz *= 0.25;
        std::vector<double> rr, zz;
        for (const auto& s : starts) {
            for (int o = -4; o <= 4; ++o) {
                const double r = s.r + o * dr;
                if (r >= 0.0) rr.push_back(r);
                zz.push_back(s.x3 + o * dz);
            }
        }
        std::sort(rr.begin(), rr.end());
        rr.erase(std::unique(rr.begin(), rr.end()), rr.end());
        std::sort(zz.begin(), zz.end());
        zz.erase(std::unique(zz.begin(), zz.end()), zz.end());
        const auto v = eval_kernel_grid(spec, rr, zz, opt);
        for (auto& s : starts) {
            for (std::size_t a = 0; a < rr.size(); ++a) {
                if (std::abs(rr[a] - s.r) > 4.01 * dr) continue;
                for (std::size_t c = 0; c < zz.size(); ++c) {
                    if (std::abs(zz[c] - s.x3) > 4.01 * dz) continue;
                    const double m = std::abs(v[a * zz.size() + c]);
                    if (m > s.val) s = {m, rr[a], zz[c]};
                }
            }
        }
        for (const auto& s : starts) {
            if (s.val > res.value) {
                res.value = s.val;
                res.argmax = {s.r, s.x3};
            }
        }
    }

    // Axis windows and the origin share one batch: the row sums dominate the
    // cost, so every extra call is expensive at large theta.
    std::vector<double> rr = {0.0};
    std::vector<double> zz;
    if (policy.axis_scan) {
        rr = {0.0, 2.0 / theta, 5.0 / theta, 10.0 / theta, 20.0 / theta, 40.0 / theta};
        const double hw = policy.axis_halfwidth / theta;
        const int nz = 1 + 2 * static_cast<int>(std::ceil(policy.axis_halfwidth / policy.axis_step));
        for (double z0 : axis_images(spec)) {
            const auto w = linspace(z0 - hw, z0 + hw, nz);
            zz.insert(zz.end(), w.begin(), w.end());
        }
    }
    if (policy.include_origin) {
        double lo = 0.0, hi = 0.0;
        for (double z : zz) {
            lo = std::min(lo, z);
            hi = std::max(hi, z);
        }
        const QuadPlan p0 = plan_quadrature(spec, rr.back(), lo, hi, opt);
        if (static_cast<double>(p0.n_rho) * static_cast<double>(p0.n_xi3) <= opt.max_nodes_total) {
            zz.push_back(0.0);
            res.origin_included = true;
        }
    }
    if (!zz.empty()) {
        const auto v = eval_kernel_grid(spec, rr, zz, opt);
        for (std::size_t a = 0; a < rr.size(); ++a) {
            for (std::size_t c = 0; c < zz.size(); ++c) {
                const double m = std::abs(v[a * zz.size() + c]);
                if (m > res.value) {
                    res.value = m;
                    res.argmax = {rr[a], zz[c]};
                }
            }
        }
    }
    return res;
}

SweepRequest default_sweep(Branch branch, double sigma_k, int n_samples) {
    SweepRequest req;
    req.branch = branch;
    req.sigma_k = sigma_k;
    req.n_samples = n_samples;
    // The regime formulas taken as a continuous max; inside the middle band
    // sigma = 1 still gives theta0 = 1.
    double theta0 = 1.0;
    if (branch == Branch::minus) {
        theta0 = std::max({1.0, 1.0 / sigma_k, sigma_k * sigma_k / 10.0});
    } else if (classify_sigma(sigma_k) != Regime::high) {
        theta0 = std::max(1.0, sigma_k);
    }
    req.theta_lo = theta0;
    req.theta_hi = 1000.0 * theta0;
    return req;
}

DecayMeasurement decay_sweep(const SweepRequest& req, const SearchPolicy& policy,
                             const QuadOptions& opt, int workers, DecayMeasurement* out) {
    if (!(req.theta_lo > 0.0) || !(req.theta_hi > req.theta_lo) || req.n_samples < 3) {
        throw std::invalid_argument("decay_sweep: need theta_hi > theta_lo > 0 and >= 3 samples");
    }
    if (std::log10(req.theta_hi / req.theta_lo) < 2.0 - 1e-12) {
        throw std::invalid_argument("decay_sweep: theta range must span at least two decades");
    }
    DecayMeasurement m;
    m.branch = req.branch;
    m.sigma_k = req.sigma_k;
    m.regime = classify_sigma(req.sigma_k);
    m.samples.resize(req.n_samples);

    const double llo = std::log(req.theta_lo);
    const double lhi = std::log(req.theta_hi);
    std::vector<double> thetas(req.n_samples);
    for (int i = 0; i < req.n_samples; ++i) {
        thetas[i] = std::exp(llo + (lhi - llo) * i / (req.n_samples - 1));
    }

    // Largest theta first so the expensive samples start early.
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex fail_mu;
    auto work = [&] {
        for (;;) {
            const int idx = next.fetch_add(1);
            if (idx >= req.n_samples) return;
            const int i = req.n_samples - 1 - idx;
            try {
                KernelSpec ks;
                ks.phase = PhaseSpec{req.branch, req.amplitude_a, req.sigma_k};
                ks.theta = thetas[i];
                ks.sub = req.sub;
                m.samples[i] = {thetas[i], sup_kernel(ks, policy, opt).value};
            } catch (...) {
                std::lock_guard<std::mutex> lock(fail_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int nw = std::max(1, workers);
    if (nw == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nw; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    const double mass = kernel_mass(req.sub);
    for (const auto& s : m.samples) {
        if (s.sup_abs > mass * (1.0 + 1e-9)) m.trivial_bound_ok = false;
    }

    // Fit window: drop the first decade.
    const double cut = req.theta_lo * 10.0 * (1.0 - 1e-12);
    std::vector<double> x, y;
    for (const auto& s : m.samples) {
        if (s.theta >= cut) {
            x.push_back(s.theta);
            y.push_back(s.sup_abs);
        }
    }
    const LineFit f = fit_loglog(x, y);
    m.alpha = -f.slope;
    m.fit_r2 = f.r2;
    m.window_lo = x.front();
    m.window_hi = x.back();

    // Dyadic-block running max must not grow beyond the onset (10% slack).
    double prev = -1.0;
    for (double lo = cut; lo < req.theta_hi * (1 + 1e-12); lo *= 2.0) {
        double blk = -1.0;
        for (const auto& s : m.samples) {
            if (s.theta >= lo && s.theta < 2.0 * lo) blk = std::max(blk, s.sup_abs);
        }
        if (blk < 0.0) continue;
        if (prev >= 0.0 && blk > 1.1 * prev) m.envelope_monotone = false;
        prev = blk;
    }

    if (out != nullptr) *out = m;
    if (f.r2 < 0.95) {
        throw PoorFit("decay fit r^2 below 0.95", f.r2);
    }
    return m;
}

double decay_onset_theta(const DecayMeasurement& m) {
    std::vector<double> x, y;
    for (const auto& s : m.samples) {
        if (s.theta >= m.window_lo && s.theta <= m.window_hi) {
            x.push_back(s.theta);
            y.push_back(s.sup_abs);
        }
    }
    const LineFit f = fit_loglog(x, y);
    const double mass = kernel_mass(SubKernel::full);
    // mass = exp(b) theta^{slope}
    return std::exp((std::log(mass) - f.intercept) / f.slope);
}

}  // namespace dispersio
