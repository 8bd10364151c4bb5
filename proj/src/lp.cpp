#include "dispersio/lp.hpp"

#include "dispersio/quadrature.hpp"
#include "dispersio/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace dispersio {

namespace {

double bump_exp(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

constexpr double kPhiLo = 0.75;
constexpr double kPhiHi = 8.0 / 3.0;
constexpr double kChiLo = 0.75;
constexpr double kChiHi = 4.0 / 3.0;
constexpr double kFatLo = 0.5;
constexpr double kFatHi = 3.0;
constexpr double kSplitIn = 1.0 / 29.0;
constexpr double kSplitOut = 1.0 / 28.0;

}  // namespace

double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = bump_exp(x);
    const double b = bump_exp(1.0 - x);
    return a / (a + b);
}

double lp_chi(double r) { return 1.0 - smooth_step((r - kChiLo) / (kChiHi - kChiLo)); }

double lp_phi(double r) {
    if (r <= kPhiLo || r >= kPhiHi) return 0.0;
    return lp_chi(0.5 * r) - lp_chi(r);
}

double fat_cutoff(double r) {
    if (r <= kFatLo || r >= kFatHi) return 0.0;
    if (r < kPhiLo) return smooth_step((r - kFatLo) / (kPhiLo - kFatLo));
    if (r <= kPhiHi) return 1.0;
    return 1.0 - smooth_step((r - kPhiHi) / (kFatHi - kPhiHi));
}

double split_psi1(double xi3) {
    const double a = std::abs(xi3);
    if (a <= kSplitIn) return 1.0;
    if (a >= kSplitOut) return 0.0;
    return 1.0 - smooth_step((a - kSplitIn) / (kSplitOut - kSplitIn));
}

double DyadicPartition::weight(int k, double abs_xi) const {
    if (k < k_min || k > k_max) return 0.0;
    return lp_phi(std::ldexp(abs_xi, -k));
}

std::pair<int, int> DyadicPartition::shells_at(double abs_xi) const {
    if (!(abs_xi > 0.0)) return {1, 0};
    // 2^k * 3/4 < |xi| < 2^k * 8/3
    const int lo = static_cast<int>(std::floor(std::log2(abs_xi / kPhiHi))) + 1;
    const int hi = static_cast<int>(std::ceil(std::log2(abs_xi / kPhiLo))) - 1;
    return {std::max(lo - 1, k_min), std::min(hi + 1, k_max)};
}

double DyadicPartition::sum(double abs_xi) const {
    const auto [lo, hi] = shells_at(abs_xi);
    double s = 0.0;
    for (int k = lo; k <= hi; ++k) s += weight(k, abs_xi);
    return s;
}

DyadicPartition build_partition(int k_min, int k_max) {
    if (k_min > k_max) throw std::invalid_argument("partition: k_min > k_max");
    return {k_min, k_max};
}

namespace {

template <class Mult>
SpectralField apply_radial(const SpectralField& f, Mult mult) {
    SpectralField out = f;
    const int n = f.n();
    for (int i = 0; i < n; ++i) {
        const double x1 = f.xi(i);
        for (int j = 0; j < n; ++j) {
            const double x2 = f.xi(j);
            for (int l = 0; l < n; ++l) {
                const double x3 = f.xi(l);
                const double w = mult(std::sqrt(x1 * x1 + x2 * x2 + x3 * x3));
                const std::size_t p = f.index(i, j, l);
                for (int c = 0; c < f.ncomp(); ++c) out.component(c)[p] *= w;
            }
        }
    }
    return out;
}

}  // namespace

SpectralField apply_shell(const SpectralField& f, int k, const DyadicPartition& part) {
    return apply_radial(f, [&](double r) { return part.weight(k, r); });
}

SpectralField apply_fat_cutoff(const SpectralField& f, int k, int power) {
    return apply_radial(f, [&](double r) {
        const double v = fat_cutoff(std::ldexp(r, -k));
        return power == 2 ? v * v : v;
    });
}

std::pair<int, int> grid_shell_range(const SpectralField& f, const DyadicPartition& part) {
    const double lo = 1.0 / f.length();
    const double hi = std::sqrt(3.0) * (f.n() / 2) / f.length();
    const int a = std::max(part.k_min, part.shells_at(lo).first);
    const int b = std::min(part.k_max, part.shells_at(hi).second);
    return {a, b};
}

namespace {

double lsum(const std::vector<double>& terms, double s) {
    if (std::isinf(s)) {
        double m = 0.0;
        for (double t : terms) m = std::max(m, t);
        return m;
    }
    double acc = 0.0;
    for (double t : terms) acc += std::pow(t, s);
    return std::pow(acc, 1.0 / s);
}

}  // namespace

double besov_norm(const SpectralField& f, double m, double r, double s, const DyadicPartition& part) {
    const auto [lo, hi] = grid_shell_range(f, part);
    std::vector<double> terms;
    for (int k = lo; k <= hi; ++k) {
        terms.push_back(std::pow(2.0, m * k) *
                        lebesgue_norm(apply_shell(f, k, part), r));
    }
    return lsum(terms, s);
}

double time_lq(const std::vector<double>& t, const std::vector<double>& g, double q) {
    if (t.size() != g.size() || t.empty()) throw std::invalid_argument("time_lq: size mismatch");
    if (std::isinf(q)) {
        double m = 0.0;
        for (double v : g) m = std::max(m, std::abs(v));
        return m;
    }
    if (t.size() == 1) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double h = t[i + 1] - t[i];
        acc += 0.5 * h * (std::pow(std::abs(g[i]), q) + std::pow(std::abs(g[i + 1]), q));
    }
    return std::pow(acc, 1.0 / q);
}

double spacetime_besov_norm(const std::vector<Snapshot>& snaps, double q, double m, double r,
                            double s, const DyadicPartition& part) {
    if (snaps.empty()) return 0.0;
    const auto [lo, hi] = grid_shell_range(snaps.front().field, part);
    std::vector<double> t;
    for (const auto& sn : snaps) t.push_back(sn.t);
    std::vector<double> terms;
    for (int k = lo; k <= hi; ++k) {
        std::vector<double> g;
        for (const auto& sn : snaps) g.push_back(lebesgue_norm(apply_shell(sn.field, k, part), r));
        terms.push_back(std::pow(2.0, m * k) * time_lq(t, g, q));
    }
    return lsum(terms, s);
}

double lq_of_besov_norm(const std::vector<Snapshot>& snaps, double q, double m, double r, double s,
                        const DyadicPartition& part) {
    if (snaps.empty()) return 0.0;
    std::vector<double> t, g;
    for (const auto& sn : snaps) {
        t.push_back(sn.t);
        g.push_back(besov_norm(sn.field, m, r, s, part));
    }
    return time_lq(t, g, q);
}

namespace {

// Radial inverse transform g(s) = (2 pi^2)^{-1} int psi(R) R^2 j0(sR) dR of
// psi(xi) = fat(2^{-k}|xi|)^power, tabulated on Gauss panels in s.
struct HankelTable {
    std::vector<double> s, ws, g;
};

// Decay of g: at the unit scale |g| s^2 is below 1e-9 beyond s = 800.
constexpr double kSMaxUnit = 1000.0;
constexpr double kPanelWidthUnit = 0.5;

HankelTable build_hankel(int k, int power) {
    const double scale = std::ldexp(1.0, k);
    const double s_max = kSMaxUnit / scale;
    const double r_lo = kFatLo * scale;
    const double r_hi = kFatHi * scale;
    // Six nodes per oscillation of sin(sR) at s_max, plus headroom for the
    // cutoff transitions.
    const double osc = s_max * (r_hi - r_lo) / (2.0 * std::numbers::pi);
    const auto n_r = static_cast<std::size_t>(6.0 * (1.0 + osc)) + 64 * kPanelOrder;
    const QuadRule rr = gauss_legendre_panels(r_lo, r_hi, {kPhiLo * scale, kPhiHi * scale}, n_r);

    std::vector<double> amp(rr.size());
    for (std::size_t i = 0; i < rr.size(); ++i) {
        double v = fat_cutoff(rr.x[i] / scale);
        if (power == 2) v *= v;
        amp[i] = rr.w[i] * v * rr.x[i];
    }

    const auto n_panels = static_cast<std::size_t>(std::ceil(kSMaxUnit / kPanelWidthUnit));
    const QuadRule sr = gauss_legendre_panels(0.0, s_max, {}, n_panels * kPanelOrder);
    HankelTable t;
    t.s = sr.x;
    t.ws = sr.w;
    t.g.resize(sr.size());
    const auto& kt = simd::active();
    std::vector<cplx> buf(rr.size());
    const double norm = 1.0 / (2.0 * std::numbers::pi * std::numbers::pi);
    for (std::size_t i = 0; i < sr.size(); ++i) {
        const double s = sr.x[i];
        kt.cexp_weighted(rr.x.data(), amp.data(), s, buf.data(), buf.size());
        double acc = 0.0;
        for (const auto& v : buf) acc += v.imag();
        t.g[i] = norm * acc / s;
    }
    return t;
}

const HankelTable& hankel(int k, int power) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, HankelTable> memo;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find({k, power});
        if (it != memo.end()) return it->second;
    }
    HankelTable t = build_hankel(k, power);
    std::lock_guard<std::mutex> lock(mu);
    return memo.emplace(std::make_pair(k, power), std::move(t)).first->second;
}

}  // namespace

double inverse_fourier_lp(int k, int power, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("inverse_fourier_lp: p must be >= 1");
    const HankelTable& t = hankel(k, power);
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : t.g) m = std::max(m, std::abs(v));
        return m;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < t.s.size(); ++i) {
        acc += t.ws[i] * std::pow(std::abs(t.g[i]), p) * t.s[i] * t.s[i];
    }
    return std::pow(4.0 * std::numbers::pi * acc, 1.0 / p);
}

CutoffConstants cutoff_constants(int k, double r) {
    if (!(r >= 2.0)) throw std::invalid_argument("cutoff_constants: r must be in [2, inf]");
    const double p = std::isinf(r) ? 2.0 : 1.0 / (0.5 + 1.0 / r);
    return {inverse_fourier_lp(k, 2, 1.0), inverse_fourier_lp(k, 1, 1.0), inverse_fourier_lp(k, 1, p)};
}

}  // namespace dispersio
