#include "doctest.h"

#include "dispersio/simd/kernels.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace dispersio::simd;

namespace {

std::vector<cplx> random_c(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<cplx> v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

std::vector<double> random_d(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

double max_err(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

}  // namespace

TEST_CASE("select and active") {
    CHECK(select("scalar"));
    CHECK(std::string(active().name) == "scalar");
    CHECK_FALSE(select("nonsense"));
    CHECK(select("auto"));
}

#if defined(DISPERSIO_HAVE_AVX2)
TEST_CASE("AVX2 kernels agree with the scalar reference") {
    if (!cpu_has_avx2()) return;
    const KernelTable& s = scalar_kernels();
    const KernelTable& v = avx2_kernels();
    std::mt19937_64 rng(42);
    // Odd lengths exercise the tails.
    for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 1001u}) {
        const auto a = random_c(n, rng), b = random_c(n, rng);
        std::vector<cplx> o1(n), o2(n);
        s.cmul(a.data(), b.data(), o1.data(), n);
        v.cmul(a.data(), b.data(), o2.data(), n);
        CHECK(max_err(o1, o2) < 1e-14);

        const auto ph = random_d(n, rng, -50.0, 50.0);
        s.cmul_phase(a.data(), ph.data(), 3.7, o1.data(), n);
        v.cmul_phase(a.data(), ph.data(), 3.7, o2.data(), n);
        CHECK(max_err(o1, o2) < 1e-13);

        const auto w = random_d(n, rng, 0.0, 2.0);
        s.cexp_weighted(ph.data(), w.data(), 1e3, o1.data(), n);
        v.cexp_weighted(ph.data(), w.data(), 1e3, o2.data(), n);
        CHECK(max_err(o1, o2) < 1e-12);

        const auto z = random_d(n, rng, -3.0, 3.0);
        for (double sign : {-1.0, 1.0}) {
            const PhaseRow row{0.8, 0.37, 1.0, sign, 2500.0};
            s.oscillatory_row(row, z.data(), w.data(), o1.data(), n);
            v.oscillatory_row(row, z.data(), w.data(), o2.data(), n);
            CHECK(max_err(o1, o2) < 1e-11);
        }

        CHECK(std::abs(s.sum_abs2(a.data(), n) - v.sum_abs2(a.data(), n)) < 1e-12 * s.sum_abs2(a.data(), n));
        CHECK(s.max_abs(ph.data(), n) == v.max_abs(ph.data(), n));
    }
}

TEST_CASE("AVX2 sincos beyond the reduction range falls back correctly") {
    if (!cpu_has_avx2()) return;
    std::vector<double> ph = {1e10, -3e12, 0.5, 2e9, 7.0};
    std::vector<double> w(ph.size(), 1.0);
    std::vector<cplx> o1(ph.size()), o2(ph.size());
    scalar_kernels().cexp_weighted(ph.data(), w.data(), 1.0, o1.data(), ph.size());
    avx2_kernels().cexp_weighted(ph.data(), w.data(), 1.0, o2.data(), ph.size());
    CHECK(max_err(o1, o2) < 1e-9);
}

TEST_CASE("AVX2 complex GEMM agrees with the scalar reference") {
    if (!cpu_has_avx2()) return;
    std::mt19937_64 rng(9);
    const std::size_t shapes[][3] = {{1, 1, 1}, {3, 5, 7}, {16, 33, 512}, {17, 2, 129}};
    for (const auto& sh : shapes) {
        const std::size_t m = sh[0], nc = sh[1], kk = sh[2];
        const auto A = random_c(m * kk, rng), B = random_c(nc * kk, rng);
        auto C1 = random_c(m * nc, rng);
        auto C2 = C1;
        scalar_kernels().cgemm_nt(A.data(), kk, B.data(), kk, C1.data(), nc, m, nc, kk);
        avx2_kernels().cgemm_nt(A.data(), kk, B.data(), kk, C2.data(), nc, m, nc, kk);
        CHECK(max_err(C1, C2) < 1e-11 * std::sqrt(static_cast<double>(kk)));
    }
}
#endif

TEST_CASE("scalar GEMM against a naive triple loop") {
    std::mt19937_64 rng(1);
    const std::size_t m = 4, nc = 3, kk = 5;
    const auto A = random_c(m * kk, rng), B = random_c(nc * kk, rng);
    std::vector<cplx> C(m * nc, 0.0), R(m * nc, 0.0);
    scalar_kernels().cgemm_nt(A.data(), kk, B.data(), kk, C.data(), nc, m, nc, kk);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t j = 0; j < kk; ++j) R[i * nc + c] += A[i * kk + j] * B[c * kk + j];
    CHECK(max_err(C, R) < 1e-13);
}
