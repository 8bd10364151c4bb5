// Built with -mavx2 -mfma. Nothing here may be inlined into code that runs
// before the CPU check in dispatch.cpp.
#include "dispersio/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace dispersio::simd {
namespace {

// pi/2 split into three doubles; the FMA reduction keeps |r| <= pi/4 accurate
// to a few ulp for |x| well beyond the phases used here.
constexpr double kPio2Hi = 1.5707963267948966e+00;
constexpr double kPio2Mid = 6.123233995736766e-17;
constexpr double kPio2Lo = -1.4973849048591698e-33;
constexpr double kTwoOverPi = 0.63661977236758134308;
constexpr double kRoundMagic = 6755399441055744.0;  // 2^52 + 2^51
constexpr double kLargeArg = 1e9;

inline __m256d poly_sin(__m256d z) {
    __m256d p = _mm256_set1_pd(1.58962301576546568060E-10);
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-2.50507477628578072866E-8));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.75573136213857245213E-6));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.98412698295895385996E-4));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(8.33333333332211858878E-3));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.66666666666666307295E-1));
    return p;
}

inline __m256d poly_cos(__m256d z) {
    __m256d p = _mm256_set1_pd(-1.13585365213876817300E-11);
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.08757008419747316778E-9));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-2.75573141792967388112E-7));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.48015872888517045348E-5));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(-1.38888888888730564116E-3));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(4.16666666666665929218E-2));
    return p;
}

inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
    const __m256d absx = _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
    if (_mm256_movemask_pd(_mm256_cmp_pd(absx, _mm256_set1_pd(kLargeArg), _CMP_GT_OQ)) != 0) {
        alignas(32) double xs[4], ss[4], cs[4];
        _mm256_store_pd(xs, x);
        for (int i = 0; i < 4; ++i) {
            ss[i] = std::sin(xs[i]);
            cs[i] = std::cos(xs[i]);
        }
        s_out = _mm256_load_pd(ss);
        c_out = _mm256_load_pd(cs);
        return;
    }

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2Hi), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2Mid), r);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2Lo), r);

    const __m256d z = _mm256_mul_pd(r, r);
    const __m256d sr = _mm256_fmadd_pd(_mm256_mul_pd(r, z), poly_sin(z), r);
    const __m256d cr = _mm256_fmadd_pd(_mm256_mul_pd(z, z), poly_cos(z),
                                       _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));

    // Quadrant bits from the low mantissa bits of n + magic.
    const __m256i q = _mm256_castpd_si256(_mm256_add_pd(n, _mm256_set1_pd(kRoundMagic)));
    const __m256i one = _mm256_set1_epi64x(1);
    const __m256i two = _mm256_set1_epi64x(2);
    const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
    const __m256d sin_sign = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_and_si256(q, two), 62));
    const __m256d cos_sign = _mm256_castsi256_pd(
        _mm256_slli_epi64(_mm256_and_si256(_mm256_add_epi64(q, one), two), 62));

    s_out = _mm256_xor_pd(_mm256_blendv_pd(sr, cr, swap), sin_sign);
    c_out = _mm256_xor_pd(_mm256_blendv_pd(cr, sr, swap), cos_sign);
}

// (re0..re3), (im0..im3) -> two registers of interleaved complex values.
inline void store_interleaved(cplx* out, __m256d re, __m256d im) {
    const __m256d lo = _mm256_unpacklo_pd(re, im);
    const __m256d hi = _mm256_unpackhi_pd(re, im);
    double* d = reinterpret_cast<double*>(out);
    _mm256_storeu_pd(d, _mm256_permute2f128_pd(lo, hi, 0x20));
    _mm256_storeu_pd(d + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
}

inline void load_deinterleaved(const cplx* in, __m256d& re, __m256d& im) {
    const double* d = reinterpret_cast<const double*>(in);
    const __m256d a = _mm256_loadu_pd(d);      // r0 i0 r1 i1
    const __m256d b = _mm256_loadu_pd(d + 4);  // r2 i2 r3 i3
    const __m256d lo = _mm256_permute2f128_pd(a, b, 0x20);  // r0 i0 r2 i2
    const __m256d hi = _mm256_permute2f128_pd(a, b, 0x31);  // r1 i1 r3 i3
    re = _mm256_unpacklo_pd(lo, hi);
    im = _mm256_unpackhi_pd(lo, hi);
}

// Two interleaved complex products per register.
inline __m256d cmul2(__m256d a, __m256d b) {
    const __m256d br = _mm256_movedup_pd(b);
    const __m256d bi = _mm256_permute_pd(b, 0xF);
    const __m256d as = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(as, bi));
}

void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    double* po = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        _mm256_storeu_pd(po + 2 * i, cmul2(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i)));
    }
    for (; i < n; ++i) {
        out[i] = a[i] * b[i];
    }
}

void cmul_phase(const cplx* in, const double* phase, double scale, cplx* out, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d s, c;
        sincos4(_mm256_mul_pd(vs, _mm256_loadu_pd(phase + i)), s, c);
        __m256d re, im;
        load_deinterleaved(in + i, re, im);
        const __m256d ore = _mm256_fmsub_pd(re, c, _mm256_mul_pd(im, s));
        const __m256d oim = _mm256_fmadd_pd(re, s, _mm256_mul_pd(im, c));
        store_interleaved(out + i, ore, oim);
    }
    for (; i < n; ++i) {
        const double t = scale * phase[i];
        out[i] = in[i] * cplx(std::cos(t), std::sin(t));
    }
}

void cexp_weighted(const double* phase, const double* w, double scale, cplx* out, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d s, c;
        sincos4(_mm256_mul_pd(vs, _mm256_loadu_pd(phase + i)), s, c);
        const __m256d vw = _mm256_loadu_pd(w + i);
        store_interleaved(out + i, _mm256_mul_pd(vw, c), _mm256_mul_pd(vw, s));
    }
    for (; i < n; ++i) {
        const double t = scale * phase[i];
        out[i] = cplx(w[i] * std::cos(t), w[i] * std::sin(t));
    }
}

void oscillatory_row(const PhaseRow& row, const double* z, const double* w, cplx* out,
                     std::size_t n) {
    const double r2 = row.rho * row.rho;
    const double scale = row.theta * row.a;
    const __m256d vr2 = _mm256_set1_pd(r2);
    const __m256d vsig = _mm256_set1_pd(row.sigma);
    const __m256d vsign = _mm256_set1_pd(row.sign);
    const __m256d vscale = _mm256_set1_pd(scale);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d vz = _mm256_loadu_pd(z + j);
        const __m256d zp = _mm256_add_pd(vz, vsig);
        const __m256d zm = _mm256_sub_pd(vz, vsig);
        const __m256d A = _mm256_sqrt_pd(_mm256_fmadd_pd(zp, zp, vr2));
        const __m256d B = _mm256_sqrt_pd(_mm256_fmadd_pd(zm, zm, vr2));
        const __m256d q = _mm256_fmadd_pd(vsign, B, A);
        __m256d s, c;
        sincos4(_mm256_mul_pd(vscale, q), s, c);
        const __m256d vw = _mm256_loadu_pd(w + j);
        store_interleaved(out + j, _mm256_mul_pd(vw, c), _mm256_mul_pd(vw, s));
    }
    for (; j < n; ++j) {
        const double zp = z[j] + row.sigma;
        const double zm = z[j] - row.sigma;
        const double q = std::sqrt(r2 + zp * zp) + row.sign * std::sqrt(r2 + zm * zm);
        const double t = scale * q;
        out[j] = cplx(w[j] * std::cos(t), w[j] * std::sin(t));
    }
}

// Accumulators hold (ar*br, ai*bi, ...) and (ar*bi, ai*br, ...); the complex
// dot product is (sum even - sum odd of the first, sum of the second).
inline cplx reduce_dot(__m256d rr, __m256d ri) {
    alignas(32) double a[4], b[4];
    _mm256_store_pd(a, rr);
    _mm256_store_pd(b, ri);
    return {(a[0] + a[2]) - (a[1] + a[3]), (b[0] + b[1]) + (b[2] + b[3])};
}

void cgemm_nt(const cplx* A, std::size_t lda, const cplx* Bt, std::size_t ldb, cplx* C,
              std::size_t ldc, std::size_t m, std::size_t nc, std::size_t kk) {
    const std::size_t kv = kk & ~std::size_t(1);
    std::size_t i = 0;
    for (; i + 2 <= m; i += 2) {
        const double* a0 = reinterpret_cast<const double*>(A + i * lda);
        const double* a1 = reinterpret_cast<const double*>(A + (i + 1) * lda);
        std::size_t c = 0;
        for (; c + 2 <= nc; c += 2) {
            const double* b0 = reinterpret_cast<const double*>(Bt + c * ldb);
            const double* b1 = reinterpret_cast<const double*>(Bt + (c + 1) * ldb);
            __m256d r00 = _mm256_setzero_pd(), s00 = _mm256_setzero_pd();
            __m256d r01 = _mm256_setzero_pd(), s01 = _mm256_setzero_pd();
            __m256d r10 = _mm256_setzero_pd(), s10 = _mm256_setzero_pd();
            __m256d r11 = _mm256_setzero_pd(), s11 = _mm256_setzero_pd();
            for (std::size_t j = 0; j < kv; j += 2) {
                const __m256d va0 = _mm256_loadu_pd(a0 + 2 * j);
                const __m256d va1 = _mm256_loadu_pd(a1 + 2 * j);
                const __m256d vb0 = _mm256_loadu_pd(b0 + 2 * j);
                const __m256d vb1 = _mm256_loadu_pd(b1 + 2 * j);
                const __m256d wb0 = _mm256_permute_pd(vb0, 0x5);
                const __m256d wb1 = _mm256_permute_pd(vb1, 0x5);
                r00 = _mm256_fmadd_pd(va0, vb0, r00);
                s00 = _mm256_fmadd_pd(va0, wb0, s00);
                r01 = _mm256_fmadd_pd(va0, vb1, r01);
                s01 = _mm256_fmadd_pd(va0, wb1, s01);
                r10 = _mm256_fmadd_pd(va1, vb0, r10);
                s10 = _mm256_fmadd_pd(va1, wb0, s10);
                r11 = _mm256_fmadd_pd(va1, vb1, r11);
                s11 = _mm256_fmadd_pd(va1, wb1, s11);
            }
            cplx d00 = reduce_dot(r00, s00), d01 = reduce_dot(r01, s01);
            cplx d10 = reduce_dot(r10, s10), d11 = reduce_dot(r11, s11);
            if (kv < kk) {
                d00 += A[i * lda + kv] * Bt[c * ldb + kv];
                d01 += A[i * lda + kv] * Bt[(c + 1) * ldb + kv];
                d10 += A[(i + 1) * lda + kv] * Bt[c * ldb + kv];
                d11 += A[(i + 1) * lda + kv] * Bt[(c + 1) * ldb + kv];
            }
            C[i * ldc + c] += d00;
            C[i * ldc + c + 1] += d01;
            C[(i + 1) * ldc + c] += d10;
            C[(i + 1) * ldc + c + 1] += d11;
        }
        for (; c < nc; ++c) {
            for (std::size_t ii = i; ii < i + 2; ++ii) {
                const double* a = reinterpret_cast<const double*>(A + ii * lda);
                const double* b = reinterpret_cast<const double*>(Bt + c * ldb);
                __m256d r = _mm256_setzero_pd(), s = _mm256_setzero_pd();
                for (std::size_t j = 0; j < kv; j += 2) {
                    const __m256d va = _mm256_loadu_pd(a + 2 * j);
                    const __m256d vb = _mm256_loadu_pd(b + 2 * j);
                    r = _mm256_fmadd_pd(va, vb, r);
                    s = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), s);
                }
                cplx d = reduce_dot(r, s);
                if (kv < kk) d += A[ii * lda + kv] * Bt[c * ldb + kv];
                C[ii * ldc + c] += d;
            }
        }
    }
    for (; i < m; ++i) {
        const double* a = reinterpret_cast<const double*>(A + i * lda);
        for (std::size_t c = 0; c < nc; ++c) {
            const double* b = reinterpret_cast<const double*>(Bt + c * ldb);
            __m256d r = _mm256_setzero_pd(), s = _mm256_setzero_pd();
            for (std::size_t j = 0; j < kv; j += 2) {
                const __m256d va = _mm256_loadu_pd(a + 2 * j);
                const __m256d vb = _mm256_loadu_pd(b + 2 * j);
                r = _mm256_fmadd_pd(va, vb, r);
                s = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), s);
            }
            cplx d = reduce_dot(r, s);
            if (kv < kk) d += A[i * lda + kv] * Bt[c * ldb + kv];
            C[i * ldc + c] += d;
        }
    }
}

double sum_abs2(const cplx* x, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(x);
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v0 = _mm256_loadu_pd(p + 2 * i);
        const __m256d v1 = _mm256_loadu_pd(p + 2 * i + 4);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
        acc1 = _mm256_fmadd_pd(v1, v1, acc1);
    }
    alignas(32) double t[4];
    _mm256_store_pd(t, _mm256_add_pd(acc0, acc1));
    double s = (t[0] + t[1]) + (t[2] + t[3]);
    for (; i < n; ++i) {
        s += std::norm(x[i]);
    }
    return s;
}

double max_abs(const double* x, std::size_t n) {
    const __m256d mask = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        m = _mm256_max_pd(m, _mm256_andnot_pd(mask, _mm256_loadu_pd(x + i)));
    }
    alignas(32) double t[4];
    _mm256_store_pd(t, m);
    double r = t[0];
    for (int k = 1; k < 4; ++k) r = t[k] > r ? t[k] : r;
    for (; i < n; ++i) {
        const double v = std::abs(x[i]);
        r = v > r ? v : r;
    }
    return r;
}

const KernelTable kTable{
    "avx2", cmul, cmul_phase, cexp_weighted, oscillatory_row, cgemm_nt, sum_abs2, max_abs,
};

}  // namespace

const KernelTable& avx2_kernels() { return kTable; }

}  // namespace dispersio::simd
