#pragma once

#include <complex>
#include <cstddef>
#include <string>

namespace dispersio::simd {

using cplx = std::complex<double>;

// Parameters of one row of the reduced oscillatory integrand:
//   out[j] = w[j] * exp(i*theta*a*(A_j +/- B_j))
// with A_j = sqrt(rho^2 + (z_j + sigma)^2), B_j = sqrt(rho^2 + (z_j - sigma)^2).
struct PhaseRow {
    double rho = 0.0;
    double sigma = 0.0;
    double a = 1.0;
    double sign = -1.0;  // -1: A-B, +1: A+B
    double theta = 0.0;
};

struct KernelTable {
    const char* name;

    // out = a * b (pointwise complex)
    void (*cmul)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
    // out = in * exp(i*scale*phase)
    void (*cmul_phase)(const cplx* in, const double* phase, double scale, cplx* out, std::size_t n);
    // out = w * exp(i*scale*phase)
    void (*cexp_weighted)(const double* phase, const double* w, double scale, cplx* out, std::size_t n);
    void (*oscillatory_row)(const PhaseRow& row, const double* z, const double* w, cplx* out,
                            std::size_t n);
    // C[i*ldc + c] += sum_j A[i*lda + j] * Bt[c*ldb + j], i < m, c < nc, j < kk
    void (*cgemm_nt)(const cplx* A, std::size_t lda, const cplx* Bt, std::size_t ldb, cplx* C,
                     std::size_t ldc, std::size_t m, std::size_t nc, std::size_t kk);
    double (*sum_abs2)(const cplx* x, std::size_t n);
    double (*max_abs)(const double* x, std::size_t n);
};

const KernelTable& scalar_kernels();
#if defined(DISPERSIO_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

// Best table for this CPU. DISPERSIO_SIMD=scalar forces the reference path.
const KernelTable& active();

// Pin the table used by active(); "scalar", "avx2" or "auto".
// Returns false if the request cannot be honoured on this CPU.
bool select(const std::string& which);

bool cpu_has_avx2();

}  // namespace dispersio::simd
