#include "dispersio/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace dispersio::simd {
namespace {

void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = a[i] * b[i];
    }
}

void cmul_phase(const cplx* in, const double* phase, double scale, cplx* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = scale * phase[i];
        out[i] = in[i] * cplx(std::cos(t), std::sin(t));
    }
}

void cexp_weighted(const double* phase, const double* w, double scale, cplx* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = scale * phase[i];
        out[i] = cplx(w[i] * std::cos(t), w[i] * std::sin(t));
    }
}

void oscillatory_row(const PhaseRow& row, const double* z, const double* w, cplx* out,
                     std::size_t n) {
    const double r2 = row.rho * row.rho;
    const double scale = row.theta * row.a;
    for (std::size_t j = 0; j < n; ++j) {
        const double zp = z[j] + row.sigma;
        const double zm = z[j] - row.sigma;
        const double q = std::sqrt(r2 + zp * zp) + row.sign * std::sqrt(r2 + zm * zm);
        const double t = scale * q;
        out[j] = cplx(w[j] * std::cos(t), w[j] * std::sin(t));
    }
}

void cgemm_nt(const cplx* A, std::size_t lda, const cplx* Bt, std::size_t ldb, cplx* C,
              std::size_t ldc, std::size_t m, std::size_t nc, std::size_t kk) {
    for (std::size_t i = 0; i < m; ++i) {
        const cplx* a = A + i * lda;
        for (std::size_t c = 0; c < nc; ++c) {
            const cplx* b = Bt + c * ldb;
            cplx acc = 0.0;
            for (std::size_t j = 0; j < kk; ++j) {
                acc += a[j] * b[j];
            }
            C[i * ldc + c] += acc;
        }
    }
}

double sum_abs2(const cplx* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += std::norm(x[i]);
    }
    return s;
}

double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m = std::max(m, std::abs(x[i]));
    }
    return m;
}

const KernelTable kTable{
    "scalar", cmul, cmul_phase, cexp_weighted, oscillatory_row, cgemm_nt, sum_abs2, max_abs,
};

}  // namespace

const KernelTable& scalar_kernels() { return kTable; }

}  // namespace dispersio::simd
