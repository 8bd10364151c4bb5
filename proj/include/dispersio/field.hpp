#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace dispersio {

using cplx = std::complex<double>;

// Fourier coefficients of an ncomp-component field on the periodic box
// [0, 2*pi*L)^3 sampled by N^3 points:
//   f(x) = sum_m c_m exp(i m.x / L),  m in [-N/2, N/2)^3.
// Storage is component-major; within a component the index is
// (i*N + j)*N + l in FFT order (index i holds wave number i for i < N/2,
// i - N otherwise).
class SpectralField {
public:
    SpectralField() = default;
    SpectralField(int n, double length, int ncomp = 4);

    int n() const { return n_; }
    double length() const { return length_; }
    int ncomp() const { return ncomp_; }
    std::size_t modes() const { return modes_; }

    cplx* component(int c) { return data_.data() + static_cast<std::size_t>(c) * modes_; }
    const cplx* component(int c) const { return data_.data() + static_cast<std::size_t>(c) * modes_; }
    std::vector<cplx>& data() { return data_; }
    const std::vector<cplx>& data() const { return data_; }

    cplx& at(int c, int i, int j, int l) { return component(c)[index(i, j, l)]; }
    const cplx& at(int c, int i, int j, int l) const { return component(c)[index(i, j, l)]; }
    std::size_t index(int i, int j, int l) const {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + l;
    }

    // Integer wave number stored at FFT index i, and the inverse map.
    int wave(int i) const { return i < n_ / 2 ? i : i - n_; }
    int slot(int m) const { return m >= 0 ? m : m + n_; }
    // Physical wave-vector component m / L.
    double xi(int i) const { return wave(i) / length_; }

    // Grid spacing 2*pi*L/N.
    double spacing() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(cplx s);
    void set_zero();
    bool same_grid(const SpectralField& o) const;

    // max |c_m - conj(c_{-m})| over all components (0 for real fields).
    double reality_defect() const;
    // Replace c by (c_m + conj(c_{-m}))/2.
    void enforce_reality();

private:
    int n_ = 0;
    double length_ = 1.0;
    int ncomp_ = 0;
    std::size_t modes_ = 0;
    std::vector<cplx> data_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx s, SpectralField a);

// Physical-grid samples of one component (length N^3, same index layout).
std::vector<cplx> to_physical(const SpectralField& f, int c);
// All components, component-major.
std::vector<cplx> to_physical(const SpectralField& f);
void from_physical(const std::vector<cplx>& grid, SpectralField& f, int c);

// sqrt(sum |c_m|^2) over all components; equals the RMS of the grid values.
double coeff_l2(const SpectralField& f);

// Continuum-surrogate Lebesgue norms on the physical grid with cell volume
// (2*pi*L/N)^3. Vector fields use the pointwise Euclidean magnitude across
// the selected components; r = infinity is the grid maximum.
double lebesgue_norm(const SpectralField& f, double r);
double lebesgue_norm_grid(const std::vector<double>& magnitude, double cell_volume, double r);
// Pointwise |f(x)| across components.
std::vector<double> magnitude(const SpectralField& f);
// Pointwise Frobenius norm of the gradient (ncomp x 3) on the grid.
std::vector<double> gradient_magnitude(const SpectralField& f);

// Band-limited white noise: uniform phases, Gaussian amplitudes, real-valued
// when `real` is set. Deterministic in the seed.
SpectralField white_noise(int n, double length, int ncomp, unsigned long long seed, bool real = true);

// Binary snapshot. Header "DSPF", u32 version, u32 N, f64 L, u32 ncomp;
// then little-endian f64 (re, im) pairs, component-major, wave vectors in
// row-major order with each axis ascending from -N/2 to N/2-1.
void write_dspf(const std::string& path, const SpectralField& f);
SpectralField read_dspf(const std::string& path);

}  // namespace dispersio
