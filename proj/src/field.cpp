#include "dispersio/field.hpp"

#include "dispersio/simd/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

namespace dispersio {

namespace {

// FFTW's planner is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (N, sign) and never destroyed.
fftw_plan plan_for(int n, int sign) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    const std::size_t total = static_cast<std::size_t>(n) * n * n;
    auto* in = fftw_alloc_complex(total);
    auto* out = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft_3d(n, n, n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (p == nullptr) throw std::runtime_error("FFTW planning failed");
    plans.emplace(key, p);
    return p;
}

void execute(int n, int sign, const cplx* in, cplx* out) {
    fftw_execute_dft(plan_for(n, sign),
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

SpectralField::SpectralField(int n, double length, int ncomp)
    : n_(n), length_(length), ncomp_(ncomp) {
    if (n < 2 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("grid size must be a power of two >= 2");
    }
    if (!(length > 0.0)) throw std::invalid_argument("period scale L must be positive");
    if (ncomp < 1) throw std::invalid_argument("component count must be positive");
    modes_ = static_cast<std::size_t>(n) * n * n;
    data_.assign(modes_ * ncomp, cplx(0.0, 0.0));
}

double SpectralField::spacing() const { return 2.0 * std::numbers::pi * length_ / n_; }

bool SpectralField::same_grid(const SpectralField& o) const {
    return n_ == o.n_ && length_ == o.length_ && ncomp_ == o.ncomp_;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    if (!same_grid(o)) throw std::invalid_argument("field grid mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    if (!same_grid(o)) throw std::invalid_argument("field grid mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

void SpectralField::set_zero() { std::fill(data_.begin(), data_.end(), cplx(0.0, 0.0)); }

double SpectralField::reality_defect() const {
    double worst = 0.0;
    for (int c = 0; c < ncomp_; ++c) {
        const cplx* d = component(c);
        for (int i = 0; i < n_; ++i) {
            const int ni = (n_ - i) % n_;
            for (int j = 0; j < n_; ++j) {
                const int nj = (n_ - j) % n_;
                for (int l = 0; l < n_; ++l) {
                    const int nl = (n_ - l) % n_;
                    worst = std::max(worst, std::abs(d[index(i, j, l)] - std::conj(d[index(ni, nj, nl)])));
                }
            }
        }
    }
    return worst;
}

void SpectralField::enforce_reality() {
    for (int c = 0; c < ncomp_; ++c) {
        cplx* d = component(c);
        for (int i = 0; i < n_; ++i) {
            const int ni = (n_ - i) % n_;
            for (int j = 0; j < n_; ++j) {
                const int nj = (n_ - j) % n_;
                for (int l = 0; l < n_; ++l) {
                    const int nl = (n_ - l) % n_;
                    const std::size_t a = index(i, j, l);
                    const std::size_t b = index(ni, nj, nl);
                    if (b < a) continue;
                    const cplx v = 0.5 * (d[a] + std::conj(d[b]));
                    d[a] = v;
                    d[b] = std::conj(v);
                }
            }
        }
    }
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx s, SpectralField a) { return a *= s; }

std::vector<cplx> to_physical(const SpectralField& f, int c) {
    std::vector<cplx> out(f.modes());
    execute(f.n(), FFTW_BACKWARD, f.component(c), out.data());
    return out;
}

std::vector<cplx> to_physical(const SpectralField& f) {
    std::vector<cplx> out(f.modes() * f.ncomp());
    for (int c = 0; c < f.ncomp(); ++c) {
        execute(f.n(), FFTW_BACKWARD, f.component(c), out.data() + c * f.modes());
    }
    return out;
}

void from_physical(const std::vector<cplx>& grid, SpectralField& f, int c) {
    if (grid.size() != f.modes()) throw std::invalid_argument("grid size mismatch");
    cplx* dst = f.component(c);
    execute(f.n(), FFTW_FORWARD, grid.data(), dst);
    const double inv = 1.0 / static_cast<double>(f.modes());
    for (std::size_t i = 0; i < f.modes(); ++i) dst[i] *= inv;
}

double coeff_l2(const SpectralField& f) {
    return std::sqrt(simd::active().sum_abs2(f.data().data(), f.data().size()));
}

std::vector<double> magnitude(const SpectralField& f) {
    std::vector<double> m2(f.modes(), 0.0);
    for (int c = 0; c < f.ncomp(); ++c) {
        const auto g = to_physical(f, c);
        for (std::size_t i = 0; i < m2.size(); ++i) m2[i] += std::norm(g[i]);
    }
    for (auto& v : m2) v = std::sqrt(v);
    return m2;
}

std::vector<double> gradient_magnitude(const SpectralField& f) {
    const int n = f.n();
    std::vector<double> m2(f.modes(), 0.0);
    std::vector<cplx> spec(f.modes());
    std::vector<cplx> grid(f.modes());
    for (int c = 0; c < f.ncomp(); ++c) {
        const cplx* src = f.component(c);
        for (int axis = 0; axis < 3; ++axis) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    for (int l = 0; l < n; ++l) {
                        const int idx = axis == 0 ? i : (axis == 1 ? j : l);
                        // The Nyquist wave has no real-valued derivative; drop it.
                        const double k = (2 * idx == n) ? 0.0 : f.xi(idx);
                        const std::size_t p = f.index(i, j, l);
                        spec[p] = cplx(0.0, k) * src[p];
                    }
                }
            }
            execute(n, FFTW_BACKWARD, spec.data(), grid.data());
            for (std::size_t p = 0; p < m2.size(); ++p) m2[p] += std::norm(grid[p]);
        }
    }
    for (auto& v : m2) v = std::sqrt(v);
    return m2;
}

double lebesgue_norm_grid(const std::vector<double>& mag, double cell_volume, double r) {
    if (std::isinf(r)) {
        return simd::active().max_abs(mag.data(), mag.size());
    }
    if (!(r >= 1.0)) throw std::invalid_argument("Lebesgue exponent must be >= 1");
    // Scale by the maximum first so large r does not overflow.
    const double top = simd::active().max_abs(mag.data(), mag.size());
    if (top == 0.0) return 0.0;
    double s = 0.0;
    if (r == 2.0) {
        for (double v : mag) s += (v / top) * (v / top);
    } else {
        for (double v : mag) s += std::pow(v / top, r);
    }
    return top * std::pow(cell_volume * s, 1.0 / r);
}

double lebesgue_norm(const SpectralField& f, double r) {
    const double h = f.spacing();
    return lebesgue_norm_grid(magnitude(f), h * h * h, r);
}

SpectralField white_noise(int n, double length, int ncomp, unsigned long long seed, bool real) {
    SpectralField f(n, length, ncomp);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& v : f.data()) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v = cplx(re, im);
    }
    if (real) f.enforce_reality();
    return f;
}

namespace {

template <class T>
void put(std::ofstream& os, T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        std::reverse(b, b + sizeof(T));
        os.write(reinterpret_cast<const char*>(b), sizeof(T));
    } else {
        os.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
}

template <class T>
T get(std::ifstream& is) {
    unsigned char b[sizeof(T)];
    is.read(reinterpret_cast<char*>(b), sizeof(T));
    if (!is) throw std::runtime_error("DSPF: truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

constexpr std::uint32_t kDspfVersion = 1;

}  // namespace

void write_dspf(const std::string& path, const SpectralField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("DSPF: cannot open " + path + " for writing");
    os.write("DSPF", 4);
    put<std::uint32_t>(os, kDspfVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.n()));
    put<double>(os, f.length());
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.ncomp()));
    const int n = f.n();
    for (int c = 0; c < f.ncomp(); ++c) {
        for (int a = -n / 2; a < n / 2; ++a) {
            for (int b = -n / 2; b < n / 2; ++b) {
                for (int d = -n / 2; d < n / 2; ++d) {
                    const cplx v = f.at(c, f.slot(a), f.slot(b), f.slot(d));
                    put<double>(os, v.real());
                    put<double>(os, v.imag());
                }
            }
        }
    }
    if (!os) throw std::runtime_error("DSPF: write failed for " + path);
}

SpectralField read_dspf(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("DSPF: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "DSPF", 4) != 0) throw std::runtime_error("DSPF: bad magic");
    const auto version = get<std::uint32_t>(is);
    if (version != kDspfVersion) throw std::runtime_error("DSPF: unsupported version");
    const auto n = static_cast<int>(get<std::uint32_t>(is));
    const double length = get<double>(is);
    const auto ncomp = static_cast<int>(get<std::uint32_t>(is));
    SpectralField f(n, length, ncomp);
    for (int c = 0; c < ncomp; ++c) {
        for (int a = -n / 2; a < n / 2; ++a) {
            for (int b = -n / 2; b < n / 2; ++b) {
                for (int d = -n / 2; d < n / 2; ++d) {
                    const double re = get<double>(is);
                    const double im = get<double>(is);
                    f.at(c, f.slot(a), f.slot(b), f.slot(d)) = cplx(re, im);
                }
            }
        }
    }
    return f;
}

}  // namespace dispersio
