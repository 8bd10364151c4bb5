#include "doctest.h"

#include "dispersio/field.hpp"
#include "dispersio/lp.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>

using namespace dispersio;

TEST_CASE("wave/slot maps") {
    SpectralField f(8, 2.0, 1);
    CHECK(f.wave(3) == 3);
    CHECK(f.wave(4) == -4);
    CHECK(f.wave(7) == -1);
    for (int m = -4; m < 4; ++m) CHECK(f.wave(f.slot(m)) == m);
    CHECK(f.xi(1) == 0.5);
    CHECK(f.spacing() == doctest::Approx(2.0 * std::numbers::pi * 2.0 / 8));
}

TEST_CASE("physical round trip and Plancherel") {
    const SpectralField f = white_noise(16, 1.3, 4, 77, true);
    CHECK(f.reality_defect() < 1e-12);
    SpectralField g(16, 1.3, 4);
    for (int c = 0; c < 4; ++c) from_physical(to_physical(f, c), g, c);
    double e = 0.0;
    for (std::size_t p = 0; p < f.data().size(); ++p) e = std::max(e, std::abs(f.data()[p] - g.data()[p]));
    CHECK(e < 1e-14);
    const auto grid = to_physical(f);
    double s = 0.0;
    for (const cplx& v : grid) s += std::norm(v);
    CHECK(std::sqrt(s / (16.0 * 16 * 16)) == doctest::Approx(coeff_l2(f)).epsilon(1e-13));
    for (const cplx& v : grid) CHECK(std::abs(v.imag()) < 1e-12);
}

TEST_CASE("white noise is deterministic in the seed") {
    const SpectralField a = white_noise(8, 1.0, 2, 5);
    const SpectralField b = white_noise(8, 1.0, 2, 5);
    const SpectralField c = white_noise(8, 1.0, 2, 6);
    CHECK(a.data() == b.data());
    CHECK(a.data() != c.data());
}

TEST_CASE("single mode samples and Lebesgue norms") {
    SpectralField f(8, 1.0, 1);
    f.at(0, 1, 0, 0) = 0.5;
    f.at(0, 7, 0, 0) = 0.5;  // cos(x1)
    const auto g = to_physical(f, 0);
    const double h = f.spacing();
    for (int i = 0; i < 8; ++i) CHECK(g[f.index(i, 3, 5)].real() == doctest::Approx(std::cos(i * h)));
    CHECK(lebesgue_norm(f, kInf) == doctest::Approx(1.0));
    // ||cos||_2 over the box (2 pi)^3 is sqrt((2pi)^3 / 2).
    CHECK(lebesgue_norm(f, 2.0) == doctest::Approx(std::sqrt(std::pow(2 * std::numbers::pi, 3) / 2)));
    const auto gm = gradient_magnitude(f);
    double mx = 0.0;
    for (double v : gm) mx = std::max(mx, v);
    CHECK(mx == doctest::Approx(std::sin(2 * h)).epsilon(1e-12));  // grid max of |sin|
}

TEST_CASE("reality enforcement") {
    SpectralField f = white_noise(8, 1.0, 1, 3, false);
    CHECK(f.reality_defect() > 1e-3);
    f.enforce_reality();
    CHECK(f.reality_defect() < 1e-15);
}

TEST_CASE("DSPF round trip and layout") {
    SpectralField f = white_noise(8, 0.75, 4, 12, false);
    const std::string path = "test_field_roundtrip.dspf";
    write_dspf(path, f);
    const SpectralField g = read_dspf(path);
    CHECK(g.n() == 8);
    CHECK(g.length() == 0.75);
    CHECK(g.ncomp() == 4);
    CHECK(g.data() == f.data());

    std::ifstream is(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(is)), {});
    CHECK(bytes.size() == 4 + 4 + 4 + 8 + 4 + 4 * 512 * 16);
    CHECK(std::memcmp(bytes.data(), "DSPF", 4) == 0);
    // First coefficient is wave vector (-4,-4,-4) of component 0.
    double re;
    std::memcpy(&re, bytes.data() + 24, 8);
    CHECK(re == f.at(0, 4, 4, 4).real());
    std::remove(path.c_str());
    CHECK_THROWS(read_dspf("does_not_exist.dspf"));
}
