#include "dispersio/symbol.hpp"

#include "dispersio/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dispersio {

namespace {
constexpr double kSingular = 1e-14;
constexpr double kDegenerateGap = 1e-12;
const cplx I1(0.0, 1.0);
}  // namespace

PhysParams PhysParams::make(double epsilon, double delta, double gamma_bar) {
    if (!(epsilon > 0.0) || !(delta > 0.0) || !(gamma_bar > 0.0)) {
        throw std::invalid_argument("epsilon, delta and gamma_bar must be positive");
    }
    return {epsilon, delta, gamma_bar, delta / (gamma_bar * epsilon)};
}

double Frequency::horizontal() const { return std::hypot(xi1, xi2); }

double Frequency::norm() const { return std::sqrt(xi1 * xi1 + xi2 * xi2 + xi3 * xi3); }

const char* branch_name(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

AB phase_roots(const Frequency& xi, double s) {
    const double h2 = xi.xi1 * xi.xi1 + xi.xi2 * xi.xi2;
    const double zp = xi.xi3 + s;
    const double zm = xi.xi3 - s;
    return {std::sqrt(h2 + zp * zp), std::sqrt(h2 + zm * zm)};
}

Mat4c symbol_matrix(const Frequency& xi, double nu) {
    Mat4c L = Mat4c::Zero();
    L(0, 1) = L(1, 0) = I1 * xi.xi1;
    L(0, 2) = L(2, 0) = I1 * xi.xi2;
    L(0, 3) = L(3, 0) = I1 * xi.xi3;
    L(1, 2) = -nu;
    L(2, 1) = nu;
    return L;
}

std::array<double, 4> eigenvalues(const Frequency& xi, double nu) {
    const AB ab = phase_roots(xi, nu);
    const double s = 0.5 * (ab.A + ab.B);
    const double d = 0.5 * std::abs(ab.A - ab.B);
    return {s, d, -d, -s};
}

double min_eigen_gap(const Frequency& xi, double nu) {
    const auto p = eigenvalues(xi, nu);
    return std::min({p[0] - p[1], p[1] - p[2], p[2] - p[3]});
}

bool is_degenerate(const Frequency& xi, double nu) {
    return min_eigen_gap(xi, nu) < kDegenerateGap * (xi.norm() + nu);
}

EigenData eigenprojections(const Frequency& xi, double nu) {
    if (is_degenerate(xi, nu)) {
        throw DegenerateFrequency("eigenvalue collision at this frequency");
    }
    // L = i*H with H Hermitian; the eigenvalues of H are the p_j.
    const Mat4c H = -I1 * symbol_matrix(xi, nu);
    Eigen::SelfAdjointEigenSolver<Mat4c> es(H);
    EigenData out;
    out.p = eigenvalues(xi, nu);
    for (int j = 0; j < 4; ++j) {
        Vec4c v = es.eigenvectors().col(3 - j);  // solver sorts ascending
        // Fix the free phase: largest-magnitude component real and positive.
        int imax = 0;
        for (int c = 1; c < 4; ++c) {
            if (std::abs(v(c)) > std::abs(v(imax)) * (1.0 + 1e-12)) imax = c;
        }
        v *= std::conj(v(imax)) / std::abs(v(imax));
        out.r.col(j) = v.normalized();
    }
    return out;
}

double phase(const PhaseSpec& spec, const Frequency& xi) {
    const AB ab = phase_roots(xi, spec.rot_scale);
    return spec.amplitude_a * (ab.A + spec.sign() * ab.B);
}

namespace {
AB checked_roots(const PhaseSpec& spec, const Frequency& xi) {
    const AB ab = phase_roots(xi, spec.rot_scale);
    if (ab.A < kSingular || ab.B < kSingular) {
        throw SingularPoint("phase not differentiable: A or B vanishes");
    }
    return ab;
}
}  // namespace

Vec3 phase_gradient(const PhaseSpec& spec, const Frequency& xi) {
    const AB ab = checked_roots(spec, xi);
    const double s = spec.sign();
    const double a = spec.amplitude_a;
    const double sig = spec.rot_scale;
    const double c1 = 1.0 / ab.A + s / ab.B;
    return {a * c1 * xi.xi1, a * c1 * xi.xi2,
            a * ((xi.xi3 + sig) / ab.A + s * (xi.xi3 - sig) / ab.B)};
}

Mat3 phase_hessian(const PhaseSpec& spec, const Frequency& xi) {
    const AB ab = checked_roots(spec, xi);
    const double s = spec.sign();
    const double sig = spec.rot_scale;
    const double A3 = ab.A * ab.A * ab.A;
    const double B3 = ab.B * ab.B * ab.B;
    const double c1 = 1.0 / ab.A + s / ab.B;
    const double c3 = 1.0 / A3 + s / B3;
    const double zp = xi.xi3 + sig;
    const double zm = xi.xi3 - sig;
    const double m3 = zp / A3 + s * zm / B3;

    Mat3 h;
    h(0, 0) = c1 - c3 * xi.xi1 * xi.xi1;
    h(1, 1) = c1 - c3 * xi.xi2 * xi.xi2;
    h(0, 1) = h(1, 0) = -c3 * xi.xi1 * xi.xi2;
    h(2, 2) = c1 - (zp * zp / A3 + s * zm * zm / B3);
    h(0, 2) = h(2, 0) = -m3 * xi.xi1;
    h(1, 2) = h(2, 1) = -m3 * xi.xi2;
    return spec.amplitude_a * h;
}

double hessian_determinant_formula(const PhaseSpec& spec, const Frequency& xi) {
    const AB ab = phase_roots(xi, spec.rot_scale);
    const double denom_tail = ab.A - spec.sign() * ab.B;
    if (std::abs(denom_tail) < kSingular) {
        throw DegenerateDenominator("A -/+ B vanishes in the determinant formula");
    }
    const double nu = spec.rot_scale;
    const double a = spec.amplitude_a;
    const double h2 = xi.xi1 * xi.xi1 + xi.xi2 * xi.xi2;
    const double A2 = ab.A * ab.A;
    const double B2 = ab.B * ab.B;
    return 16.0 * nu * nu * nu * xi.xi3 * h2 * a * a * a / (A2 * A2 * B2 * B2 * denom_tail);
}

}  // namespace dispersio
