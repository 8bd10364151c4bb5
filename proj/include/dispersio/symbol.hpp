#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace dispersio {

using cplx = std::complex<double>;
using Mat4c = Eigen::Matrix<cplx, 4, 4>;
using Vec4c = Eigen::Matrix<cplx, 4, 1>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct PhysParams {
    double epsilon = 1.0;
    double delta = 1.0;
    double gamma_bar = 1.0;
    double nu = 1.0;

    // Throws std::invalid_argument unless all three inputs are positive.
    static PhysParams make(double epsilon, double delta, double gamma_bar);
};

struct Frequency {
    double xi1 = 0.0;
    double xi2 = 0.0;
    double xi3 = 0.0;

    double horizontal() const;
    double norm() const;
    Vec3 vec() const { return {xi1, xi2, xi3}; }
};

enum class Branch { minus, plus };

const char* branch_name(Branch b);

struct PhaseSpec {
    Branch branch = Branch::minus;
    double amplitude_a = 1.0;
    double rot_scale = 0.0;  // nu for p(xi), sigma_k for q(xi)

    double sign() const { return branch == Branch::plus ? 1.0 : -1.0; }
};

// A = sqrt(|xi_h|^2 + (xi3 + s)^2), B = sqrt(|xi_h|^2 + (xi3 - s)^2).
struct AB {
    double A;
    double B;
};
AB phase_roots(const Frequency& xi, double s);

Mat4c symbol_matrix(const Frequency& xi, double nu);
inline Mat4c symbol_matrix(const Frequency& xi, const PhysParams& p) { return symbol_matrix(xi, p.nu); }

// Descending: +(A+B)/2, +(A-B)/2, -(A-B)/2, -(A+B)/2.
std::array<double, 4> eigenvalues(const Frequency& xi, double nu);

struct EigenData {
    std::array<double, 4> p;
    Mat4c r;  // column j is r_j

    Mat4c projection(int j) const { return r.col(j) * r.col(j).adjoint(); }
};

// Smallest gap between the closed-form eigenvalues, and the collision test
// used by eigenprojections().
double min_eigen_gap(const Frequency& xi, double nu);
bool is_degenerate(const Frequency& xi, double nu);

// Throws DegenerateFrequency where two eigenvalues collide.
EigenData eigenprojections(const Frequency& xi, double nu);

double phase(const PhaseSpec& spec, const Frequency& xi);
// Throw SingularPoint when A or B < 1e-14.
Vec3 phase_gradient(const PhaseSpec& spec, const Frequency& xi);
Mat3 phase_hessian(const PhaseSpec& spec, const Frequency& xi);

// Closed form of det D^2 of a*(A +/- B) with rotation scale spec.rot_scale.
// Throws DegenerateDenominator when |A -/+ B| < 1e-14.
double hessian_determinant_formula(const PhaseSpec& spec, const Frequency& xi);

}  // namespace dispersio
