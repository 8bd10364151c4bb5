#pragma once

#include "dispersio/field.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace dispersio {

// C-infinity step: 0 for x <= 0, 1 for x >= 1, built from exp(-1/x).
double smooth_step(double x);

// Radial profile of the dyadic block, supported in [3/4, 8/3].
// phi(r) = chi(r/2) - chi(r), chi = 1 on [0, 3/4], 0 on [4/3, inf).
double lp_chi(double r);
double lp_phi(double r);

// Fat cutoff: 0 outside [1/2, 3], exactly 1 on [3/4, 8/3].
double fat_cutoff(double r);

// xi3-splitting cutoffs: psi1 = 1 for |xi3| <= 1/29, 0 for |xi3| >= 1/28.
double split_psi1(double xi3);
inline double split_psi2(double xi3) { return 1.0 - split_psi1(xi3); }

struct DyadicPartition {
    int k_min = 0;
    int k_max = 0;

    // phi_k(xi) = phi(2^{-k}|xi|); zero outside [k_min, k_max].
    double weight(int k, double abs_xi) const;
    double sum(double abs_xi) const;
    // Shells whose support meets |xi|.
    std::pair<int, int> shells_at(double abs_xi) const;
};

DyadicPartition build_partition(int k_min, int k_max);

// Fourier multipliers on the grid.
SpectralField apply_shell(const SpectralField& f, int k, const DyadicPartition& part);
SpectralField apply_fat_cutoff(const SpectralField& f, int k, int power = 1);

// Shells of the partition that carry energy on this grid.
std::pair<int, int> grid_shell_range(const SpectralField& f, const DyadicPartition& part);

constexpr double kInf = std::numeric_limits<double>::infinity();

// (sum_k (2^{mk} ||Delta_k f||_{L^r})^s)^{1/s}; s = infinity takes the max.
double besov_norm(const SpectralField& f, double m, double r, double s, const DyadicPartition& part);

struct Snapshot {
    double t;
    SpectralField field;
};

// Chemin-Lerner norm (sum_k (2^{mk} ||Delta_k f||_{L^q_t L^r_x})^s)^{1/s},
// time integral by the trapezoid rule on the snapshot times.
double spacetime_besov_norm(const std::vector<Snapshot>& snaps, double q, double m, double r,
                            double s, const DyadicPartition& part);
// ||  ||f(t)||_{B^m_{r,s}}  ||_{L^q_t}, same time rule.
double lq_of_besov_norm(const std::vector<Snapshot>& snaps, double q, double m, double r, double s,
                        const DyadicPartition& part);

// L^q norm in time of samples g(t_i), trapezoid rule; q = infinity is the max.
double time_lq(const std::vector<double>& t, const std::vector<double>& g, double q);

struct CutoffConstants {
    double c1;   // ||F^{-1}(fat_k^2)||_{L^1}
    double c2;   // ||F^{-1}(fat_k)||_{L^1}
    double c4r;  // ||F^{-1}(fat_k)||_{L^p}, 1/p = 1/2 + 1/r
};

// Continuum constants on R^3 (F^{-1} carries the 1/(2pi)^3), by radial
// Hankel quadrature performed at the physical scale 2^k.
CutoffConstants cutoff_constants(int k, double r);

// ||F^{-1}(psi)||_{L^p(R^3)} for psi(xi) = profile(2^{-k}|xi|)^power, p >= 1.
double inverse_fourier_lp(int k, int power, double p);

}  // namespace dispersio
