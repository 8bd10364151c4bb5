#pragma once

#include "dispersio/field.hpp"
#include "dispersio/symbol.hpp"

#include <array>
#include <vector>

namespace dispersio {

// Each coefficient times exp(i (t/delta) p(xi)).
SpectralField evolve_scalar(const SpectralField& f, double t, const PhaseSpec& spec, double delta);

// exp(i (t/delta) p(xi)) * fat_k(xi)^(squared ? 2 : 1).
SpectralField lambda_k(const SpectralField& f, double t, int k, const PhaseSpec& spec, double delta,
                       bool squared);

// Per-mode data for U_t + (gamma_bar/delta) L U = 0 on a fixed grid.
class PropagatorPlan {
public:
    PropagatorPlan(const PhysParams& params, int n, double length);

    const PhysParams& params() const { return params_; }
    int n() const { return n_; }
    double length() const { return length_; }

    // exp(-(gamma_bar t/delta) Lhat(xi)) at FFT index (i, j, l).
    Mat4c mode_matrix(int i, int j, int l, double t) const;
    bool mode_degenerate(int i, int j, int l) const { return degenerate_[idx(i, j, l)] != 0; }
    std::size_t degenerate_count() const;

    // sum_j exp(-i gamma_bar t p_j/delta) Pi_j U per mode; degenerate modes use
    // the 4x4 matrix exponential.
    SpectralField evolve(const SpectralField& u, double t) const;

    // Tabulated mode matrices for a fixed step: E(t) applied mode by mode.
    struct StepTable {
        double t = 0.0;
        std::vector<Mat4c> e;
    };
    StepTable tabulate(double t) const;
    static void apply(const StepTable& table, const SpectralField& in, SpectralField& out);

private:
    std::size_t idx(int i, int j, int l) const {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + l;
    }

    PhysParams params_;
    int n_;
    double length_;
    std::vector<std::array<double, 4>> p_;
    std::vector<Mat4c> r_;
    std::vector<unsigned char> degenerate_;
};

SpectralField evolve_system(const SpectralField& u, double t, const PhysParams& params);

// int_0^T exp(i((T-s)/delta) p(D)) F(s) ds by composite Simpson on a uniform
// grid (3/8 rule on the last three intervals when the count is odd).
// Throws NonUniformGrid.
SpectralField duhamel_scalar(const std::vector<SpectralField>& source, const std::vector<double>& t_grid,
                             const PhaseSpec& spec, double delta);

// int_0^T E(T-s) F(s) ds with E the system propagator; pass F = -N(U,U)
// to obtain the Duhamel term of the nonlinear problem.
SpectralField duhamel(const std::vector<SpectralField>& source, const std::vector<double>& t_grid,
                      const PropagatorPlan& plan);

// Simpson weights used by both Duhamel routines. Throws NonUniformGrid.
std::vector<double> simpson_weights(const std::vector<double>& t_grid);

}  // namespace dispersio
