#pragma once

#include "dispersio/symbol.hpp"

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace dispersio {

enum class Regime { high, middle, low };
enum class SubKernel { full, I1, I2 };

const char* regime_name(Regime r);
const char* subkernel_name(SubKernel s);

struct RegimeClass {
    double sigma_k;
    Regime regime;
};

// sigma_k = nu / 2^k; high <=> sigma_k <= 1/60, low <=> sigma_k > 60.
RegimeClass classify_regime(int k, double nu);
Regime classify_sigma(double sigma_k);

// 1 when k >= log2(nu/60), nu^3 / 2^{3k} otherwise.
double decay_scale_Mk(int k, double nu);

// Normalized kernel I(x) = int exp(i theta (x.xi + q(xi))) fat(xi) [psi(xi3)] dxi,
// q = a (A +/- B) with rotation scale sigma_k; the 2^{3k} prefactor is not
// included.
struct KernelSpec {
    PhaseSpec phase;
    double theta = 0.0;
    SubKernel sub = SubKernel::full;

    // theta_k = a 2^k t / delta, sigma_k = nu / 2^k.
    static KernelSpec from_time(double t, int k, const PhysParams& params, Branch branch,
                                double amplitude_a, SubKernel sub = SubKernel::full);
};

struct QuadOptions {
    double nodes_per_oscillation = 6.0;
    std::size_t min_nodes_axis = 24 * 16;
    // Upper bound on rho-nodes times xi3-nodes; exceeding it raises
    // UnresolvedOscillation.
    double max_nodes_total = 1.2e9;
};

// Points in cylindrical form: the kernel depends on x only through
// (|x_h|, x3).
struct CylPoint {
    double r;
    double x3;
};

// Resolution actually used for one evaluation batch.
struct QuadPlan {
    std::size_t n_rho = 0;
    std::size_t n_xi3 = 0;
    double grad_rho = 0.0;  // max |d_rho (x.xi + q)| over support and points
    double grad_xi3 = 0.0;
};

// Node counts demanded by the resolution rule for points spanning
// [0, r_max] x [x3_lo, x3_hi].
QuadPlan plan_quadrature(const KernelSpec& spec, double r_max, double x3_lo, double x3_hi,
                         const QuadOptions& opt = {});

// Values on the tensor grid rs x x3s, row-major over rs. Throws
// UnresolvedOscillation when the rule needs more than opt.max_nodes_total.
std::vector<std::complex<double>> eval_kernel_grid(const KernelSpec& spec, const std::vector<double>& rs,
                                                   const std::vector<double>& x3s,
                                                   const QuadOptions& opt = {}, QuadPlan* used = nullptr);

std::complex<double> eval_kernel(const KernelSpec& spec, const Vec3& x, const QuadOptions& opt = {});

// int fat(xi) [psi(xi3)] dxi, the theta = 0 value at x = 0.
double kernel_mass(SubKernel sub = SubKernel::full);

struct SearchPolicy {
    int lattice = 17;         // xi* lattice per axis for the predictor set
    double dilation = 1.5;    // hull dilation about its centre
    int grid_r = 33;
    int grid_x3 = 33;
    int refine_starts = 3;    // best grid points refined locally
    int refine_levels = 3;    // zoom levels of the 9 x 9 local grids
    // Scan windows around the axis images of the line xi_h = 0, where the
    // Hessian determinant vanishes: half-width and step in units of 1/theta.
    bool axis_scan = true;
    double axis_halfwidth = 6.0;
    double axis_step = 0.25;
    bool include_origin = true;  // add x = 0 when the node budget allows
};

struct SupResult {
    double value = 0.0;
    CylPoint argmax{0.0, 0.0};
    double grid_value = 0.0;  // best value before local refinement
    QuadPlan plan;
    bool origin_included = false;
};

// Predictor set -grad q(xi*) in cylindrical form.
std::vector<CylPoint> stationary_predictors(const KernelSpec& spec, int lattice);

// Distinct values of -d_3 q(0, 0, xi3) over the support: where the line
// xi_h = 0 lands on the x3 axis.
std::vector<double> axis_images(const KernelSpec& spec);

SupResult sup_kernel(const KernelSpec& spec, const SearchPolicy& policy = {},
                     const QuadOptions& opt = {});

struct DecaySample {
    double theta;
    double sup_abs;
};

struct DecayMeasurement {
    std::vector<DecaySample> samples;
    double alpha = 0.0;    // fitted decay exponent, sup ~ theta^{-alpha}
    double fit_r2 = 0.0;
    double window_lo = 0.0;  // fitted theta window
    double window_hi = 0.0;
    Regime regime = Regime::middle;
    double sigma_k = 0.0;
    Branch branch = Branch::minus;
    bool trivial_bound_ok = true;   // every sample <= kernel_mass
    bool envelope_monotone = true;  // dyadic running max non-increasing (10% slack)
};

struct SweepRequest {
    Branch branch = Branch::minus;
    double sigma_k = 1.0;
    double amplitude_a = 1.0;
    SubKernel sub = SubKernel::full;
    double theta_lo = 1.0;
    double theta_hi = 1000.0;
    int n_samples = 13;
};

// Natural theta window: the asymptotic onset scale theta0 and three decades
// above it. Minus: max(1, 1/sigma, sigma^2/10); plus: max(1, sigma) outside
// the high regime, 1 inside it.
SweepRequest default_sweep(Branch branch, double sigma_k, int n_samples = 13);

// Log-spaced sweep; fits log(sup) against log(theta) after dropping the first
// decade. Throws PoorFit when r^2 < 0.95 (the measurement is attached to
// the caller through `out` when non-null).
DecayMeasurement decay_sweep(const SweepRequest& req, const SearchPolicy& policy = {},
                             const QuadOptions& opt = {}, int workers = 1,
                             DecayMeasurement* out = nullptr);

// Decay onset: intersection of the theta = 0 plateau kernel_mass with the
// fitted asymptote C theta^{-alpha}.
double decay_onset_theta(const DecayMeasurement& m);

}  // namespace dispersio
