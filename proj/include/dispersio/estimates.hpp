#pragma once

#include "dispersio/field.hpp"
#include "dispersio/symbol.hpp"

#include <optional>
#include <vector>

namespace dispersio {

enum class ExponentClass { sharp, nonsharp, inadmissible, excluded_endpoint };

const char* exponent_class_name(ExponentClass c);

struct ExponentTriple {
    double q;
    double r;
    double sigma;
    ExponentClass cls;
    bool is_endpoint;  // (q, r) == (2, 2 sigma/(sigma - 1)) for sigma > 1
};

// Admissibility 2/q <= sigma (1 - 2/r) with q, r in [2, inf]; (2, inf, 1)
// is excluded. Equality is tested to 1e-12 relative.
ExponentTriple classify_exponents(double q, double r, double sigma);

// Options shared by the Strichartz measurements.
struct StrichartzOptions {
    Branch branch = Branch::minus;
    // Phase amplitude a of p = a (A +/- B); the eigenvalue phases of the
    // system have |a| = gamma_bar / 2, which is the default when <= 0.
    double amplitude_a = 0.0;
    double t_horizon = 0.0;  // <= 0: automatic
    int n_t = 400;
};

struct StrichartzMeasurement {
    int k = 0;
    double nu = 0.0;
    double eps = 0.0;
    double q = 0.0;
    double r = 0.0;
    std::optional<double> qtilde;
    std::optional<double> rtilde;
    double measured = 0.0;
    double predicted_shape = 0.0;
    std::optional<double> ratio;   // measured / (shape * source norm) for Duhamel
    double horizon = 0.0;
    double tail_estimate = 0.0;  // predicted fraction of the q-th power beyond the horizon
    std::optional<double> source_norm;
};

// Box scale L for which shell k just fits an N-point grid:
// (N/2 - 1)/L = (8/3) 2^k.
double shell_box_length(int k, int n);

// Real, radial f with f_hat = phi_k on the grid, ||f||_{L^2} = 1.
SpectralField shell_data(int k, int n, double length);

// Time grid t_i = tau ((1 + T/tau)^{i/(n-1)} - 1): resolves the early
// oscillation scale tau and stretches geometrically to T.
std::vector<double> strichartz_time_grid(double horizon, double tau, int n);

// Horizon at which the envelope (1 + t/(eps M_k))^{-beta}, beta = (q/2)(1 - 2/r),
// leaves less than 1% of its integral beyond; requires beta > 1.
double auto_horizon(double eps_mk, double q, double r);

// ||Lambda_k(t) f||_{L^q_t L^r_x} over [0, T] by the trapezoid rule.
// Throws HorizonTooShort when the last integrand sample exceeds 1% of the
// peak, std::invalid_argument for exponents outside the sigma = 1/2 range.
StrichartzMeasurement measure_strichartz(int k, const PhysParams& params, const SpectralField& f,
                                         double q, double r, const StrichartzOptions& opt = {});

// Source for the retarded Strichartz norm: a discrete measure in time,
// F = sum_m w_m delta(s - s_m) F_m. Sampled sources use trapezoid weights.
struct SampledSource {
    std::vector<double> times;
    std::vector<double> weights;
    std::vector<SpectralField> fields;
    bool impulse = false;

    // Trapezoid weights on a uniform grid; throws NonUniformGrid.
    static SampledSource trapezoid(std::vector<double> times, std::vector<SpectralField> fields);
    static SampledSource impulse_at(double s0, double weight, SpectralField field);
};

// ||int_{s<t} Lambda_k(t - s) F(s) ds||_{L^q_t L^r_x}. For sampled sources
// the ratio divides by ||F||_{L^{q~'}_t L^{r~'}_x}; impulses report no ratio.
StrichartzMeasurement measure_duhamel_strichartz(int k, const PhysParams& params,
                                                 const SampledSource& source, double q, double r,
                                                 double qtilde, double rtilde,
                                                 const StrichartzOptions& opt = {});

struct ChainBound {
    double lhs = 0.0;
    double rhs = 0.0;
    double horizon = 0.0;
};

// lhs = ||grad^l exp(i t p(D)/delta) f||_{L^q_t L^inf_x}, rhs = eps^{1/q} ||f||_{H^{2+l}}
// (continuum-surrogate norms on the grid).
ChainBound besov_chain_bound(const SpectralField& f, const PhysParams& params, double q, int l,
                             const StrichartzOptions& opt = {});

// Continuum-surrogate Sobolev norm sqrt((2 pi L)^3 sum (1+|xi|^2)^s |c|^2).
double sobolev_norm_physical(const SpectralField& f, double s);

}  // namespace dispersio
