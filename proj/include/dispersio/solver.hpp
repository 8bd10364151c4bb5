#pragma once

#include "dispersio/error.hpp"
#include "dispersio/field.hpp"
#include "dispersio/propagator.hpp"
#include "dispersio/symbol.hpp"

#include <memory>
#include <string>
#include <vector>

namespace dispersio {

struct SimConfig {
    PhysParams params;
    int n = 32;
    double length = 1.0;
    double dt = 1e-2;
    double t_max = 1.0;
    double m = 3.0;          // Sobolev index of the tracked norm
    double doubling = 2.0;   // stop when ||U||_{H^m} > doubling * ||U0||_{H^m}
    int sample_every = 1;    // steps between recorded samples
    bool nonlinear = true;
    bool check_cfl = true;

    // Throws std::invalid_argument on dt <= 0, N not a power of two, m < 3
    // (m < 3 is accepted when allow_low_m is set, for diagnostics).
    void validate(bool allow_low_m = false) const;
};

struct TrajectoryRecord {
    std::vector<double> t;
    std::vector<double> h_m;
    std::vector<double> linf;
    std::vector<double> grad_linf;
    double t_doubling = 0.0;
    bool doubled = false;
    double h_m_initial = 0.0;
};

class BlowupDetected : public Error {
public:
    BlowupDetected(const std::string& what, TrajectoryRecord record)
        : Error(what), record_(std::move(record)) {}
    const TrajectoryRecord& record() const { return record_; }

private:
    TrajectoryRecord record_;
};

// Keep |m_i| < N/3 on every axis.
void dealias(SpectralField& f);
bool in_dealiased_band(const SpectralField& f, int i, int j, int l);

// N(U,U) = (u.grad b + gamma_bar b div u ; u.grad u + gamma_bar b grad b),
// products on the physical grid, 2/3-rule truncation of the result.
SpectralField nonlinearity(const SpectralField& u, double gamma_bar);

// sqrt(sum (1 + |xi|^2)^m |U_hat|^2) over all components.
double sobolev_norm(const SpectralField& u, double m);

// Fourth-order Lawson integrator: exp(-(gamma_bar h/delta) L) exactly, the
// nonlinearity by classical RK4 stages in the rotating frame.
class LawsonStepper {
public:
    explicit LawsonStepper(const SimConfig& cfg);

    const SimConfig& config() const { return cfg_; }
    const PropagatorPlan& plan() const { return *plan_; }

    // One step of size cfg.dt. Throws CflViolation when the precondition
    // dt ||u||_inf N / L <= 0.5 fails (if enabled).
    SpectralField step(const SpectralField& u) const;

    double cfl_number(const SpectralField& u) const;

private:
    SpectralField rhs(const SpectralField& u) const;

    SimConfig cfg_;
    std::shared_ptr<PropagatorPlan> plan_;
    PropagatorPlan::StepTable half_;
    PropagatorPlan::StepTable full_;
};

// Convenience wrapper building a stepper for a single step.
SpectralField step(const SpectralField& u, double dt, const SimConfig& cfg);

// Integrates until the H^m norm exceeds doubling x initial or t_max.
// Throws BlowupDetected (with the record so far) on NaN/inf or H^m growth
// beyond 1e6 x initial.
TrajectoryRecord run_lifespan(const SimConfig& cfg, const SpectralField& u0);

// ||series||_{L^q(0, T)} by the trapezoid rule on the record times, with
// series = linf (l = 0) or grad_linf (l = 1), T = t_doubling.
double dispersion_report(const TrajectoryRecord& rec, double q, int l);

// Pointwise maxima used by the record.
double linf_norm(const SpectralField& u);
double grad_linf_norm(const SpectralField& u);

// Named smooth initial conditions on the grid of cfg:
//   "bump"     b = amp exp(-|x - c|^2 / (2 w^2)) with its x3-average removed,
//   "acoustic" b = amp cos(x1/L), u = 0,
//   "shell"    b with b_hat = amp phi_k, k from `param`.
SpectralField initial_condition(const std::string& name, const SimConfig& cfg, double amplitude,
                                double param = 0.0);

}  // namespace dispersio
