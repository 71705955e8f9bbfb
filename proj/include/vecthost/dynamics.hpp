#ifndef VECTHOST_DYNAMICS_HPP
#define VECTHOST_DYNAMICS_HPP

#include "vecthost/age.hpp"
#include "vecthost/coeffs.hpp"
#include "vecthost/diagnostics.hpp"
#include "vecthost/diffusion.hpp"
#include "vecthost/grid.hpp"

#include <functional>
#include <memory>

namespace vecthost {

struct Tolerances {
    double cg_tol = 1e-10;        // linear-solve relative residual
    double invariant_tol = 1e-8;  // allowed relative drift of phi+psi vs rho
    double steady_tol = 1e-8;     // steady-state solve tolerance
};

/// Everything a run needs, built once from a config. The grid lives behind a
/// shared_ptr so the coefficient and state fields, which point at it, stay
/// valid when a Scenario is moved around.
struct Scenario {
    std::shared_ptr<const Grid> grid;
    CoefficientSet coeffs;
    InitialData init;
    Expression z0; // seed age profile
    SurvivalTable survival;
    int cohorts = 0;
    double a_max = 0.0;
    double tau = 0.0;  // snapped to a multiple of dt
    int tau_index = 0; // tau / dt
    double dt = 0.0;
    double t_end = 0.0;
    int output_every = 1;
    Tolerances tol;
    bool strict = true; // refuse to run when an assumption fails
};

struct SimState {
    double t = 0.0;
    long step_index = 0;
    ScalarField phi, psi, rho_check; // star cells
    ScalarField u;                   // all cells
    AgeDensity i;
    ScalarField v, v_tau;            // all cells, refreshed after each step

    SimState(const Grid& g, int cohorts, double da);
};

struct StepReport {
    int clamp_count = 0;
    int cg_iterations = 0;      // total over all solves this step
    double u_sink = 0.0;        // host mass removed by new infections
    double birth_deposit = 0.0; // mass placed into the youngest cohort
    double removal = 0.0;       // recovery removal from aging cohorts
    double truncation = 0.0;    // mass dropped off the oldest cohort
    double mass_residual = 0.0; // ledger residual, expected ~ solver noise
    double phi_psi_rho_gap = 0.0; // max |phi+psi-rho| relative to sup rho
    double min_phi = 0.0, min_psi = 0.0, min_u = 0.0;
};

struct RunResult {
    DiagnosticsSeries series;
    std::unique_ptr<SimState> final_state;
    std::unique_ptr<ScalarField> rho_star;
    double rho_star_residual = 0.0;
    double max_phi_psi_rho_gap = 0.0;
    double max_abs_mass_residual = 0.0;
    bool any_clamp = false;
};

/// The time stepper. Operator splitting per step, in this order: vector
/// transfer + logistic update (explicit reaction, implicit death divisor,
/// implicit diffusion), host infection sink, host diffusion, birth deposit,
/// cohort aging, age integrals.
class Dynamics {
public:
    explicit Dynamics(const Scenario& sc);

    SimState initial_state() const;
    StepReport step(SimState& s);

    /// The exact host-field diffusion step the cohorts go through; the
    /// characteristic representation composes this same callable.
    const std::function<ScalarField(const ScalarField&)>& host_diffusion_step() const {
        return host_step_;
    }

    const ScalarField& last_birth() const { return last_birth_; }
    const Scenario& scenario() const { return *sc_; }

private:
    const Scenario* sc_;
    DiffusionOperator L1_; // vector habitat, d1
    DiffusionOperator L2_; // full domain, d2
    std::function<ScalarField(const ScalarField&)> host_step_;
    ScalarField last_birth_;
    mutable int cg_iters_accum_ = 0;

    ScalarField vector_solve(const ScalarField& w);
    void refresh_age_integrals(SimState& s) const;
};

/// Full run: validate, solve the vector steady state, march to t_end,
/// recording diagnostics at t = 0, every output_every steps, and at the end.
RunResult run(const Scenario& sc);

} // namespace vecthost

#endif
