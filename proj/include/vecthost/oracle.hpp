#ifndef VECTHOST_ORACLE_HPP
#define VECTHOST_ORACLE_HPP

#include "vecthost/age.hpp"
#include "vecthost/grid.hpp"

#include <functional>
#include <vector>

namespace vecthost {

using DiffStep = std::function<ScalarField(const ScalarField&)>;

/// Cohort j after n aging steps, rebuilt along its characteristic instead of
/// by stepping the whole density. Cohorts older than the elapsed time come
/// from the initial data (seed branch); younger ones come from the recorded
/// birth field of step n - j (birth branch). The composition applies the
/// same diffusion callable and survival factors, in the same order, as
/// age_step, so against a stepped run the match is exact, not just close.
///
/// birth_history[m-1] must hold the birth field produced at the end of step
/// m, for every step the requested cohort depends on.
ScalarField represent_i(const DiffStep& diffusion_step, const SurvivalTable& survival,
                        const AgeDensity& seed, const std::vector<ScalarField>& birth_history,
                        int n, int j);

/// The infectious-host integral at step t_steps, rebuilt from the seed branch
/// alone. Only cohorts with age above tau contribute, and while
/// t_steps * da <= tau those are all seed-born, so the birth history (and
/// with it the whole host -> vector feedback) drops out. Errors when called
/// past that window.
ScalarField v_tau_first_interval(const AgeDensity& seed, const DiffStep& diffusion_step,
                                 const SurvivalTable& survival, double tau, int t_steps);

/// Closed-form solution of rho' = beta*rho - m*rho^2 at time t (beta != 0):
/// beta*rho0 / (m*rho0 + (beta - m*rho0) * exp(-beta*t)).
double logistic_exact(double rho0, double beta, double m, double t);

/// Spatially homogeneous shadow of the time stepper: constant coefficients,
/// constant fields, diffusion replaced by the identity. One scalar per
/// unknown, one value per cohort.
struct OdeParams {
    double beta = 0.0, m = 0.0, sigma1 = 0.0, sigma2 = 0.0;
    double u0 = 0.0, phi0 = 0.0, psi0 = 0.0;
    std::vector<double> seed;     // initial cohort values, oldest last
    std::vector<double> survival; // per-cohort survival factors
    int tau_index = 0;
};

struct OdeSample {
    double t = 0.0;
    double rho = 0.0, phi = 0.0, psi = 0.0, u = 0.0;
    double v = 0.0, v_tau = 0.0; // pointwise age integrals
};

/// March the shadow system nsteps times with step dt. The returned
/// trajectory has nsteps + 1 rows, row 0 being the initial values. The
/// arithmetic mirrors Dynamics::step line for line; on a flat scenario with
/// zero diffusivity the grid run reproduces it to round-off.
std::vector<OdeSample> ode_reduction(const OdeParams& p, double dt, int nsteps);

} // namespace vecthost

#endif
