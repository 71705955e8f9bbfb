#include "vecthost/oracle.hpp"

#include <cmath>
#include <sstream>

namespace vecthost {

namespace {

// One aging hop: diffuse, then scale by the survival factor, exactly as
// age_step writes slot r+1 from slot r.
ScalarField age_hop(const DiffStep& diffusion_step, double s, const ScalarField& w) {
    ScalarField moved = diffusion_step(w);
    for (int cell = 0; cell < moved.size(); ++cell) moved[cell] *= s;
    return moved;
}

} // namespace

ScalarField represent_i(const DiffStep& diffusion_step, const SurvivalTable& survival,
                        const AgeDensity& seed, const std::vector<ScalarField>& birth_history,
                        int n, int j) {
    const int J = seed.cohort_count();
    if (j < 0 || j >= J) throw SimError("represent_i: cohort index outside the age grid");
    if (n < 0) throw SimError("represent_i: negative step count");
    if (static_cast<int>(survival.s.size()) < J)
        throw SimError("represent_i: survival table shorter than the cohort count");

    if (j >= n) {
        // Seed branch: the cohort started as initial cohort j - n and aged n
        // times, through slots j-n, j-n+1, ..., j-1.
        ScalarField field = seed.cohort(j - n);
        for (int r = j - n; r < j; ++r)
            field = age_hop(diffusion_step, survival.s[static_cast<size_t>(r)], field);
        return field;
    }

    // Birth branch: the cohort entered as the birth field of step n - j and
    // aged j times, through slots 0, 1, ..., j-1.
    const int m = n - j;
    if (m < 1 || static_cast<size_t>(m) > birth_history.size()) {
        std::ostringstream os;
        os << "represent_i: need the birth field of step " << m << " but the history has "
           << birth_history.size() << " entries";
        throw SimError(os.str());
    }
    ScalarField field = birth_history[static_cast<size_t>(m - 1)];
    for (int r = 0; r < j; ++r)
        field = age_hop(diffusion_step, survival.s[static_cast<size_t>(r)], field);
    return field;
}

ScalarField v_tau_first_interval(const AgeDensity& seed, const DiffStep& diffusion_step,
                                 const SurvivalTable& survival, double tau, int t_steps) {
    const double da = seed.da();
    if (tau < 0.0) throw SimError("v_tau oracle: tau must be nonnegative");
    if (tau >= seed.a_max())
        throw SimError("v_tau oracle: tau is at or beyond the age-grid extent");
    const int q = static_cast<int>(std::floor(tau / da + 0.5));
    if (std::abs(q * da - tau) > 1e-9 * std::max(1.0, tau))
        throw SimError("v_tau oracle: tau is not a multiple of the cohort width");
    if (t_steps < 0) throw SimError("v_tau oracle: negative step count");
    if (t_steps > q)
        throw SimError("v_tau oracle: the seed-only representation stops at t = tau");

    // Same accumulation order as integrate_age_from_index: ascending j, the
    // cohort-width factor applied once at the end.
    const Grid& g = seed.grid();
    ScalarField acc(g, Mask::Omega, 0.0);
    const std::vector<ScalarField> no_births;
    for (int j = q; j < seed.cohort_count(); ++j) {
        ScalarField c = represent_i(diffusion_step, survival, seed, no_births, t_steps, j);
        for (int cell = 0; cell < g.cell_count(); ++cell) acc[cell] += c[cell];
    }
    for (int cell = 0; cell < g.cell_count(); ++cell) acc[cell] *= da;
    return acc;
}

double logistic_exact(double rho0, double beta, double m, double t) {
    if (beta == 0.0) throw SimError("logistic_exact: beta must be nonzero");
    const double den = m * rho0 + (beta - m * rho0) * std::exp(-beta * t);
    if (den == 0.0) throw SimError("logistic_exact: solution blows up before the requested time");
    return beta * rho0 / den;
}

std::vector<OdeSample> ode_reduction(const OdeParams& p, double dt, int nsteps) {
    if (!(dt > 0.0)) throw SimError("ode_reduction: dt must be positive");
    if (p.seed.size() != p.survival.size())
        throw SimError("ode_reduction: seed and survival tables must have one entry per cohort");
    const int J = static_cast<int>(p.seed.size());
    if (J < 1) throw SimError("ode_reduction: need at least one cohort");
    if (p.tau_index < 0 || p.tau_index >= J)
        throw SimError("ode_reduction: tau index outside the age grid");

    const double da = dt;
    std::vector<double> cohorts = p.seed;
    double phi = p.phi0, psi = p.psi0, u = p.u0;
    double rho = p.phi0 + p.psi0;

    auto age_integral = [&](int q) {
        double acc = 0.0;
        for (int j = q; j < J; ++j) acc += cohorts[static_cast<size_t>(j)];
        return acc * da;
    };
    double v = age_integral(0);
    double v_tau = age_integral(p.tau_index);

    std::vector<OdeSample> out;
    out.reserve(static_cast<size_t>(nsteps) + 1);
    out.push_back({0.0, rho, phi, psi, u, v, v_tau});

    // Shadow of Dynamics::step with the diffusion solves removed (they are
    // the identity on constant fields with zero diffusivity).
    for (int n = 1; n <= nsteps; ++n) {
        const double vt = v_tau;
        double tf = dt * p.sigma1 * vt;
        if (tf > 1.0) tf = 1.0;
        const double T = tf * phi;
        const double grow = dt * p.beta * rho;
        const double den = 1.0 + dt * p.m * rho;
        phi = (phi - T + grow) / den;
        psi = (psi + T) / den;
        rho = (rho + grow) / den;

        u = u / (1.0 + dt * p.sigma2 * psi);

        const double birth = p.sigma2 * u * psi;
        for (int j = J - 2; j >= 0; --j)
            cohorts[static_cast<size_t>(j + 1)] =
                p.survival[static_cast<size_t>(j)] * cohorts[static_cast<size_t>(j)];
        cohorts[0] = birth;

        v = age_integral(0);
        v_tau = age_integral(p.tau_index);
        out.push_back({dt * n, rho, phi, psi, u, v, v_tau});
    }
    return out;
}

} // namespace vecthost
