#include "vecthost/dynamics.hpp"

#include "vecthost/steady.hpp"

#include <cmath>
#include <sstream>

namespace vecthost {

namespace {

// Round-off-sized negatives from the linear solves are snapped back to zero;
// anything larger means the solve went wrong and aborts the run.
void nonneg_repair(ScalarField& w, double scale) {
    const double slack = -1e-11 * std::max(scale, 1e-30);
    for (int i = 0; i < w.size(); ++i) {
        if (w[i] < 0.0) {
            if (w[i] < slack) {
                std::ostringstream os;
                os << "positivity breach: value " << w[i] << " below slack " << slack;
                throw SimError(os.str());
            }
            w[i] = 0.0;
        }
    }
}

} // namespace

SimState::SimState(const Grid& g, int cohorts, double da)
    : phi(g, Mask::Star),
      psi(g, Mask::Star),
      rho_check(g, Mask::Star),
      u(g, Mask::Omega),
      i(g, da, cohorts),
      v(g, Mask::Omega),
      v_tau(g, Mask::Omega) {}

Dynamics::Dynamics(const Scenario& sc)
    : sc_(&sc),
      L1_(DiffusionOperator::assemble(*sc.grid, Mask::Star, sc.coeffs.d1, !sc.strict)),
      L2_(DiffusionOperator::assemble(*sc.grid, Mask::Omega, sc.coeffs.d2, !sc.strict)),
      last_birth_(*sc.grid, Mask::Omega) {
    const double dt = sc.dt;
    const double tol = sc.tol.cg_tol;
    host_step_ = [this, dt, tol](const ScalarField& w) {
        SolveStats st;
        ScalarField out = step_backward_euler(L2_, w, dt, nullptr, tol, &st);
        cg_iters_accum_ += st.iterations;
        nonneg_repair(out, w.max_abs());
        return out;
    };
}

SimState Dynamics::initial_state() const {
    const Scenario& sc = *sc_;
    SimState s(*sc.grid, sc.cohorts, sc.dt);
    s.t = 0.0;
    s.step_index = 0;
    s.phi = sc.init.phi0;
    s.psi = sc.init.psi0;
    for (int c = 0; c < s.phi.size(); ++c) s.rho_check[c] = s.phi[c] + s.psi[c];
    s.u = sc.init.u0;
    s.i = seed_initial(sc.z0, sc.init.k, *sc.grid, sc.dt, sc.cohorts, sc.strict);
    refresh_age_integrals(s);
    return s;
}

ScalarField Dynamics::vector_solve(const ScalarField& w) {
    SolveStats st;
    ScalarField out = step_backward_euler(L1_, w, sc_->dt, nullptr, sc_->tol.cg_tol, &st);
    cg_iters_accum_ += st.iterations;
    nonneg_repair(out, w.max_abs());
    return out;
}

void Dynamics::refresh_age_integrals(SimState& s) const {
    s.v = integrate_age(s.i);
    s.v_tau = integrate_age_from_index(s.i, sc_->tau_index);
}

StepReport Dynamics::step(SimState& s) {
    const Scenario& sc = *sc_;
    const Grid& g = *sc.grid;
    const double dt = sc.dt;
    StepReport rep;
    cg_iters_accum_ = 0;

    const double W_before = integrate(s.u) + integrate(s.v);

    // Vector system. The transfer phi -> psi uses the infectious-host age
    // integral from the current state; growth and death use the tracked
    // logistic field rho_check, which evolves on its own and enters the
    // epidemic system as a known input.
    //
    // The per-cell arithmetic below is mirrored literally by ode_reduction
    // in oracle.cpp; keep the two in sync.
    {
        const auto& cells = g.star_cells();
        ScalarField phi_r(g, Mask::Star), psi_r(g, Mask::Star), rho_r(g, Mask::Star);
        for (int c = 0; c < g.star_count(); ++c) {
            const double vt = s.v_tau[cells[static_cast<size_t>(c)]];
            double tf = dt * sc.coeffs.sigma1[c] * vt;
            if (tf > 1.0) {
                tf = 1.0;
                ++rep.clamp_count;
            }
            const double T = tf * s.phi[c];
            const double grow = dt * sc.coeffs.beta[c] * s.rho_check[c];
            const double den = 1.0 + dt * sc.coeffs.m[c] * s.rho_check[c];
            phi_r[c] = (s.phi[c] - T + grow) / den;
            psi_r[c] = (s.psi[c] + T) / den;
            rho_r[c] = (s.rho_check[c] + grow) / den;
        }
        s.phi = vector_solve(phi_r);
        s.psi = vector_solve(psi_r);
        s.rho_check = vector_solve(rho_r);
    }

    // Host infection sink, implicit in u, then host diffusion.
    {
        ScalarField damp_rate(g, Mask::Star);
        for (int c = 0; c < g.star_count(); ++c) damp_rate[c] = sc.coeffs.sigma2[c] * s.psi[c];
        ScalarField damp_ext = extend_to_omega(damp_rate, 0.0);
        ScalarField u_damped(g, Mask::Omega);
        for (int c = 0; c < g.cell_count(); ++c) u_damped[c] = s.u[c] / (1.0 + dt * damp_ext[c]);
        rep.u_sink = integrate(s.u) - integrate(u_damped);
        s.u = host_step_(u_damped);
    }

    // Birth of newly infected hosts at age zero, from end-of-step u and psi.
    {
        ScalarField u_star = restrict_to_star(s.u);
        ScalarField b_star(g, Mask::Star);
        for (int c = 0; c < g.star_count(); ++c)
            b_star[c] = sc.coeffs.sigma2[c] * u_star[c] * s.psi[c];
        last_birth_ = extend_to_omega(b_star, 0.0);
        rep.birth_deposit = s.i.da() * integrate(last_birth_);
    }

    AgeStepLedger led = age_step(s.i, host_step_, sc.survival, last_birth_);
    rep.removal = led.removal;
    rep.truncation = led.truncation;

    refresh_age_integrals(s);
    s.step_index += 1;
    s.t = sc.dt * static_cast<double>(s.step_index);

    const double W_after = integrate(s.u) + integrate(s.v);
    rep.mass_residual =
        W_after - W_before + rep.u_sink + rep.removal + rep.truncation - rep.birth_deposit;
    rep.cg_iterations = cg_iters_accum_;

    // Invariants: the tracked logistic field must stay glued to phi+psi, and
    // densities must stay nonnegative (the repair above enforces the latter).
    double gap = 0.0, rho_sup = 0.0;
    for (int c = 0; c < g.star_count(); ++c) {
        gap = std::max(gap, std::abs(s.phi[c] + s.psi[c] - s.rho_check[c]));
        rho_sup = std::max(rho_sup, std::abs(s.rho_check[c]));
    }
    rep.phi_psi_rho_gap = rho_sup > 0.0 ? gap / rho_sup : gap;
    if (rep.phi_psi_rho_gap > sc.tol.invariant_tol) {
        std::ostringstream os;
        os << "invariant breach at t = " << s.t << ": |phi+psi-rho| reached " << gap
           << " against sup rho " << rho_sup;
        throw SimError(os.str());
    }
    rep.min_phi = s.phi.min_value();
    rep.min_psi = s.psi.min_value();
    rep.min_u = s.u.min_value();
    return rep;
}

RunResult run(const Scenario& sc) {
    if (sc.strict) {
        AssumptionReport rep = validate_assumptions(sc.coeffs, *sc.grid, sc.init);
        if (!rep.all_pass())
            throw SimError("refusing to run, violated assumptions: " + rep.summary());
        if (std::exp(-sc.coeffs.lambda_star * sc.a_max) > 1e-10)
            throw SimError("age-grid extent is too short for the survival tail rule");
    }
    if (!(sc.dt > 0.0)) throw SimError("run: dt must be positive");
    if (sc.output_every < 1) throw SimError("run: output cadence must be at least 1");

    RunResult out;
    SteadyResult steady = solve_rho_star(*sc.grid, sc.coeffs, sc.tol.steady_tol, sc.tol.cg_tol);
    out.rho_star = std::make_unique<ScalarField>(steady.rho_star);
    out.rho_star_residual = steady.residual_inf;

    Dynamics dyn(sc);
    SimState s = dyn.initial_state();

    const long n_steps = std::max(0L, std::lround(sc.t_end / sc.dt));
    out.series.rows.push_back(record(s, out.rho_star.get(), 0.0, 0));

    double residual_accum = 0.0;
    int clamp_accum = 0;
    long records = 1;
    for (long n = 1; n <= n_steps; ++n) {
        StepReport rep = dyn.step(s);
        residual_accum += rep.mass_residual;
        clamp_accum += rep.clamp_count;
        out.max_phi_psi_rho_gap = std::max(out.max_phi_psi_rho_gap, rep.phi_psi_rho_gap);
        out.max_abs_mass_residual = std::max(out.max_abs_mass_residual, std::abs(rep.mass_residual));
        if (n % sc.output_every == 0 || n == n_steps) {
            out.series.rows.push_back(
                record(s, out.rho_star.get(), residual_accum, clamp_accum > 0 ? 1 : 0));
            out.any_clamp = out.any_clamp || clamp_accum > 0;
            residual_accum = 0.0;
            clamp_accum = 0;
            ++records;
            // Every hundredth record, re-derive the age integral from the
            // cohorts and cross-check the cached field.
            if (records % 100 == 0) {
                ScalarField fresh = integrate_age(s.i);
                double diff = 0.0, scale = 0.0;
                for (int c = 0; c < fresh.size(); ++c) {
                    diff = std::max(diff, std::abs(fresh[c] - s.v[c]));
                    scale = std::max(scale, std::abs(fresh[c]));
                }
                if (diff > 1e-12 * std::max(scale, 1.0))
                    throw SimError("cached age integral diverged from the cohort re-sum");
            }
        }
    }
    out.final_state = std::make_unique<SimState>(std::move(s));
    return out;
}

} // namespace vecthost
