#include "vecthost/verify.hpp"

#include "vecthost/oracle.hpp"

#include <cmath>
#include <sstream>

namespace vecthost {

namespace {

// Largest cellwise gap between two fields, relative to the larger magnitude.
double rel_gap(const ScalarField& a, const ScalarField& b) {
    double diff = 0.0, scale = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
    }
    return scale > 0.0 ? diff / scale : diff;
}

double rel_gap(double a, double b) {
    double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : std::abs(a - b);
}

std::string gap_detail(double worst, double tol) {
    std::ostringstream os;
    os << "worst relative gap " << worst << " (allowed " << tol << ")";
    return os.str();
}

// The suite geometry: unit square, 5x5 cells, 3x3 vector habitat, the center
// cell as seed region, 8 cohorts, tau after 4 of them.
Config reduced_config(const Config& cfg) {
    Config r = cfg;
    r.Lx = r.Ly = 1.0;
    r.nx = r.ny = 5;
    r.star = Rect{0.2, 0.2, 0.8, 0.8};
    r.starstar = Rect{0.4, 0.4, 0.6, 0.6};
    r.dt = 0.05;
    r.t_end = 1.0;
    r.output_every = 1;
    r.tau = 0.2;
    r.a_max = 0.4;
    r.strict = false;
    return r;
}

Scenario build_reduced(const Config& cfg) {
    Config r = reduced_config(cfg);
    // The config's seed profile may vanish on the reduced seed region; the
    // suite only needs some nontrivial seed, so fall back to a uniform one.
    {
        Grid probe = Grid::build(r.Lx, r.Ly, r.nx, r.ny, r.star, r.starstar);
        ScalarField raw = clip_to_starstar(evaluate_field(r.k, probe, Mask::Omega), probe);
        if (raw.max_abs() == 0.0) r.k = Expression::parse("1");
    }
    return build_scenario(r).scenario;
}

VerifyCheck check_characteristics(const Scenario& sc) {
    VerifyCheck c{"cohort characteristics", false, ""};
    const double tol = 1e-12;
    Dynamics dyn(sc);
    SimState s = dyn.initial_state();
    const AgeDensity seed = s.i;
    std::vector<ScalarField> births;
    double worst = 0.0;
    const int steps = 20;
    for (int n = 1; n <= steps; ++n) {
        dyn.step(s);
        births.push_back(dyn.last_birth());
        for (int j = 0; j < s.i.cohort_count(); ++j) {
            ScalarField rep =
                represent_i(dyn.host_diffusion_step(), sc.survival, seed, births, n, j);
            worst = std::max(worst, rel_gap(rep, s.i.cohort(j)));
        }
    }
    c.pass = worst <= tol;
    c.detail = gap_detail(worst, tol);
    return c;
}

VerifyCheck check_decoupling(const Scenario& sc) {
    VerifyCheck c{"infectious integral decoupling", false, ""};
    const double tol = 1e-12;

    auto v_tau_series = [](const Scenario& s_in) {
        Dynamics dyn(s_in);
        SimState s = dyn.initial_state();
        std::vector<ScalarField> out{s.v_tau};
        for (int n = 1; n <= s_in.tau_index; ++n) {
            dyn.step(s);
            out.push_back(s.v_tau);
        }
        return out;
    };

    Dynamics dyn(sc);
    const AgeDensity seed = dyn.initial_state().i;
    std::vector<ScalarField> stepped = v_tau_series(sc);
    double worst = 0.0;
    for (int n = 0; n <= sc.tau_index; ++n) {
        ScalarField rep = v_tau_first_interval(seed, dyn.host_diffusion_step(), sc.survival,
                                               sc.tau, n);
        worst = std::max(worst, rel_gap(rep, stepped[static_cast<size_t>(n)]));
    }

    // Scaling the host-infection rate changes only cohorts younger than tau,
    // so the infectious integral on [0, tau] must not move at all.
    Scenario scaled = sc;
    for (int i = 0; i < scaled.coeffs.sigma2.size(); ++i) scaled.coeffs.sigma2[i] *= 10.0;
    std::vector<ScalarField> stepped10 = v_tau_series(scaled);
    for (int n = 0; n <= sc.tau_index; ++n)
        worst = std::max(
            worst, rel_gap(stepped10[static_cast<size_t>(n)], stepped[static_cast<size_t>(n)]));

    c.pass = worst <= tol;
    c.detail = gap_detail(worst, tol);
    return c;
}

Config flat_config() {
    Config f;
    f.Lx = f.Ly = 1.0;
    f.nx = f.ny = 5;
    f.star = Rect{0.2, 0.2, 0.8, 0.8};
    f.starstar = Rect{0.4, 0.4, 0.6, 0.6};
    f.d1 = Expression::parse("0");
    f.d2 = Expression::parse("0");
    f.beta = Expression::parse("2");
    f.m = Expression::parse("1");
    f.sigma1 = Expression::parse("0.8");
    f.sigma2 = Expression::parse("0.6");
    f.lambda = Expression::parse("1.5");
    f.tau = 0.2;
    f.a_max = 0.4;
    f.u0 = Expression::parse("1");
    f.phi0 = Expression::parse("1");
    f.psi0 = Expression::parse("0.1");
    f.z0 = Expression::parse("a*exp(-a)");
    f.k = Expression::parse("1");
    f.dt = 0.05;
    f.t_end = 1.0;
    f.output_every = 1;
    f.strict = false;
    return f;
}

VerifyCheck check_flat_reduction() {
    VerifyCheck c{"flat-field scalar reduction", false, ""};
    const double tol = 1e-13;
    Scenario sc = build_scenario(flat_config()).scenario;
    const Grid& g = *sc.grid;

    // Representative cells: inside the seed region, in the vector habitat
    // outside it, and outside the vector habitat.
    const int cell_seed = g.cell_id(2, 2);
    const int cell_star = g.cell_id(1, 1);
    const int cell_out = g.cell_id(0, 0);
    const int s_seed = g.star_index_of(cell_seed);
    const int s_star = g.star_index_of(cell_star);

    OdeParams base;
    base.beta = 2.0;
    base.m = 1.0;
    base.sigma1 = 0.8;
    base.sigma2 = 0.6;
    base.u0 = 1.0;
    base.phi0 = 1.0;
    base.psi0 = 0.1;
    base.survival = sc.survival.s;
    base.tau_index = sc.tau_index;
    const double k_val = sc.init.k[cell_seed];
    for (int j = 0; j < sc.cohorts; ++j) {
        double zj = sc.z0.eval_age((j + 0.5) * sc.dt);
        base.seed.push_back(zj * k_val);
    }
    OdeParams zero_seed = base;
    for (double& v : zero_seed.seed) v = 0.0;

    const int steps = 20;
    std::vector<OdeSample> ta = ode_reduction(base, sc.dt, steps);
    std::vector<OdeSample> tb = ode_reduction(zero_seed, sc.dt, steps);

    Dynamics dyn(sc);
    SimState s = dyn.initial_state();
    double worst = 0.0;
    for (int n = 0; n <= steps; ++n) {
        if (n > 0) dyn.step(s);
        const OdeSample& a = ta[static_cast<size_t>(n)];
        const OdeSample& b = tb[static_cast<size_t>(n)];
        worst = std::max({worst, rel_gap(s.phi[s_seed], a.phi), rel_gap(s.psi[s_seed], a.psi),
                          rel_gap(s.rho_check[s_seed], a.rho), rel_gap(s.u[cell_seed], a.u),
                          rel_gap(s.v[cell_seed], a.v), rel_gap(s.v_tau[cell_seed], a.v_tau)});
        worst = std::max({worst, rel_gap(s.phi[s_star], b.phi), rel_gap(s.psi[s_star], b.psi),
                          rel_gap(s.rho_check[s_star], b.rho), rel_gap(s.u[cell_star], b.u),
                          rel_gap(s.v[cell_star], b.v), rel_gap(s.v_tau[cell_star], b.v_tau)});
        worst = std::max({worst, rel_gap(s.u[cell_out], 1.0), std::abs(s.v[cell_out])});
    }
    c.pass = worst <= tol;
    c.detail = gap_detail(worst, tol);
    return c;
}

VerifyCheck check_logistic() {
    VerifyCheck c{"logistic closed form", false, ""};
    Config f = flat_config();
    f.sigma1 = Expression::parse("0");
    f.sigma2 = Expression::parse("0");
    f.psi0 = Expression::parse("0");
    f.z0 = Expression::parse("0");
    f.d1 = Expression::parse("0.05");
    f.d2 = Expression::parse("0.1");
    f.dt = 0.0125;
    f.t_end = 1.0;
    Scenario sc = build_scenario(f).scenario;

    Dynamics dyn(sc);
    SimState s = dyn.initial_state();
    const int steps = 80;
    for (int n = 0; n < steps; ++n) dyn.step(s);
    const double expected = logistic_exact(1.0, 2.0, 1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < s.rho_check.size(); ++i)
        worst = std::max(worst, std::abs(s.rho_check[i] - expected));
    // First-order splitting: the error is about 0.42*dt here.
    const double tol = 0.01;
    c.pass = worst <= tol;
    std::ostringstream os;
    os << "max |rho(1) - closed form| = " << worst << " (allowed " << tol << ")";
    c.detail = os.str();
    return c;
}

} // namespace

bool run_verify_suite(const Config& cfg, std::vector<VerifyCheck>& out) {
    Scenario sc = build_reduced(cfg);
    out.push_back(check_characteristics(sc));
    out.push_back(check_decoupling(sc));
    out.push_back(check_flat_reduction());
    out.push_back(check_logistic());
    bool all = true;
    for (const auto& c : out) all = all && c.pass;
    return all;
}

} // namespace vecthost
