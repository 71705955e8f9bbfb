#include "vecthost/steady.hpp"

#include "vecthost/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace vecthost {

namespace {

// Residual of the discrete elliptic problem: F(rho) = -L rho - beta rho + m rho^2.
double elliptic_residual(const DiffusionOperator& L, const CoefficientSet& c,
                         const ScalarField& rho, ScalarField& F) {
    L.apply(rho.data(), F.data());
    double worst = 0.0;
    for (int i = 0; i < rho.size(); ++i) {
        F[i] = -F[i] - c.beta[i] * rho[i] + c.m[i] * rho[i] * rho[i];
        worst = std::max(worst, std::abs(F[i]));
    }
    return worst;
}

// PCG for J x = b with J = -L + diag(s), Jacobi preconditioner. Deterministic
// fixed-order loops, x starts at zero. Returns false on breakdown.
bool pcg_shifted(const DiffusionOperator& L, const std::vector<double>& s,
                 const ScalarField& b, ScalarField& x, double tol) {
    const int n = b.size();
    double bnorm = 0.0;
    for (int i = 0; i < n; ++i) bnorm += b[i] * b[i];
    bnorm = std::sqrt(bnorm);
    for (int i = 0; i < n; ++i) x[i] = 0.0;
    if (bnorm == 0.0) return true;

    std::vector<double> minv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double d = L.conductance_sum(i) + s[static_cast<size_t>(i)];
        minv[static_cast<size_t>(i)] = d > 1e-300 ? 1.0 / d : 1.0;
    }

    ScalarField r = b, z(b.grid(), b.mask()), p(b.grid(), b.mask()), Ap(b.grid(), b.mask());
    for (int i = 0; i < n; ++i) z[i] = minv[static_cast<size_t>(i)] * r[i];
    p = z;
    double rz = 0.0;
    for (int i = 0; i < n; ++i) rz += r[i] * z[i];

    const int max_iter = 40 * n + 200;
    for (int it = 0; it < max_iter; ++it) {
        L.apply(p.data(), Ap.data());
        for (int i = 0; i < n; ++i) Ap[i] = -Ap[i] + s[static_cast<size_t>(i)] * p[i];
        double pAp = 0.0;
        for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        if (!(pAp > 0.0)) return false;
        double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (int i = 0; i < n; ++i) r[i] -= alpha * Ap[i];
        double rnorm = 0.0;
        for (int i = 0; i < n; ++i) rnorm += r[i] * r[i];
        rnorm = std::sqrt(rnorm);
        if (rnorm <= tol * bnorm) return true;
        for (int i = 0; i < n; ++i) z[i] = minv[static_cast<size_t>(i)] * r[i];
        double rz_new = 0.0;
        for (int i = 0; i < n; ++i) rz_new += r[i] * z[i];
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return false;
}

} // namespace

SteadyResult solve_rho_star(const Grid& g, const CoefficientSet& c, double tol, double cg_tol) {
    if (!(c.m_star > 0.0))
        throw SimError("steady state needs a positive vector death factor everywhere");
    const double rho_init = c.beta_sup() / c.m_star;
    DiffusionOperator L = DiffusionOperator::assemble(g, Mask::Star, c.d1, true);
    const int n = g.star_count();

    SteadyResult out{ScalarField(g, Mask::Star, rho_init)};
    ScalarField& rho = out.rho_star;

    // Phase 1: time-march the same logistic update the dynamics uses, from a
    // constant supersolution, until the iterate stalls. Its fixed point
    // carries an O(dt) bias, so this is only a warm start.
    const double dt = 0.5;
    const int march_cap = 20000;
    ScalarField rhs(g, Mask::Star);
    for (int step = 0; step < march_cap; ++step) {
        for (int i = 0; i < n; ++i) {
            double grow = dt * c.beta[i] * rho[i];
            double den = 1.0 + dt * c.m[i] * rho[i];
            rhs[i] = (rho[i] + grow) / den;
        }
        ScalarField next = solve_spd(L, dt, nullptr, rhs, cg_tol);
        double delta = 0.0, scale = 0.0;
        for (int i = 0; i < n; ++i) {
            delta = std::max(delta, std::abs(next[i] - rho[i]));
            scale = std::max(scale, std::abs(next[i]));
        }
        rho = next;
        ++out.march_steps;
        if (delta <= 1e-12 * std::max(scale, 1.0)) break;
    }

    // Phase 2: damped Newton on F(rho) = -L rho - beta rho + m rho^2.
    // Jacobian J = -L + diag(2 m rho - beta) is SPD near the positive root.
    ScalarField F(g, Mask::Star), delta(g, Mask::Star);
    std::vector<double> shift(static_cast<size_t>(n));
    double res = elliptic_residual(L, c, rho, F);
    bool stalled = false;
    while (res > tol && out.newton_steps < 60 && !stalled) {
        for (int i = 0; i < n; ++i)
            shift[static_cast<size_t>(i)] = 2.0 * c.m[i] * rho[i] - c.beta[i];
        if (!pcg_shifted(L, shift, F, delta, cg_tol)) break;
        double alpha = 1.0;
        stalled = true;
        while (alpha >= 1.0 / 1024.0) {
            ScalarField trial = rho;
            for (int i = 0; i < n; ++i) trial[i] -= alpha * delta[i];
            ScalarField Ftrial(g, Mask::Star);
            double res_trial = elliptic_residual(L, c, trial, Ftrial);
            if (res_trial < res * (1.0 - 1e-4 * alpha)) {
                rho = trial;
                F = Ftrial;
                res = res_trial;
                stalled = false;
                break;
            }
            alpha *= 0.5;
        }
        ++out.newton_steps;
    }
    out.residual_inf = res;
    out.newton_ok = res <= 10.0 * tol;
    return out;
}

namespace {

struct Tracked {
    const char* name;
    double DiagRow::* field;
    double Thresholds::* threshold;
};

constexpr Tracked kTracked[] = {
    {"v_L1", &DiagRow::v_L1, &Thresholds::v_L1},
    {"v_Linf", &DiagRow::v_Linf, &Thresholds::v_Linf},
    {"psi_L2", &DiagRow::psi_L2, &Thresholds::psi_L2},
    {"psi_Linf", &DiagRow::psi_Linf, &Thresholds::psi_Linf},
    {"u_minus_ubar_L2", &DiagRow::u_minus_ubar_L2, &Thresholds::u_minus_ubar_L2},
    {"phi_minus_rhostar_Linf", &DiagRow::phi_minus_rhostar_Linf,
     &Thresholds::phi_minus_rhostar_Linf},
};

double tail_log_slope(const std::vector<DiagRow>& rows, double DiagRow::* field, int tail) {
    const int n = static_cast<int>(rows.size());
    const int k = std::min(tail, n);
    if (k < 2) return 0.0;
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (int i = n - k; i < n; ++i) {
        double v = rows[static_cast<size_t>(i)].*field;
        if (!(v > 0.0)) return 0.0;
        double t = rows[static_cast<size_t>(i)].t, y = std::log(v);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    double denom = k * stt - st * st;
    if (denom <= 0.0) return 0.0;
    return (k * sty - st * sy) / denom;
}

} // namespace

ConvergenceReport detect_limits(const DiagnosticsSeries& series, const Thresholds& th,
                                double sigma2_sup) {
    ConvergenceReport rep;
    const auto& rows = series.rows;
    const int n = static_cast<int>(rows.size());
    if (n == 0) return rep;
    rep.t_end = rows.back().t;

    for (const Tracked& q : kTracked) {
        QuantityVerdict v;
        v.name = q.name;
        v.threshold = th.*(q.threshold);
        v.last_value = rows.back().*(q.field);
        int last_above = -1;
        for (int i = 0; i < n; ++i)
            if (rows[static_cast<size_t>(i)].*(q.field) > v.threshold) last_above = i;
        v.converged = last_above < n - 1;
        v.crossed = v.converged && last_above >= 0;
        v.crossing_time = v.crossed ? rows[static_cast<size_t>(last_above + 1)].t : 0.0;
        v.decay_rate = tail_log_slope(rows, q.field, th.tail);
        rep.quantities.push_back(std::move(v));
    }

    rep.u_star_estimate = rows.back().ubar;
    const int tail_start = std::max(0, n - th.tail);
    rep.u_star_drift = std::abs(rows.back().ubar - rows[static_cast<size_t>(tail_start)].ubar);
    rep.u_star_lower_bound = vecthost::u_star_lower_bound(series, sigma2_sup);
    rep.all_converged = true;
    for (const auto& v : rep.quantities) rep.all_converged = rep.all_converged && v.converged;
    return rep;
}

Thresholds default_thresholds(const DiagnosticsSeries& series, const ScalarField& rho_star) {
    Thresholds th;
    auto peak = [&](double DiagRow::* field) {
        double p = 0.0;
        for (const auto& r : series.rows) p = std::max(p, r.*field);
        return p > 0.0 ? 1e-6 * p : 1e-14;
    };
    th.v_L1 = peak(&DiagRow::v_L1);
    th.v_Linf = peak(&DiagRow::v_Linf);
    th.psi_L2 = peak(&DiagRow::psi_L2);
    th.psi_Linf = peak(&DiagRow::psi_Linf);
    double ubar0 = series.rows.empty() ? 1.0 : series.rows.front().ubar;
    th.u_minus_ubar_L2 = std::max(1e-6 * ubar0, 1e-14);
    double rho_sup = 0.0;
    for (int i = 0; i < rho_star.size(); ++i) rho_sup = std::max(rho_sup, rho_star[i]);
    th.phi_minus_rhostar_Linf = std::max(1e-4 * rho_sup, 1e-14);
    return th;
}

double u_star_lower_bound(const DiagnosticsSeries& series, double sigma2_sup) {
    const auto& rows = series.rows;
    if (rows.empty()) return 0.0;
    double exposure = 0.0;
    for (size_t k = 1; k < rows.size(); ++k)
        exposure += (rows[k].t - rows[k - 1].t) * rows[k].psi_Linf;
    return rows.front().ubar * std::exp(-sigma2_sup * exposure);
}

std::string ConvergenceReport::text() const {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "long-time limits at t = %.6g\n", t_end);
    os << buf;
    for (const auto& q : quantities) {
        const char* verdict = q.converged ? "converged" : "not converged";
        std::snprintf(buf, sizeof buf,
                      "  %-24s last %.6e  threshold %.3e  %s  tail rate %+.3f\n",
                      q.name.c_str(), q.last_value, q.threshold, verdict, q.decay_rate);
        os << buf;
        if (q.crossed) {
            std::snprintf(buf, sizeof buf, "  %-24s stays below threshold from t = %.6g\n", "",
                          q.crossing_time);
            os << buf;
        }
    }
    std::snprintf(buf, sizeof buf, "  host mass estimate u* = %.9e (tail drift %.3e)\n",
                  u_star_estimate, u_star_drift);
    os << buf;
    std::snprintf(buf, sizeof buf, "  host mass lower bound  = %.9e\n", u_star_lower_bound);
    os << buf;
    os << "  all tracked quantities converged: " << (all_converged ? "yes" : "no") << "\n";
    return os.str();
}

} // namespace vecthost
