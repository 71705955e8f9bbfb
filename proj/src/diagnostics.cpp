#include "vecthost/diagnostics.hpp"

#include "vecthost/dynamics.hpp"

#include <cmath>

namespace vecthost {

double norm(const ScalarField& f, NormKind kind) {
    const double h2 = f.grid().h() * f.grid().h();
    switch (kind) {
        case NormKind::L1: {
            double s = 0.0;
            for (int i = 0; i < f.size(); ++i) s += std::abs(f[i]);
            return h2 * s;
        }
        case NormKind::L2: {
            double s = 0.0;
            for (int i = 0; i < f.size(); ++i) s += f[i] * f[i];
            return std::sqrt(h2 * s);
        }
        case NormKind::Linf:
            return f.max_abs();
    }
    return 0.0;
}

const char* DiagnosticsSeries::header() {
    return "t,U,V,V_tau_total,v_L1,v_Linf,psi_L1,psi_L2,psi_Linf,phi_minus_rhostar_Linf,"
           "u_minus_ubar_L2,ubar,mass_residual,clamp_flag";
}

DiagRow record(const SimState& s, const ScalarField* rho_star, double mass_residual,
               int clamp_flag) {
    const Grid& g = s.u.grid();
    DiagRow r;
    r.t = s.t;
    r.U = integrate(s.u);
    r.V = integrate(s.v);
    r.V_tau_total = integrate(s.v_tau);
    r.v_L1 = norm(s.v, NormKind::L1);
    r.v_Linf = norm(s.v, NormKind::Linf);
    r.psi_L1 = norm(s.psi, NormKind::L1);
    r.psi_L2 = norm(s.psi, NormKind::L2);
    r.psi_Linf = norm(s.psi, NormKind::Linf);
    if (rho_star) {
        double gap = 0.0;
        for (int c = 0; c < s.phi.size(); ++c)
            gap = std::max(gap, std::abs(s.phi[c] - (*rho_star)[c]));
        r.phi_minus_rhostar_Linf = gap;
    }
    r.ubar = r.U / (g.Lx() * g.Ly());
    {
        double h2 = g.h() * g.h(), s2 = 0.0;
        for (int c = 0; c < s.u.size(); ++c) {
            double d = s.u[c] - r.ubar;
            s2 += d * d;
        }
        r.u_minus_ubar_L2 = std::sqrt(h2 * s2);
    }
    r.mass_residual = mass_residual;
    r.clamp_flag = clamp_flag;
    return r;
}

} // namespace vecthost
