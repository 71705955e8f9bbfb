#ifndef VECTHOST_DIAGNOSTICS_HPP
#define VECTHOST_DIAGNOSTICS_HPP

#include "vecthost/grid.hpp"

#include <string>
#include <vector>

namespace vecthost {

enum class NormKind { L1, L2, Linf };

/// Discrete norms: L1 = h^2 * sum|w|, L2 = sqrt(h^2 * sum w^2), Linf = max|w|,
/// over the field's active cells.
double norm(const ScalarField& f, NormKind kind);

struct SimState; // dynamics.hpp

/// One diagnostics sample. Column order here is the CSV column order.
struct DiagRow {
    double t = 0.0;
    double U = 0.0;           // total hosts
    double V = 0.0;           // total infected hosts
    double V_tau_total = 0.0; // total infectious hosts (age > tau)
    double v_L1 = 0.0;
    double v_Linf = 0.0;
    double psi_L1 = 0.0;
    double psi_L2 = 0.0;
    double psi_Linf = 0.0;
    double phi_minus_rhostar_Linf = 0.0;
    double u_minus_ubar_L2 = 0.0;
    double ubar = 0.0; // U / (Lx*Ly)
    double mass_residual = 0.0;
    int clamp_flag = 0;
};

struct DiagnosticsSeries {
    std::vector<DiagRow> rows;
    static const char* header(); // CSV header, matches the field order above
};

/// Sample the state. rho_star may be null, in which case the distance-to-
/// steady-state column is recorded as 0. mass_residual and clamp_flag cover
/// the steps since the previous record.
DiagRow record(const SimState& s, const ScalarField* rho_star, double mass_residual,
               int clamp_flag);

} // namespace vecthost

#endif
