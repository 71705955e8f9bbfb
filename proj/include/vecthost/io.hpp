#ifndef VECTHOST_IO_HPP
#define VECTHOST_IO_HPP

#include "vecthost/diagnostics.hpp"
#include "vecthost/dynamics.hpp"
#include "vecthost/grid.hpp"

#include <string>

namespace vecthost {

/// Decimal form with 17 significant digits (round-trips to the same double).
std::string format_number(double v);

/// Diagnostics table, one row per record. LF line endings, header row first.
std::string series_csv(const DiagnosticsSeries& s);

/// Final fields, one row per grid cell: ix, iy, phi, psi, u, v, v_tau.
/// phi and psi are only defined on the vector habitat; outside it the two
/// columns are left empty rather than filled with a fake zero.
std::string final_state_csv(const SimState& s);

/// Vector steady state, one row per vector-habitat cell: ix, iy, rho_star.
std::string rho_star_csv(const ScalarField& rho_star);

/// Write exactly the given bytes (no newline translation).
void write_file(const std::string& path, const std::string& content);

} // namespace vecthost

#endif
