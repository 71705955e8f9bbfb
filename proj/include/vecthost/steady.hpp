#ifndef VECTHOST_STEADY_HPP
#define VECTHOST_STEADY_HPP

#include "vecthost/coeffs.hpp"
#include "vecthost/diagnostics.hpp"
#include "vecthost/grid.hpp"

#include <string>
#include <vector>

namespace vecthost {

struct SteadyResult {
    ScalarField rho_star;
    double residual_inf = 0.0; // ||  -L rho - beta rho + m rho^2 ||_inf
    int march_steps = 0;
    int newton_steps = 0;
    bool newton_ok = true; // false when the polish failed and the march
                           // iterate was returned instead
};

/// Positive steady state of the vector logistic equation on the star cells:
/// time-march from the constant sup(beta)/m_star until the update stalls,
/// then polish with damped Newton on the discrete elliptic residual. The
/// returned field satisfies residual_inf <= 10 * tol unless newton_ok is
/// false.
SteadyResult solve_rho_star(const Grid& g, const CoefficientSet& c, double tol = 1e-8,
                            double cg_tol = 1e-12);

struct Thresholds {
    double v_L1 = 0.0;
    double v_Linf = 0.0;
    double psi_L2 = 0.0;
    double psi_Linf = 0.0;
    double u_minus_ubar_L2 = 0.0;
    double phi_minus_rhostar_Linf = 0.0;
    int tail = 10; // fit window for the decay rate and the ubar drift
};

struct QuantityVerdict {
    std::string name;
    double threshold = 0.0;
    double last_value = 0.0;
    bool converged = false;      // below threshold from some record to the end
    double crossing_time = 0.0;  // first record time after which it stays below
    bool crossed = false;        // converged after having been above
    double decay_rate = 0.0;     // log-slope over the tail, 0 when undefined
};

struct ConvergenceReport {
    std::vector<QuantityVerdict> quantities;
    double t_end = 0.0;
    double u_star_estimate = 0.0;    // ubar at t_end
    double u_star_drift = 0.0;       // |ubar(t_end) - ubar(tail start)|
    double u_star_lower_bound = 0.0;
    bool all_converged = false;

    std::string text() const; // structured text block for the run report
};

/// Long-time verdicts from a completed diagnostics series.
ConvergenceReport detect_limits(const DiagnosticsSeries& series, const Thresholds& th,
                                double sigma2_sup);

/// Thresholds scaled off the series itself: 1e-6 of the peak for the decaying
/// norms, 1e-6 of ubar(0) for host flatness, 1e-4 of sup rho_star for the
/// vector steady-state gap.
Thresholds default_thresholds(const DiagnosticsSeries& series, const ScalarField& rho_star);

/// ubar(0) * exp(-sigma2_sup * sum dt * sup psi) accumulated over the series
/// rows; exact (and a proven lower bound for ubar) when every step was
/// recorded.
double u_star_lower_bound(const DiagnosticsSeries& series, double sigma2_sup);

} // namespace vecthost

#endif
