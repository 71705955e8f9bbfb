#ifndef VECTHOST_COEFFS_HPP
#define VECTHOST_COEFFS_HPP

#include "vecthost/expression.hpp"
#include "vecthost/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vecthost {

/// All model coefficients evaluated on the grid, plus positivity floors.
/// Floors are the minimum of the sampled values minus 1e-12, so a floor is
/// positive exactly when the sampled coefficient is bounded away from zero.
struct CoefficientSet {
    ScalarField d1;     // vector diffusivity, star cells
    ScalarField d2;     // host diffusivity, all cells
    ScalarField beta;   // vector birth rate, star cells
    ScalarField m;      // vector death factor, star cells
    ScalarField sigma1; // host->vector transmission, star cells
    ScalarField sigma2; // vector->host transmission, star cells
    Expression lambda;  // age-dependent recovery rate

    double d_star = 0.0;      // min over d1 and d2 samples
    double m_star = 0.0;
    double beta_star = 0.0;
    double lambda_star = 0.0; // min over sampled ages, set by the age-grid selection

    double beta_sup() const;
    double sigma2_sup() const;
};

/// Evaluate the spatial coefficient expressions and compute the spatial
/// floors. lambda_star is filled in later, once the age grid is chosen.
CoefficientSet build_coefficients(const Expression& d1, const Expression& d2,
                                  const Expression& beta, const Expression& m,
                                  const Expression& sigma1, const Expression& sigma2,
                                  const Expression& lambda, const Grid& g);

/// Scale a nonnegative field supported in the seed region so its integral
/// over the domain is 1. Errors if the field is negative somewhere, has
/// support outside the seed region, or is identically zero.
ScalarField normalize_k(const ScalarField& raw_k, const Grid& g);

/// Zero a field outside the seed region (used before normalize_k when the
/// seed expression has wider support, e.g. a Gaussian bump).
ScalarField clip_to_starstar(const ScalarField& f, const Grid& g);

struct AssumptionCheck {
    std::string id;     // "A0".."A6"
    bool pass = false;
    std::string detail; // human-readable reason when failing
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    bool all_pass() const;
    std::string summary() const; // lists every violated assumption
};

struct InitialData {
    ScalarField u0;          // hosts, all cells
    ScalarField phi0;        // susceptible vectors, star cells
    ScalarField psi0;        // infected vectors, star cells
    ScalarField k;           // normalized seed profile, all cells
    std::vector<double> z0_samples; // seed age profile at the cohort midpoints
    double z0_at_zero = 0.0;
};

/// Check the standing model assumptions. In strict (paper) mode the caller
/// refuses to run when any check fails; degenerate lab runs may proceed.
AssumptionReport validate_assumptions(const CoefficientSet& c, const Grid& g,
                                      const InitialData& init);

} // namespace vecthost

#endif
