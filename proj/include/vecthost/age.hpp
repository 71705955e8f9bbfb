#ifndef VECTHOST_AGE_HPP
#define VECTHOST_AGE_HPP

#include "vecthost/expression.hpp"
#include "vecthost/grid.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace vecthost {

/// Infection-age-resolved host density: J cohorts of width da with cohort j
/// centered at age (j + 1/2) * da. Cohort width always equals the time step,
/// so aging by one step moves each cohort up by exactly one slot.
class AgeDensity {
public:
    AgeDensity(const Grid& g, double da, int cohorts);

    int cohort_count() const { return static_cast<int>(cohorts_.size()); }
    double da() const { return da_; }
    double a_max() const { return da_ * cohort_count(); }
    double age_center(int j) const { return (j + 0.5) * da_; }

    ScalarField& cohort(int j) { return cohorts_[static_cast<size_t>(j)]; }
    const ScalarField& cohort(int j) const { return cohorts_[static_cast<size_t>(j)]; }

    const Grid& grid() const { return *grid_; }

private:
    const Grid* grid_;
    double da_;
    std::vector<ScalarField> cohorts_;
};

/// Per-cohort survival factors s_j = exp(-int_{j da}^{(j+1) da} lambda),
/// with the integral computed by 5-point Gauss-Legendre quadrature.
struct SurvivalTable {
    double da = 0.0;
    std::vector<double> s;
};

/// exp(-integral of lambda over [a_lo, a_hi]) by 5-point Gauss-Legendre.
double survival_factor(const Expression& lambda, double a_lo, double a_hi);

SurvivalTable build_survival(const Expression& lambda, double da, int cohorts);

struct AgeGridSelection {
    double a_max = 0.0;
    int cohorts = 0;
    double lambda_star = 0.0; // sampled min of lambda over [0, a_max] minus 1e-12
};

/// Choose the age-grid extent. With no explicit a_max, pick the smallest
/// multiple of dt whose survival tail exp(-lambda_star * a_max) drops below
/// 1e-10; an explicit a_max is rounded up to a multiple of dt. At most 1e5
/// cohorts either way.
AgeGridSelection select_age_grid(const Expression& lambda, double dt,
                                 std::optional<double> explicit_a_max);

/// Initial cohorts z0(a_j) * k(x). In strict mode requires z0 >= 0 at the
/// sampled ages and z0(0) == 0.
AgeDensity seed_initial(const Expression& z0, const ScalarField& k, const Grid& g, double da,
                        int cohorts, bool strict);

/// Age integral v = da * sum of all cohorts (pointwise).
ScalarField integrate_age(const AgeDensity& i);
/// Partial age integral over ages above tau; tau must be a multiple of da
/// (within round-off) strictly below a_max.
ScalarField integrate_age_from(const AgeDensity& i, double tau);
/// Same, by cohort index: sum over j >= q_index.
ScalarField integrate_age_from_index(const AgeDensity& i, int q_index);

/// Mass bookkeeping of one aging step, all terms exact integrals.
struct AgeStepLedger {
    double removal = 0.0;    // sum_j (1 - s_j) * da * int(cohort_j), j < J-1
    double truncation = 0.0; // da * int(cohort_{J-1}) dropped off the grid
};

/// One aging step: new cohort j+1 = s_j * diffusion_step(cohort j), new
/// cohort 0 = birth_field. The last cohort's outflow is discarded and
/// reported in the ledger.
AgeStepLedger age_step(AgeDensity& i, const std::function<ScalarField(const ScalarField&)>& diffusion_step,
                       const SurvivalTable& survival, const ScalarField& birth_field);

} // namespace vecthost

#endif
