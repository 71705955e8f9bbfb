#include "vecthost/age.hpp"

#include <cmath>
#include <sstream>

namespace vecthost {

namespace {

const int kMaxCohorts = 100000;
const double kTailLog = 23.025850929940457; // -ln(1e-10)

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
const double kGlNode[5] = {-0.906179845938664, -0.5384693101056831, 0.0, 0.5384693101056831,
                           0.906179845938664};
const double kGlWeight[5] = {0.23692688505618908, 0.47862867049936647, 0.5688888888888889,
                             0.47862867049936647, 0.23692688505618908};

double lambda_at(const Expression& lambda, double a) {
    double v = lambda.eval_age(a);
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "recovery rate is not finite at age " << a;
        throw EvalError(os.str());
    }
    return v;
}

} // namespace

AgeDensity::AgeDensity(const Grid& g, double da, int cohorts) : grid_(&g), da_(da) {
    if (!(da > 0.0)) throw SimError("age grid: cohort width must be positive");
    if (cohorts < 1) throw SimError("age grid: need at least one cohort");
    if (cohorts > kMaxCohorts) throw SimError("age grid: cohort count exceeds the 1e5 cap");
    cohorts_.reserve(static_cast<size_t>(cohorts));
    for (int j = 0; j < cohorts; ++j) cohorts_.emplace_back(g, Mask::Omega, 0.0);
}

double survival_factor(const Expression& lambda, double a_lo, double a_hi) {
    if (!(a_hi >= a_lo)) throw SimError("survival_factor: backwards age interval");
    const double mid = 0.5 * (a_lo + a_hi), half = 0.5 * (a_hi - a_lo);
    double q = 0.0;
    for (int k = 0; k < 5; ++k) q += kGlWeight[k] * lambda_at(lambda, mid + half * kGlNode[k]);
    return std::exp(-half * q);
}

SurvivalTable build_survival(const Expression& lambda, double da, int cohorts) {
    SurvivalTable t;
    t.da = da;
    t.s.resize(static_cast<size_t>(cohorts));
    for (int j = 0; j < cohorts; ++j)
        t.s[static_cast<size_t>(j)] = survival_factor(lambda, j * da, (j + 1) * da);
    return t;
}

AgeGridSelection select_age_grid(const Expression& lambda, double dt,
                                 std::optional<double> explicit_a_max) {
    if (!(dt > 0.0)) throw SimError("age grid: dt must be positive");

    auto interval_min = [&](int j) {
        const double a_lo = j * dt, a_hi = (j + 1) * dt;
        const double mid = 0.5 * (a_lo + a_hi), half = 0.5 * (a_hi - a_lo);
        double m = std::min(lambda_at(lambda, a_lo), lambda_at(lambda, a_hi));
        for (int k = 0; k < 5; ++k) m = std::min(m, lambda_at(lambda, mid + half * kGlNode[k]));
        return m;
    };

    AgeGridSelection sel;
    if (explicit_a_max) {
        if (!(*explicit_a_max > 0.0)) throw SimError("age grid: a_max must be positive");
        int J = static_cast<int>(std::ceil(*explicit_a_max / dt - 1e-9));
        if (J < 1) J = 1;
        if (J > kMaxCohorts) throw SimError("age grid: a_max implies more than 1e5 cohorts");
        double lam_min = interval_min(0);
        for (int j = 1; j < J; ++j) lam_min = std::min(lam_min, interval_min(j));
        sel.cohorts = J;
        sel.a_max = J * dt;
        sel.lambda_star = lam_min - 1e-12;
        return sel;
    }

    double lam_min = 0.0;
    for (int J = 1; J <= kMaxCohorts; ++J) {
        double im = interval_min(J - 1);
        lam_min = J == 1 ? im : std::min(lam_min, im);
        if (lam_min > 0.0 && lam_min * (J * dt) >= kTailLog) {
            sel.cohorts = J;
            sel.a_max = J * dt;
            sel.lambda_star = lam_min - 1e-12;
            return sel;
        }
    }
    throw SimError(
        "age grid: automatic a_max selection exceeded 1e5 cohorts; the recovery rate has no "
        "usable positive floor, give an explicit a_max");
}

AgeDensity seed_initial(const Expression& z0, const ScalarField& k, const Grid& g, double da,
                        int cohorts, bool strict) {
    if (k.mask() != Mask::Omega) throw SimError("seed_initial: seed profile must live on all cells");
    if (z0.uses_x() || z0.uses_y())
        throw SimError("seed_initial: seed age profile must be a function of a only");

    AgeDensity id(g, da, cohorts);
    if (strict) {
        double at0 = z0.eval_age(0.0);
        if (at0 != 0.0) {
            std::ostringstream os;
            os << "seed age profile must vanish at age 0, got " << at0;
            throw SimError(os.str());
        }
    }
    for (int j = 0; j < cohorts; ++j) {
        double zj = z0.eval_age(id.age_center(j));
        if (!std::isfinite(zj)) {
            std::ostringstream os;
            os << "seed age profile is not finite at age " << id.age_center(j);
            throw SimError(os.str());
        }
        if (strict && zj < 0.0) {
            std::ostringstream os;
            os << "seed age profile is negative (" << zj << ") at age " << id.age_center(j);
            throw SimError(os.str());
        }
        ScalarField& c = id.cohort(j);
        for (int cell = 0; cell < g.cell_count(); ++cell) c[cell] = zj * k[cell];
    }
    return id;
}

ScalarField integrate_age(const AgeDensity& i) { return integrate_age_from_index(i, 0); }

ScalarField integrate_age_from_index(const AgeDensity& i, int q_index) {
    if (q_index < 0 || q_index >= i.cohort_count())
        throw SimError("age integral: cohort cut is outside the age grid");
    const Grid& g = i.grid();
    ScalarField acc(g, Mask::Omega, 0.0);
    for (int j = q_index; j < i.cohort_count(); ++j) {
        const ScalarField& c = i.cohort(j);
        for (int cell = 0; cell < g.cell_count(); ++cell) acc[cell] += c[cell];
    }
    const double da = i.da();
    for (int cell = 0; cell < g.cell_count(); ++cell) acc[cell] *= da;
    return acc;
}

ScalarField integrate_age_from(const AgeDensity& i, double tau) {
    if (tau < 0.0) throw SimError("age integral: tau must be nonnegative");
    if (tau >= i.a_max()) throw SimError("age integral: tau is at or beyond the age-grid extent");
    const int q = static_cast<int>(std::floor(tau / i.da() + 0.5));
    if (std::abs(q * i.da() - tau) > 1e-9 * std::max(1.0, tau))
        throw SimError("age integral: tau is not a multiple of the cohort width");
    return integrate_age_from_index(i, q);
}

AgeStepLedger age_step(AgeDensity& i, const std::function<ScalarField(const ScalarField&)>& diffusion_step,
                       const SurvivalTable& survival, const ScalarField& birth_field) {
    const int J = i.cohort_count();
    if (static_cast<int>(survival.s.size()) < J)
        throw SimError("age_step: survival table shorter than the cohort count");
    if (birth_field.mask() != Mask::Omega)
        throw SimError("age_step: birth field must live on all cells");

    AgeStepLedger led;
    const double da = i.da();
    for (int j = 0; j < J - 1; ++j)
        led.removal += (1.0 - survival.s[static_cast<size_t>(j)]) * da * integrate(i.cohort(j));
    led.truncation = da * integrate(i.cohort(J - 1));

    // Aging in place, oldest first: slot j+1 is rewritten from slot j before
    // slot j itself is touched.
    for (int j = J - 2; j >= 0; --j) {
        ScalarField moved = diffusion_step(i.cohort(j));
        const double s = survival.s[static_cast<size_t>(j)];
        for (int cell = 0; cell < moved.size(); ++cell) moved[cell] *= s;
        i.cohort(j + 1) = std::move(moved);
    }
    i.cohort(0) = birth_field;
    return led;
}

} // namespace vecthost
