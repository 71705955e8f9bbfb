#include "doctest.h"

#include "vecthost/diffusion.hpp"
#include "vecthost/expression.hpp"
#include "vecthost/oracle.hpp"

#include <cmath>
#include <vector>

using namespace vecthost;

namespace {
Grid tiny() {
    return Grid::build(0.3, 0.3, 3, 3, Rect{0.1, 0.1, 0.2, 0.2}, Rect{0.1, 0.1, 0.2, 0.2});
}

ScalarField constant(const Grid& g, double v) { return ScalarField(g, Mask::Omega, v); }
} // namespace

TEST_CASE("closed-form logistic solution") {
    CHECK(logistic_exact(1.0, 2.0, 1.0, 0.0) == 1.0);
    CHECK(logistic_exact(2.0, 2.0, 1.0, 0.7) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(logistic_exact(1.0, 2.0, 1.0, 1.0) ==
          doctest::Approx(1.7615941559557646).epsilon(1e-15));
    CHECK(logistic_exact(0.5, 2.0, 1.0, 50.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(logistic_exact(1.0, 0.0, 1.0, 1.0), SimError);
}

TEST_CASE("characteristic representation, identity transport") {
    Grid g = tiny();
    AgeDensity seed(g, 0.1, 4);
    for (int j = 0; j < 4; ++j)
        for (int c = 0; c < g.cell_count(); ++c) seed.cohort(j)[c] = j + 1.0;
    SurvivalTable surv;
    surv.da = 0.1;
    surv.s = {0.9, 0.8, 0.7, 0.6};
    std::vector<ScalarField> births = {constant(g, 10.0), constant(g, 20.0)};
    DiffStep identity = [](const ScalarField& f) { return f; };

    // seed branch: cohort j at step n descends from initial cohort j - n
    ScalarField a = represent_i(identity, surv, seed, births, 2, 3);
    for (int c = 0; c < g.cell_count(); ++c)
        CHECK(a[c] == doctest::Approx(2.0 * 0.8 * 0.7).epsilon(1e-15));
    ScalarField b = represent_i(identity, surv, seed, births, 2, 2);
    for (int c = 0; c < g.cell_count(); ++c)
        CHECK(b[c] == doctest::Approx(1.0 * 0.9 * 0.8).epsilon(1e-15));
    ScalarField untouched = represent_i(identity, surv, seed, births, 0, 2);
    for (int c = 0; c < g.cell_count(); ++c) CHECK(untouched[c] == 3.0);

    // birth branch: cohort j < n comes from the birth field of step n - j
    ScalarField born1 = represent_i(identity, surv, seed, births, 2, 1);
    for (int c = 0; c < g.cell_count(); ++c)
        CHECK(born1[c] == doctest::Approx(10.0 * 0.9).epsilon(1e-15));
    ScalarField born0 = represent_i(identity, surv, seed, births, 2, 0);
    for (int c = 0; c < g.cell_count(); ++c) CHECK(born0[c] == 20.0);

    std::vector<ScalarField> empty;
    CHECK_THROWS_AS(represent_i(identity, surv, seed, empty, 2, 1), SimError);
}

TEST_CASE("characteristic representation matches stepping bitwise") {
    Grid g = tiny();
    const double da = 0.1;
    ScalarField d(g, Mask::Omega, 0.2);
    DiffusionOperator L = DiffusionOperator::assemble(g, Mask::Omega, d);
    DiffStep diffuse = [&](const ScalarField& f) { return step_backward_euler(L, f, da, nullptr, 1e-12); };

    SurvivalTable surv;
    surv.da = da;
    surv.s = {0.95, 0.9, 0.85, 0.8};

    AgeDensity dens(g, da, 4);
    AgeDensity seed(g, da, 4);
    for (int j = 0; j < 4; ++j)
        for (int c = 0; c < g.cell_count(); ++c) {
            double val = 1.0 + 0.3 * j + 0.1 * g.ix_of(c) + 0.05 * g.iy_of(c);
            dens.cohort(j)[c] = val;
            seed.cohort(j)[c] = val;
        }

    std::vector<ScalarField> births;
    for (int n = 1; n <= 3; ++n) {
        ScalarField birth(g, Mask::Omega);
        for (int c = 0; c < g.cell_count(); ++c)
            birth[c] = 0.1 * n + 0.02 * g.ix_of(c);
        age_step(dens, diffuse, surv, birth);
        births.push_back(birth);
    }

    for (int j = 0; j < 4; ++j) {
        ScalarField rep = represent_i(diffuse, surv, seed, births, 3, j);
        for (int c = 0; c < g.cell_count(); ++c) CHECK(rep[c] == dens.cohort(j)[c]);
    }
}

TEST_CASE("infectious integral from the seed branch alone") {
    Grid g = tiny();
    const double da = 0.1;
    ScalarField d(g, Mask::Omega, 0.2);
    DiffusionOperator L = DiffusionOperator::assemble(g, Mask::Omega, d);
    DiffStep diffuse = [&](const ScalarField& f) { return step_backward_euler(L, f, da, nullptr, 1e-12); };
    SurvivalTable surv;
    surv.da = da;
    surv.s = {0.95, 0.9, 0.85, 0.8};

    AgeDensity dens(g, da, 4);
    AgeDensity seed(g, da, 4);
    for (int j = 0; j < 4; ++j)
        for (int c = 0; c < g.cell_count(); ++c) {
            double val = 0.5 + 0.2 * j + 0.1 * g.ix_of(c);
            dens.cohort(j)[c] = val;
            seed.cohort(j)[c] = val;
        }

    const double tau = 0.2; // two cohort widths
    ScalarField at0 = v_tau_first_interval(seed, diffuse, surv, tau, 0);
    ScalarField ref0 = integrate_age_from(dens, tau);
    for (int c = 0; c < g.cell_count(); ++c) CHECK(at0[c] == ref0[c]);

    // births are deliberately large: within t <= tau they must not matter
    for (int n = 1; n <= 2; ++n) {
        ScalarField birth(g, Mask::Omega, 100.0 * n);
        age_step(dens, diffuse, surv, birth);
        ScalarField got = v_tau_first_interval(seed, diffuse, surv, tau, n);
        ScalarField ref = integrate_age_from(dens, tau);
        for (int c = 0; c < g.cell_count(); ++c) CHECK(got[c] == ref[c]);
    }

    CHECK_THROWS_AS(v_tau_first_interval(seed, diffuse, surv, tau, 3), SimError);
    CHECK_THROWS_AS(v_tau_first_interval(seed, diffuse, surv, 0.35, 1), SimError);
}

TEST_CASE("scalar shadow trajectory against an independent computation") {
    OdeParams p;
    p.beta = 2.0;
    p.m = 1.0;
    p.sigma1 = 0.8;
    p.sigma2 = 0.6;
    p.u0 = 1.0;
    p.phi0 = 1.0;
    p.psi0 = 0.1;
    p.seed = {1.0, 1.0};
    p.survival = {0.9, 0.9};
    p.tau_index = 1;

    auto rows = ode_reduction(p, 0.1, 3);
    REQUIRE(rows.size() == 4);

    CHECK(rows[0].rho == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(rows[0].v == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(rows[0].v_tau == doctest::Approx(0.1).epsilon(1e-15));

    // frozen decimals from an independent reimplementation of the recurrence
    CHECK(rows[1].rho == doctest::Approx(1.189189189189189).epsilon(1e-14));
    CHECK(rows[1].phi == doctest::Approx(1.0918918918918918).epsilon(1e-14));
    CHECK(rows[1].psi == doctest::Approx(0.0972972972972973).epsilon(1e-14));
    CHECK(rows[1].u == doctest::Approx(0.9941960447119518).epsilon(1e-14));
    CHECK(rows[1].v == doctest::Approx(0.09580395528804815).epsilon(1e-14));
    CHECK(rows[1].v_tau == doctest::Approx(0.09).epsilon(1e-14));

    CHECK(rows[2].rho == doctest::Approx(1.2753623188405796).epsilon(1e-14));
    CHECK(rows[2].phi == doctest::Approx(1.1813797101449277).epsilon(1e-14));
    CHECK(rows[2].psi == doctest::Approx(0.0939826086956522).epsilon(1e-14));
    CHECK(rows[2].u == doctest::Approx(0.9886212524529026).epsilon(1e-14));
    CHECK(rows[2].v == doctest::Approx(0.01079835201829254).epsilon(1e-14));
    CHECK(rows[2].v_tau == doctest::Approx(0.005223559759243337).epsilon(1e-14));

    CHECK(rows[3].rho == doctest::Approx(1.3573264781491).epsilon(1e-13));
    CHECK(rows[3].phi == doctest::Approx(1.2735364529372888).epsilon(1e-13));
    CHECK(rows[3].psi == doctest::Approx(0.0837900252118115).epsilon(1e-13));
    CHECK(rows[3].u == doctest::Approx(0.9836759186514591).epsilon(1e-13));
    CHECK(rows[3].v == doctest::Approx(0.009962646834587741).epsilon(1e-13));
    CHECK(rows[3].v_tau == doctest::Approx(0.005017313033144284).epsilon(1e-13));
}

TEST_CASE("shadow transfer clamp keeps phi nonnegative") {
    OdeParams p;
    p.beta = 2.0;
    p.m = 1.0;
    p.sigma1 = 1000.0;
    p.sigma2 = 0.6;
    p.u0 = 1.0;
    p.phi0 = 1.0;
    p.psi0 = 0.0;
    p.seed = {5.0, 5.0};
    p.survival = {0.9, 0.9};
    p.tau_index = 0;

    auto rows = ode_reduction(p, 0.1, 2);
    // dt*sigma1*v_tau = 0.1*1000*1.0 >> 1, so the whole phi pool transfers
    const double grow = 0.1 * 2.0 * 1.0;
    const double den = 1.0 + 0.1 * 1.0 * 1.0;
    CHECK(rows[1].phi == doctest::Approx(grow / den).epsilon(1e-14));
    CHECK(rows[1].psi == doctest::Approx((0.0 + 1.0) / den).epsilon(1e-14));
    for (const auto& r : rows) {
        CHECK(r.phi >= 0.0);
        CHECK(r.psi >= 0.0);
    }
}
