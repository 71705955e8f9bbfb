#include "vecthost/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vecthost {

namespace {

const double kFloorMargin = 1e-12;

double field_min(const ScalarField& f) {
    double m = f.size() > 0 ? f[0] : 0.0;
    for (int i = 0; i < f.size(); ++i) m = std::min(m, f[i]);
    return m;
}

double field_max(const ScalarField& f) {
    double m = f.size() > 0 ? f[0] : 0.0;
    for (int i = 0; i < f.size(); ++i) m = std::max(m, f[i]);
    return m;
}

} // namespace

double CoefficientSet::beta_sup() const { return field_max(beta); }
double CoefficientSet::sigma2_sup() const { return field_max(sigma2); }

CoefficientSet build_coefficients(const Expression& d1, const Expression& d2,
                                  const Expression& beta, const Expression& m,
                                  const Expression& sigma1, const Expression& sigma2,
                                  const Expression& lambda, const Grid& g) {
    CoefficientSet c{
        evaluate_field(d1, g, Mask::Star),
        evaluate_field(d2, g, Mask::Omega),
        evaluate_field(beta, g, Mask::Star),
        evaluate_field(m, g, Mask::Star),
        evaluate_field(sigma1, g, Mask::Star),
        evaluate_field(sigma2, g, Mask::Star),
        lambda,
    };
    c.d_star = std::min(field_min(c.d1), field_min(c.d2)) - kFloorMargin;
    c.m_star = field_min(c.m) - kFloorMargin;
    c.beta_star = field_min(c.beta) - kFloorMargin;
    c.lambda_star = 0.0; // filled in by the age-grid selection
    return c;
}

ScalarField clip_to_starstar(const ScalarField& f, const Grid& g) {
    if (f.mask() != Mask::Omega) throw SimError("clip_to_starstar: field must live on all cells");
    ScalarField out = f;
    for (int c = 0; c < g.cell_count(); ++c)
        if (!g.in_starstar(c)) out[c] = 0.0;
    return out;
}

ScalarField normalize_k(const ScalarField& raw_k, const Grid& g) {
    if (raw_k.mask() != Mask::Omega) throw SimError("normalize_k: field must live on all cells");
    for (int c = 0; c < g.cell_count(); ++c) {
        if (raw_k[c] < 0.0) {
            std::ostringstream os;
            os << "normalize_k: negative value " << raw_k[c] << " at cell (" << g.ix_of(c) << ","
               << g.iy_of(c) << ")";
            throw SimError(os.str());
        }
        if (raw_k[c] != 0.0 && !g.in_starstar(c)) {
            std::ostringstream os;
            os << "normalize_k: nonzero value outside the seed region at cell (" << g.ix_of(c)
               << "," << g.iy_of(c) << ")";
            throw SimError(os.str());
        }
    }
    const double total = integrate(raw_k);
    if (total <= 0.0) throw SimError("normalize_k: seed profile is identically zero");
    ScalarField out = raw_k;
    for (int c = 0; c < g.cell_count(); ++c) out[c] = raw_k[c] / total;
    return out;
}

bool AssumptionReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string AssumptionReport::summary() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& c : checks) {
        if (c.pass) continue;
        if (!first) os << "; ";
        os << c.id << ": " << c.detail;
        first = false;
    }
    return first ? std::string("all assumptions hold") : os.str();
}

AssumptionReport validate_assumptions(const CoefficientSet& c, const Grid& g,
                                      const InitialData& init) {
    AssumptionReport rep;
    auto add = [&rep](const std::string& id, bool pass, const std::string& detail) {
        rep.checks.push_back({id, pass, pass ? "" : detail});
    };

    {
        std::ostringstream os;
        os << "diffusivity floor " << c.d_star << " is not positive";
        add("A0", c.d_star > 0.0, os.str());
    }
    {
        bool nonneg = true, nontrivial = false, finite = true;
        for (double z : init.z0_samples) {
            if (z < 0.0) nonneg = false;
            if (z > 0.0) nontrivial = true;
            if (!std::isfinite(z)) finite = false;
        }
        bool zero_at_zero = init.z0_at_zero == 0.0;
        std::string detail;
        if (!finite) detail = "seed age profile has non-finite samples";
        else if (!nonneg) detail = "seed age profile is negative somewhere";
        else if (!nontrivial) detail = "seed age profile is identically zero";
        else if (!zero_at_zero) detail = "seed age profile must vanish at age 0";
        add("A1", finite && nonneg && nontrivial && zero_at_zero, detail);
    }
    {
        bool nonneg = true, supported = true;
        double total = 0.0;
        for (int cell = 0; cell < g.cell_count(); ++cell) {
            if (init.k[cell] < 0.0) nonneg = false;
            if (init.k[cell] != 0.0 && !g.in_starstar(cell)) supported = false;
        }
        total = integrate(init.k);
        bool unit = std::abs(total - 1.0) <= 1e-12;
        std::string detail;
        if (!nonneg) detail = "seed profile is negative somewhere";
        else if (!supported) detail = "seed profile has support outside the seed region";
        else if (!unit) {
            std::ostringstream os;
            os << "seed profile integrates to " << total << ", not 1";
            detail = os.str();
        }
        add("A2", nonneg && supported && unit, detail);
    }
    {
        double s1 = field_min(c.sigma1), s2 = field_min(c.sigma2);
        std::ostringstream os;
        os << "transmission coefficients must be positive (min sigma1 = " << s1
           << ", min sigma2 = " << s2 << ")";
        add("A3", s1 > 0.0 && s2 > 0.0, os.str());
    }
    {
        std::ostringstream os;
        os << "vector reaction floors must be positive (m floor = " << c.m_star
           << ", beta floor = " << c.beta_star << ")";
        add("A4", c.m_star > 0.0 && c.beta_star > 0.0, os.str());
    }
    {
        std::ostringstream os;
        os << "recovery rate floor " << c.lambda_star << " is not positive";
        add("A5", c.lambda_star > 0.0, os.str());
    }
    {
        bool u_ok = field_min(init.u0) >= 0.0 && field_max(init.u0) > 0.0;
        bool phi_ok = field_min(init.phi0) >= 0.0 && field_max(init.phi0) > 0.0;
        std::string detail;
        if (!u_ok) detail = "initial hosts must be nonnegative and not identically zero";
        else if (!phi_ok) detail = "initial vectors must be nonnegative and not identically zero";
        add("A6", u_ok && phi_ok, detail);
    }
    return rep;
}

} // namespace vecthost
