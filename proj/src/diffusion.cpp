#include "vecthost/diffusion.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace vecthost {

DiffusionOperator DiffusionOperator::assemble(const Grid& g, Mask m, const ScalarField& d,
                                              bool allow_zero) {
    if (d.mask() != m) throw SimError("assemble: diffusivity mask does not match operator mask");
    for (int i = 0; i < d.size(); ++i) {
        if (!(d[i] > 0.0) && !(allow_zero && d[i] == 0.0)) {
            std::ostringstream os;
            os << "assemble: diffusivity must be positive, got " << d[i] << " at active cell " << i;
            throw SimError(os.str());
        }
    }

    DiffusionOperator op;
    op.grid_ = &g;
    op.mask_ = m;
    const int n = g.count(m);
    for (auto& v : op.nb_) v.assign(static_cast<size_t>(n), 0);
    for (auto& v : op.g_) v.assign(static_cast<size_t>(n), 0.0);
    op.diag_.assign(static_cast<size_t>(n), 0.0);

    const auto cells = g.active_cells(m);
    // Compact index per cell for this mask.
    std::vector<int> compact(static_cast<size_t>(g.cell_count()), -1);
    for (size_t i = 0; i < cells.size(); ++i) compact[static_cast<size_t>(cells[i])] = static_cast<int>(i);

    const double inv_h2 = 1.0 / (g.h() * g.h());
    for (size_t i = 0; i < cells.size(); ++i) {
        const int c = cells[i];
        const int ix = g.ix_of(c), iy = g.iy_of(c);
        const int nbcell[4] = {
            ix > 0 ? g.cell_id(ix - 1, iy) : -1,
            ix < g.nx() - 1 ? g.cell_id(ix + 1, iy) : -1,
            iy > 0 ? g.cell_id(ix, iy - 1) : -1,
            iy < g.ny() - 1 ? g.cell_id(ix, iy + 1) : -1,
        };
        for (int k = 0; k < 4; ++k) {
            int j = nbcell[k] >= 0 ? compact[static_cast<size_t>(nbcell[k])] : -1;
            if (j < 0) {
                // Closed face: neighbor index points at self with zero weight.
                op.nb_[k][i] = static_cast<int>(i);
                op.g_[k][i] = 0.0;
                continue;
            }
            const double dl = d[static_cast<int>(i)], dr = d[j];
            const double sum = dl + dr;
            const double hm = sum > 0.0 ? 2.0 * dl * dr / sum : 0.0;
            op.nb_[k][i] = j;
            op.g_[k][i] = hm * inv_h2;
            op.diag_[i] -= hm * inv_h2;
        }
    }
    return op;
}

void DiffusionOperator::apply(const double* w, double* out) const {
    const int n = size();
    const int* nw = nb_[0].data();
    const int* ne = nb_[1].data();
    const int* ns = nb_[2].data();
    const int* nn = nb_[3].data();
    const double* gw = g_[0].data();
    const double* ge = g_[1].data();
    const double* gs = g_[2].data();
    const double* gn = g_[3].data();
    const double* dg = diag_.data();
    for (int i = 0; i < n; ++i) {
        out[i] = gw[i] * w[nw[i]] + ge[i] * w[ne[i]] + gs[i] * w[ns[i]] + gn[i] * w[nn[i]] +
                 dg[i] * w[i];
    }
}

ScalarField DiffusionOperator::apply(const ScalarField& w) const {
    if (w.mask() != mask_ || w.size() != size())
        throw SimError("apply: field does not match operator mask");
    ScalarField out(*grid_, mask_);
    apply(w.data(), out.data());
    return out;
}

ScalarField solve_spd(const DiffusionOperator& L, double dt, const ScalarField* sink,
                      const ScalarField& rhs, double tol, SolveStats* stats) {
    if (rhs.mask() != L.mask() || rhs.size() != L.size())
        throw SimError("solve_spd: rhs does not match operator mask");
    if (sink && (sink->mask() != L.mask() || sink->size() != L.size()))
        throw SimError("solve_spd: sink does not match operator mask");
    if (!(dt >= 0.0)) throw SimError("solve_spd: dt must be nonnegative");
    const int n = L.size();

    // System matrix A = I - dt*L + dt*diag(sink); SPD since L has zero row
    // sums, nonpositive diagonal and sink >= 0.
    auto apply_A = [&](const double* x, double* out) {
        L.apply(x, out);
        if (sink) {
            const double* s = sink->data();
            for (int i = 0; i < n; ++i) out[i] = x[i] - dt * out[i] + dt * s[i] * x[i];
        } else {
            for (int i = 0; i < n; ++i) out[i] = x[i] - dt * out[i];
        }
    };

    ScalarField x(rhs.grid(), rhs.mask());
    if (stats) *stats = SolveStats{};
    const double ma = rhs.max_abs();
    if (ma == 0.0) return x; // zero rhs -> zero solution

    // Fields this small are pure round-off tails; their squares underflow, so
    // solving changes nothing representable. Pass them through.
    if (ma <= 1e-290) {
        for (int i = 0; i < n; ++i) x[i] = rhs[i];
        return x;
    }

    double nb2 = 0.0;
    for (int i = 0; i < n; ++i) nb2 += rhs[i] * rhs[i];
    const double norm_b = std::sqrt(nb2);

    std::vector<double> r(static_cast<size_t>(n)), z(static_cast<size_t>(n)),
        p(static_cast<size_t>(n)), Ap(static_cast<size_t>(n)), minv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double diag = 1.0 + dt * L.conductance_sum(i);
        if (sink) diag += dt * (*sink)[i];
        minv[static_cast<size_t>(i)] = 1.0 / diag;
    }

    // Start from x0 = rhs; for smooth data this is already close.
    for (int i = 0; i < n; ++i) x[i] = rhs[i];
    apply_A(x.data(), Ap.data());
    for (int i = 0; i < n; ++i) r[static_cast<size_t>(i)] = rhs[i] - Ap[static_cast<size_t>(i)];

    const double target = tol * norm_b;
    double rr = 0.0;
    for (int i = 0; i < n; ++i) rr += r[static_cast<size_t>(i)] * r[static_cast<size_t>(i)];

    double rz = 0.0;
    for (int i = 0; i < n; ++i) {
        z[static_cast<size_t>(i)] = r[static_cast<size_t>(i)] * minv[static_cast<size_t>(i)];
        rz += r[static_cast<size_t>(i)] * z[static_cast<size_t>(i)];
    }
    p = z;

    const int max_iter = 40 * n + 200;
    int it = 0;
    double best = std::sqrt(rr);
    int since_best = 0;
    while (std::sqrt(rr) > target) {
        if (it >= max_iter) {
            std::ostringstream os;
            os << "solve_spd: no convergence after " << it << " iterations, rel residual "
               << std::sqrt(rr) / norm_b;
            throw SimError(os.str());
        }
        apply_A(p.data(), Ap.data());
        double pAp = 0.0;
        for (int i = 0; i < n; ++i) pAp += p[static_cast<size_t>(i)] * Ap[static_cast<size_t>(i)];
        if (!(pAp > 0.0)) break; // exhausted ~machine precision
        const double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) x[i] += alpha * p[static_cast<size_t>(i)];
        for (int i = 0; i < n; ++i) r[static_cast<size_t>(i)] -= alpha * Ap[static_cast<size_t>(i)];
        ++it;
        // Periodically recompute the true residual to stop recurrence drift.
        if (it % 50 == 0) {
            apply_A(x.data(), Ap.data());
            for (int i = 0; i < n; ++i)
                r[static_cast<size_t>(i)] = rhs[i] - Ap[static_cast<size_t>(i)];
        }
        rr = 0.0;
        for (int i = 0; i < n; ++i) rr += r[static_cast<size_t>(i)] * r[static_cast<size_t>(i)];
        double rn = std::sqrt(rr);
        if (rn < best * 0.999999) {
            best = rn;
            since_best = 0;
        } else if (++since_best > 60) {
            // Stagnated at round-off level; accept only if reasonably close.
            if (best <= 100.0 * target) break;
            std::ostringstream os;
            os << "solve_spd: stagnation at rel residual " << rn / norm_b;
            throw SimError(os.str());
        }
        double rz_new = 0.0;
        for (int i = 0; i < n; ++i) {
            z[static_cast<size_t>(i)] = r[static_cast<size_t>(i)] * minv[static_cast<size_t>(i)];
            rz_new += r[static_cast<size_t>(i)] * z[static_cast<size_t>(i)];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i)
            p[static_cast<size_t>(i)] = z[static_cast<size_t>(i)] + beta * p[static_cast<size_t>(i)];
    }
    if (stats) {
        stats->iterations = it;
        stats->rel_residual = std::sqrt(rr) / norm_b;
    }
    return x;
}

ScalarField step_backward_euler(const DiffusionOperator& L, const ScalarField& w, double dt,
                                const ScalarField* sink, double tol, SolveStats* stats) {
    return solve_spd(L, dt, sink, w, tol, stats);
}

} // namespace vecthost
