#include "vecthost/grid.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace vecthost {

namespace {

bool rect_valid(const Rect& r) { return r.x0 <= r.x1 && r.y0 <= r.y1; }

// A cell belongs to a rectangle iff its center does (closed membership).
bool center_in(const Rect& r, double x, double y) {
    return x >= r.x0 && x <= r.x1 && y >= r.y0 && y <= r.y1;
}

} // namespace

Grid Grid::build(double Lx, double Ly, int nx, int ny, Rect star, Rect starstar) {
    if (!(Lx > 0.0) || !(Ly > 0.0))
        throw SimError("grid: domain lengths must be positive");
    if (nx < 3 || ny < 3)
        throw SimError("grid: need nx >= 3 and ny >= 3");
    double hx = Lx / nx, hy = Ly / ny;
    if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy))
        throw SimError("grid: cells must be square (Lx/nx != Ly/ny)");
    if (!rect_valid(star) || !rect_valid(starstar))
        throw SimError("grid: rectangle corners must satisfy x0 <= x1, y0 <= y1");

    Grid g;
    g.Lx_ = Lx;
    g.Ly_ = Ly;
    g.nx_ = nx;
    g.ny_ = ny;
    g.h_ = hx;
    g.star_index_.assign(static_cast<size_t>(nx) * ny, -1);
    g.starstar_mask_.assign(static_cast<size_t>(nx) * ny, 0);

    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            int c = g.cell_id(ix, iy);
            double x = g.cx(ix), y = g.cy(iy);
            if (center_in(star, x, y)) {
                if (ix == 0 || ix == nx - 1 || iy == 0 || iy == ny - 1) {
                    std::ostringstream os;
                    os << "grid: vector habitat touches the outer boundary at cell ("
                       << ix << "," << iy << "); it must be strictly interior";
                    throw SimError(os.str());
                }
                g.star_index_[c] = static_cast<int>(g.star_cells_.size());
                g.star_cells_.push_back(c);
            }
            if (center_in(starstar, x, y)) {
                g.starstar_mask_[c] = 1;
                ++g.starstar_count_;
            }
        }
    }

    if (g.star_cells_.empty())
        throw SimError("grid: vector habitat contains no cell centers");
    if (g.starstar_count_ == 0)
        throw SimError("grid: seed region contains no cell centers");
    if (g.starstar_count_ >= g.cell_count())
        throw SimError("grid: seed region must be strictly smaller than the domain");
    for (int c = 0; c < g.cell_count(); ++c)
        if (g.starstar_mask_[static_cast<size_t>(c)] && g.star_index_[static_cast<size_t>(c)] < 0) {
            std::ostringstream os;
            os << "grid: seed cell (" << g.ix_of(c) << "," << g.iy_of(c)
               << ") lies outside the vector habitat";
            throw SimError(os.str());
        }

    // The star cells must form one 4-connected component.
    {
        std::vector<std::uint8_t> seen(g.star_cells_.size(), 0);
        std::queue<int> q;
        q.push(g.star_cells_[0]);
        seen[0] = 1;
        int reached = 1;
        while (!q.empty()) {
            int c = q.front();
            q.pop();
            int ix = g.ix_of(c), iy = g.iy_of(c);
            const int nb[4] = {
                ix > 0 ? g.cell_id(ix - 1, iy) : -1,
                ix < nx - 1 ? g.cell_id(ix + 1, iy) : -1,
                iy > 0 ? g.cell_id(ix, iy - 1) : -1,
                iy < ny - 1 ? g.cell_id(ix, iy + 1) : -1,
            };
            for (int k = 0; k < 4; ++k) {
                if (nb[k] < 0) continue;
                int si = g.star_index_[nb[k]];
                if (si >= 0 && !seen[si]) {
                    seen[si] = 1;
                    ++reached;
                    q.push(nb[k]);
                }
            }
        }
        if (reached != g.star_count())
            throw SimError("grid: vector habitat cells are not connected");
    }

    return g;
}

std::vector<int> Grid::active_cells(Mask m) const {
    if (m == Mask::Star) return star_cells_;
    std::vector<int> all(static_cast<size_t>(cell_count()));
    for (int c = 0; c < cell_count(); ++c) all[static_cast<size_t>(c)] = c;
    return all;
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

double ScalarField::min_value() const {
    double m = v_.empty() ? 0.0 : v_[0];
    for (double x : v_) m = std::min(m, x);
    return m;
}

double integrate(const ScalarField& f) {
    const double h2 = f.grid().h() * f.grid().h();
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) s += f[i];
    return h2 * s;
}

double integrate(const ScalarField& f, Mask expect) {
    if (f.mask() != expect)
        throw SimError("integrate: field mask does not match the requested mask");
    return integrate(f);
}

ScalarField extend_to_omega(const ScalarField& star_field, double fill) {
    if (star_field.mask() != Mask::Star)
        throw SimError("extend_to_omega: field is not a star field");
    const Grid& g = star_field.grid();
    ScalarField out(g, Mask::Omega, fill);
    const auto& cells = g.star_cells();
    for (int i = 0; i < star_field.size(); ++i) out[cells[static_cast<size_t>(i)]] = star_field[i];
    return out;
}

ScalarField restrict_to_star(const ScalarField& omega_field) {
    if (omega_field.mask() != Mask::Omega)
        throw SimError("restrict_to_star: field is not an omega field");
    const Grid& g = omega_field.grid();
    ScalarField out(g, Mask::Star);
    const auto& cells = g.star_cells();
    for (size_t i = 0; i < cells.size(); ++i) out[static_cast<int>(i)] = omega_field[cells[i]];
    return out;
}

} // namespace vecthost
