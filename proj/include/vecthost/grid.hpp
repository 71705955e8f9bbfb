#ifndef VECTHOST_GRID_HPP
#define VECTHOST_GRID_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vecthost {

/// Error type for all user-facing failures (bad input, violated preconditions).
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Which cell set a field lives on: the full habitat or the vector habitat.
enum class Mask { Omega, Star };

/// Axis-aligned rectangle given by two corners, x0 <= x1, y0 <= y1.
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

/// Cell-centered finite-volume grid on [0,Lx]x[0,Ly] with square cells and
/// two nested sub-habitats: the vector habitat (star) which must be strictly
/// interior, and the seed region (starstar).
class Grid {
public:
    static Grid build(double Lx, double Ly, int nx, int ny, Rect star, Rect starstar);

    double Lx() const { return Lx_; }
    double Ly() const { return Ly_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double h() const { return h_; }

    int cell_count() const { return nx_ * ny_; }
    int star_count() const { return static_cast<int>(star_cells_.size()); }
    int starstar_count() const { return starstar_count_; }
    int count(Mask m) const { return m == Mask::Omega ? cell_count() : star_count(); }

    int cell_id(int ix, int iy) const { return iy * nx_ + ix; }
    int ix_of(int cell) const { return cell % nx_; }
    int iy_of(int cell) const { return cell / nx_; }
    double cx(int ix) const { return (ix + 0.5) * h_; }
    double cy(int iy) const { return (iy + 0.5) * h_; }

    bool in_star(int cell) const { return star_index_[cell] >= 0; }
    bool in_starstar(int cell) const { return starstar_mask_[cell] != 0; }

    /// Compact index of a cell within the star ordering, -1 if outside.
    int star_index_of(int cell) const { return star_index_[cell]; }
    /// Cell ids of the star cells in row-major scan order.
    const std::vector<int>& star_cells() const { return star_cells_; }

    /// Cell ids of the active cells of a mask, in row-major scan order.
    std::vector<int> active_cells(Mask m) const;

private:
    double Lx_ = 0, Ly_ = 0, h_ = 0;
    int nx_ = 0, ny_ = 0;
    std::vector<int> star_index_;        // per cell, -1 outside
    std::vector<int> star_cells_;        // compact -> cell id
    std::vector<std::uint8_t> starstar_mask_;
    int starstar_count_ = 0;
};

/// One real value per active cell of a mask. Values outside the mask do not
/// exist in the representation at all.
class ScalarField {
public:
    ScalarField(const Grid& g, Mask m, double fill = 0.0)
        : grid_(&g), mask_(m), v_(static_cast<size_t>(g.count(m)), fill) {}

    const Grid& grid() const { return *grid_; }
    Mask mask() const { return mask_; }
    int size() const { return static_cast<int>(v_.size()); }

    double& operator[](int i) { return v_[static_cast<size_t>(i)]; }
    double operator[](int i) const { return v_[static_cast<size_t>(i)]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    double max_abs() const;
    double min_value() const;

private:
    const Grid* grid_;
    Mask mask_;
    std::vector<double> v_;
};

/// Midpoint-rule integral h^2 * sum over the field's active cells.
double integrate(const ScalarField& f);
/// Same, but checks the field is tagged with the expected mask.
double integrate(const ScalarField& f, Mask expect);

/// Embed a star field into an Omega field, writing `fill` outside the star.
ScalarField extend_to_omega(const ScalarField& star_field, double fill);
/// Read an Omega field at the star cells.
ScalarField restrict_to_star(const ScalarField& omega_field);

} // namespace vecthost

#endif
