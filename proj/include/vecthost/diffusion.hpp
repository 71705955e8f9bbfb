#ifndef VECTHOST_DIFFUSION_HPP
#define VECTHOST_DIFFUSION_HPP

#include "vecthost/grid.hpp"

namespace vecthost {

struct SolveStats {
    int iterations = 0;
    double rel_residual = 0.0;
};

/// Discrete no-flux diffusion operator L ~ div(d grad .) on the active cells
/// of a mask. Face conductances are harmonic means of the two cell values
/// over h^2; faces on the mask boundary carry no flux. The matrix is
/// symmetric with zero row sums.
class DiffusionOperator {
public:
    /// Requires d > 0 on every active cell unless allow_zero is set
    /// (degenerate runs use d == 0 to switch diffusion off).
    static DiffusionOperator assemble(const Grid& g, Mask m, const ScalarField& d,
                                      bool allow_zero = false);

    void apply(const double* w, double* out) const;
    ScalarField apply(const ScalarField& w) const;

    int size() const { return static_cast<int>(diag_.size()); }
    Mask mask() const { return mask_; }
    const Grid& grid() const { return *grid_; }

    /// Sum of the face conductances of row i (= -diagonal entry).
    double conductance_sum(int i) const { return -diag_[static_cast<size_t>(i)]; }

private:
    friend ScalarField solve_spd(const DiffusionOperator&, double, const ScalarField*,
                                 const ScalarField&, double, SolveStats*);
    const Grid* grid_ = nullptr;
    Mask mask_ = Mask::Omega;
    // Per active cell: neighbor compact indices (self when the face is closed)
    // and face conductances (zero when closed).
    std::vector<int> nb_[4];
    std::vector<double> g_[4];
    std::vector<double> diag_;
};

/// Solve (I - dt*L + dt*diag(sink)) x = rhs by preconditioned conjugate
/// gradients (Jacobi preconditioner, fixed sweep order, deterministic).
/// Convergence: ||r||_2 <= tol * ||rhs||_2. sink may be null (no zero-order
/// term); it must be nonnegative.
ScalarField solve_spd(const DiffusionOperator& L, double dt, const ScalarField* sink,
                      const ScalarField& rhs, double tol = 1e-10, SolveStats* stats = nullptr);

/// One backward Euler step of w' = Lw - sink*w, i.e. solve_spd with rhs = w.
ScalarField step_backward_euler(const DiffusionOperator& L, const ScalarField& w, double dt,
                                const ScalarField* sink = nullptr, double tol = 1e-10,
                                SolveStats* stats = nullptr);

} // namespace vecthost

#endif
