#ifndef HELIX_ELLIPTIC_HPP
#define HELIX_ELLIPTIC_HPP

#include <functional>
#include <memory>

#include "helix/coeff_field.hpp"
#include "helix/grid.hpp"

namespace helix {

// Discrete -div(K(x) grad .) on the grid with zero Dirichlet data on the
// square boundary. Flux-form assembly cell by cell with K frozen at cell
// centers; the assembled stencil is symmetric and positive definite on the
// interior unknowns. Solves use conjugate gradients preconditioned by the
// exact inverse of the constant-coefficient operator (fast sine transform).
class EllipticOperator {
  public:
    EllipticOperator(const Grid& grid, const CoefficientField& field);
    ~EllipticOperator();
    EllipticOperator(const EllipticOperator&) = delete;
    EllipticOperator& operator=(const EllipticOperator&) = delete;

    const Grid& grid() const { return grid_; }

    // y = A u over all nodes (boundary rows carry their partial stencils).
    void apply_full(const std::vector<double>& u, std::vector<double>& out) const;

    // Energy of the bilinear form: 1/2 int K grad u . grad u (exact for the
    // assembled form).
    double energy(const std::vector<double>& u) const;

    struct SolveStats {
        int iterations = 0;
        double relative_residual = 0.0;
    };

    // Solves A u = b for the interior unknowns with u = g on the boundary
    // (g = nullptr means zero). b holds interior entries of the load vector;
    // boundary entries of b are ignored. The initial guess is read from u.
    SolveStats solve(const std::vector<double>& b, std::vector<double>& u,
                     const std::vector<double>* g = nullptr, double rel_tol = 1e-10,
                     int max_iter = 20000) const;

    // Load vector of a unit Dirac at the cell containing y: uniform density
    // 1/area on that cell. Returns the effective source point (the cell
    // center) through y_eff.
    std::vector<double> dirac_load(Vec2 y, Vec2* y_eff = nullptr) const;

    // Load vector of a scalar density f: per-cell 2x2 Gauss quadrature.
    std::vector<double> function_load(const std::function<double(Vec2)>& f) const;

    // Load vector of div(F) in weak form: b_i = -int F . grad phi_i.
    std::vector<double> divergence_load(const std::function<Vec2(Vec2)>& F) const;

    // Solves the symmetric (possibly indefinite) bordered system
    //   [ A - diag(shift)   Q ] [u]   [b]
    //   [ Q^T               0 ] [c] = [0]
    // by preconditioned MINRES. Q holds zero or more constraint columns
    // (full-size fields); with none this is a plain shifted solve. shift and
    // b boundary entries are ignored; u keeps zero boundary data.
    SolveStats solve_shifted(const std::vector<double>& shift, const std::vector<double>& b,
                             std::vector<double>& u, double rel_tol = 1e-10,
                             int max_iter = 20000,
                             const std::vector<std::vector<double>>* border = nullptr,
                             std::vector<double>* multipliers = nullptr) const;

  private:
    Grid grid_;
    // 9 stencil planes indexed by (dj+1)*3 + (di+1).
    std::vector<std::vector<double>> stencil_;
    std::vector<double> symbol_;  // preconditioner eigenvalues, interior modes
    struct DstPlan;
    std::unique_ptr<DstPlan> dst_;

    void precondition(const std::vector<double>& r, std::vector<double>& z) const;
    void apply_interior(const std::vector<double>& u, std::vector<double>& out) const;
};

}  // namespace helix

#endif
