#ifndef HELIX_GRID_HPP
#define HELIX_GRID_HPP

#include <string>
#include <vector>

#include "helix/geometry.hpp"

namespace helix {

// Uniform n x n node grid on [-R, R]^2 with Dirichlet data on the square
// boundary. Nodes are (x_i, y_j) = (-R + i h, -R + j h), h = 2R/(n-1).
struct Grid {
    double R = 1.0;
    int n = 65;

    Grid() = default;
    Grid(double half_width, int nodes);

    double spacing() const { return 2.0 * R / (n - 1); }
    int cells() const { return n - 1; }
    double x(int i) const { return -R + i * spacing(); }
    Vec2 node(int i, int j) const { return {x(i), x(j)}; }
    int index(int i, int j) const { return j * n + i; }
    bool boundary(int i, int j) const {
        return i == 0 || j == 0 || i == n - 1 || j == n - 1;
    }
    // Center of the cell whose lower-left node is (ci, cj).
    Vec2 cell_center(int ci, int cj) const {
        return {x(ci) + 0.5 * spacing(), x(cj) + 0.5 * spacing()};
    }
    // Cell containing p (clamped to the cell array).
    void locate_cell(Vec2 p, int& ci, int& cj) const;
    // Center of the cell containing p.
    Vec2 nearest_cell_center(Vec2 p) const;
    bool contains(Vec2 p) const {
        return std::fabs(p.x) <= R && std::fabs(p.y) <= R;
    }

    bool operator==(const Grid& o) const { return R == o.R && n == o.n; }
};

struct ScalarField {
    Grid grid;
    std::vector<double> values;  // row major, index j*n + i
    std::string meta;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, std::string what = "")
        : grid(g), values(static_cast<size_t>(g.n) * g.n, 0.0), meta(std::move(what)) {}

    double& at(int i, int j) { return values[grid.index(i, j)]; }
    double at(int i, int j) const { return values[grid.index(i, j)]; }

    // Bilinear interpolation; throws DomainError outside the grid.
    double interpolate(Vec2 p) const;

    double max_abs() const;
    void zero_boundary();
};

// CSV export with columns i, j, x, y, value (17 significant digits).
void write_field_csv(const ScalarField& f, const std::string& path);

// Compact binary dump: uint32 n, float64 R, then n*n row-major float64
// values, little-endian.
void write_field_binary(const ScalarField& f, const std::string& path);
ScalarField read_field_binary(const std::string& path);

}  // namespace helix

#endif
